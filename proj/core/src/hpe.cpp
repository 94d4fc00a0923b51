#include "rhpe/hpe.hpp"

#include "rhpe/error.hpp"

#include <cmath>
#include <string>

namespace rhpe {

namespace {

void require_sigma(double sigma) {
  if (!(sigma >= 0.0 && sigma < 1.0)) {
    throw Error(Errc::invalid_input, "sigma must lie in [0, 1)");
  }
}

}  // namespace

HpeCheck verify_hpe_condition(const Vector& x_prev, const HpeCertificate& cert, double sigma) {
  require_sigma(sigma);
  if (!(cert.lambda > 0.0)) throw Error(Errc::invalid_input, "certificate lambda must be > 0");
  if (!(cert.eps >= 0.0)) throw Error(Errc::invalid_input, "certificate eps must be >= 0");
  require_dim(cert.y, x_prev.size(), "certificate y");
  require_dim(cert.v, x_prev.size(), "certificate v");
  if (!x_prev.allFinite() || !cert.y.allFinite() || !cert.v.allFinite() ||
      !std::isfinite(cert.eps)) {
    throw Error(Errc::invalid_input, "non-finite HPE certificate");
  }
  HpeCheck out;
  out.lhs = (cert.lambda * cert.v + cert.y - x_prev).squaredNorm() + 2.0 * cert.lambda * cert.eps;
  out.rhs = sigma * sigma * (cert.y - x_prev).squaredNorm();
  out.holds = within_slack(out.lhs, out.rhs);
  return out;
}

Vector extragradient_update(const Vector& x_prev, double lambda, const Vector& v) {
  if (!(lambda > 0.0)) throw Error(Errc::invalid_input, "lambda must be > 0");
  require_dim(v, x_prev.size(), "v");
  return x_prev - lambda * v;
}

bool step_length_bracket_holds(const Vector& x_prev, const HpeCertificate& cert, double sigma) {
  require_sigma(sigma);
  const double step = (cert.y - x_prev).norm();
  const double lv = cert.lambda * cert.v.norm();
  const double lower = (1.0 - sigma) * step;
  const double upper = (1.0 + sigma) * step;
  return within_slack(lower, lv) && within_slack(lv, upper);
}

double theta(double lambda_min, double mu, double sigma) {
  require_sigma(sigma);
  if (!(lambda_min > 0.0)) throw Error(Errc::invalid_input, "lambda must be > 0");
  if (mu == 0.0) {
    throw Error(Errc::degenerate_regularization, "theta is 0 without regularization (mu = 0)");
  }
  if (!(mu > 0.0)) throw Error(Errc::invalid_input, "mu must be > 0");
  return 1.0 / (1.0 / (2.0 * lambda_min * mu) + 1.0 / (1.0 - sigma * sigma));
}

RateConstants RateConstants::make(double lambda_min, double mu, double sigma) {
  return {rhpe::theta(lambda_min, mu, sigma), lambda_min, mu, sigma};
}

RateBounds pointwise_rate_bounds(long k, double d0, double lambda_min, double mu, double sigma) {
  if (k < 1) throw Error(Errc::invalid_input, "iteration index must be >= 1");
  if (!(d0 >= 0.0)) throw Error(Errc::invalid_input, "distance must be >= 0");
  const double th = theta(lambda_min, mu, sigma);
  const double q = 1.0 - th;
  const double km1 = static_cast<double>(k - 1);
  RateBounds out;
  out.v_bound = std::sqrt((1.0 + sigma) / (1.0 - sigma)) * std::pow(q, 0.5 * km1) / lambda_min * d0;
  out.eps_bound = sigma * sigma / (2.0 * (1.0 - sigma * sigma)) * std::pow(q, km1) / lambda_min *
                  d0 * d0;
  out.x_bound = std::pow(q, 0.5 * static_cast<double>(k)) * d0;
  return out;
}

std::vector<double> gamma_sequence(std::span<const double> thetas) {
  std::vector<double> out;
  out.reserve(thetas.size());
  double product = 1.0;
  for (std::size_t j = 0; j < thetas.size(); ++j) {
    const double t = thetas[j];
    if (!(t > 0.0 && t < 1.0)) {
      throw Error(Errc::invalid_input, "theta_" + std::to_string(j + 1) + " outside (0, 1)");
    }
    product *= 1.0 - t;
    out.push_back(std::sqrt(product));
  }
  return out;
}

}  // namespace rhpe
