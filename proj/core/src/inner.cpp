#include "rhpe/inner.hpp"

#include "rhpe/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rhpe {

namespace {

constexpr double kConvexityTolerance = 1e-12;
constexpr int kMaxHalvings = 40;

void fill_check(const Vector& x_prev, double sigma, StepResult& out) {
  const HpeCertificate& cert = out.cert;
  const double step_sq = (cert.y - x_prev).squaredNorm();
  const double residual_sq = (cert.lambda * cert.v + cert.y - x_prev).squaredNorm();
  out.check.lhs = residual_sq + 2.0 * cert.lambda * cert.eps;
  out.check.rhs = sigma * sigma * step_sq;
  out.check.holds = within_slack(out.check.lhs, out.check.rhs);
  out.cert.sigma_used =
      step_sq > 0.0 ? std::min(sigma, std::sqrt(out.check.lhs / step_sq)) : 0.0;
}

void validate_step_inputs(Index n, double mu, const Vector& x0, const Vector& x_prev,
                          double lambda, double sigma) {
  if (!(lambda > 0.0)) throw Error(Errc::invalid_input, "stepsize must be > 0");
  if (!(mu >= 0.0)) throw Error(Errc::invalid_input, "mu must be >= 0");
  if (!(sigma >= 0.0 && sigma < 1.0)) throw Error(Errc::invalid_input, "sigma must lie in [0, 1)");
  require_dim(x0, n, "x0");
  require_dim(x_prev, n, "x_prev");
  require_finite(x0, "x0");
  require_finite(x_prev, "x_prev");
}

void throw_status(StepStatus status, EngineKind kind) {
  const std::string who = to_string(kind);
  switch (status) {
    case StepStatus::ok:
      return;
    case StepStatus::certificate_violation:
      throw Error(Errc::certificate_violation,
                  who + " step violates the relative-error inequality (check L)");
    case StepStatus::broken_convexity:
      throw Error(Errc::broken_convexity, who + " step produced a negative convexity gap");
  }
}

}  // namespace

const char* to_string(EngineKind kind) noexcept {
  return kind == EngineKind::tseng ? "tseng" : "korpelevich";
}

EngineKind parse_engine(std::string_view name) {
  if (name == "tseng") return EngineKind::tseng;
  if (name == "korpelevich") return EngineKind::korpelevich;
  throw Error(Errc::invalid_config, "unknown engine '" + std::string(name) + "'");
}

StepStatus tseng_step_into(const LipschitzMap& f, const ResolventMap& c, const ConvexSet& omega,
                           double mu, const Vector& x0, const Vector& x_prev, double lambda,
                           double sigma, StepResult& out, StepWorkspace& ws) {
  // P_Ω(x_prev) is formed once and feeds both F-evaluations.
  omega.project_into(x_prev, ws.p);
  f.evaluate_into(ws.p, ws.fp);
  ws.z = x_prev - lambda * ws.fp;
  shifted_resolvent_into(c, lambda, mu, x0, ws.z, ws.scratch, out.cert.y);
  const Vector& y = out.cert.y;
  f.evaluate_into(y, ws.fy);

  out.c = (x_prev - y) / lambda - ws.fp - mu * (y - x0);
  out.cert.b = ws.fy + out.c;
  out.cert.v = out.cert.b + mu * (y - x0);
  out.cert.eps = 0.0;
  out.cert.lambda = lambda;
  out.x_next = y - lambda * (ws.fy - ws.fp);
  out.c_point = y;

  fill_check(x_prev, sigma, out);
  if (!std::isfinite(out.check.lhs) || !out.check.holds) return StepStatus::certificate_violation;
  return StepStatus::ok;
}

StepStatus korpelevich_step_into(const LipschitzMap& f, const ResolventMap& g, double mu,
                                 const Vector& x0, const Vector& x_prev, double lambda,
                                 double sigma, StepResult& out, StepWorkspace& ws) {
  f.evaluate_into(x_prev, ws.fp);
  ws.z = x_prev - lambda * ws.fp;
  shifted_resolvent_into(g, lambda, mu, x0, ws.z, ws.scratch, out.cert.y);
  const Vector& y = out.cert.y;
  f.evaluate_into(y, ws.fy);
  ws.z = x_prev - lambda * ws.fy;
  shifted_resolvent_into(g, lambda, mu, x0, ws.z, ws.scratch, out.x_next);
  const Vector& xn = out.x_next;

  out.c = (ws.z - xn) / lambda - mu * (xn - x0);
  double eps = g.value(y) - g.value(xn) - out.c.dot(y - xn);
  if (!(eps >= -kConvexityTolerance)) return StepStatus::broken_convexity;
  eps = std::max(eps, 0.0);

  out.cert.b = ws.fy + out.c;
  out.cert.v = out.cert.b + mu * (y - x0);
  out.cert.eps = eps;
  out.cert.lambda = lambda;
  out.c_point = xn;

  fill_check(x_prev, sigma, out);
  if (!std::isfinite(out.check.lhs) || !out.check.holds) return StepStatus::certificate_violation;
  return StepStatus::ok;
}

StepResult tseng_step(const LipschitzMap& f, const ResolventMap& c, const ConvexSet& omega,
                      double mu, const Vector& x0, const Vector& x_prev, double lambda,
                      double sigma) {
  validate_step_inputs(f.dim(), mu, x0, x_prev, lambda, sigma);
  StepResult out;
  StepWorkspace ws;
  throw_status(tseng_step_into(f, c, omega, mu, x0, x_prev, lambda, sigma, out, ws),
               EngineKind::tseng);
  return out;
}

StepResult korpelevich_step(const LipschitzMap& f, const ResolventMap& g, double mu,
                            const Vector& x0, const Vector& x_prev, double lambda, double sigma) {
  validate_step_inputs(f.dim(), mu, x0, x_prev, lambda, sigma);
  if (!g.has_value_function()) {
    throw Error(Errc::unsupported_problem, "korpelevich needs C = ∂g with g evaluable");
  }
  StepResult out;
  StepWorkspace ws;
  throw_status(korpelevich_step_into(f, g, mu, x0, x_prev, lambda, sigma, out, ws),
               EngineKind::korpelevich);
  return out;
}

// ---------------------------------------------------------------------------

InnerEngine::InnerEngine(EngineKind kind, double sigma, double lambda)
    : kind_(kind), sigma_(sigma), nominal_lambda_(lambda), lambda_(lambda) {}

InnerEngine InnerEngine::tseng(const ProblemInstance& problem, double sigma) {
  return make(EngineKind::tseng, problem, sigma);
}

InnerEngine InnerEngine::korpelevich(const ProblemInstance& problem, double sigma) {
  return make(EngineKind::korpelevich, problem, sigma);
}

InnerEngine InnerEngine::make(EngineKind kind, const ProblemInstance& problem, double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) {
    throw Error(Errc::invalid_config, "inner engines need sigma in (0, 1)");
  }
  if (kind == EngineKind::korpelevich && !problem.c.has_value_function()) {
    throw Error(Errc::unsupported_problem, "korpelevich needs C = ∂g with g evaluable");
  }
  return InnerEngine(kind, sigma, sigma / problem.f.lipschitz());
}

void InnerEngine::step(const ProblemInstance& problem, double mu, const Vector& x0,
                       const Vector& x_prev, StepResult& out, StepWorkspace& ws) {
  for (;;) {
    StepStatus status;
    if (kind_ == EngineKind::tseng) {
      status = tseng_step_into(problem.f, problem.c, problem.omega, mu, x0, x_prev, lambda_,
                               sigma_, out, ws);
    } else {
      status = korpelevich_step_into(problem.f, problem.c, mu, x0, x_prev, lambda_, sigma_, out,
                                     ws);
    }
    if (status == StepStatus::ok) return;
    if (status == StepStatus::certificate_violation && kind_ == EngineKind::korpelevich &&
        halvings_ < kMaxHalvings && x_prev.allFinite()) {
      lambda_ *= 0.5;
      ++halvings_;
      continue;
    }
    throw_status(status, kind_);
  }
}

}  // namespace rhpe
