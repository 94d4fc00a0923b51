#include "rhpe/operators.hpp"

#include "rhpe/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace rhpe {

namespace {

constexpr double kPsdTolerance = 1e-9;
constexpr double kIndicatorTolerance = 1e-10;

}  // namespace

void require_finite(const Vector& x, std::string_view what) {
  if (!x.allFinite()) {
    throw Error(Errc::invalid_input, std::string(what) + " has non-finite coordinates");
  }
}

void require_dim(const Vector& x, Index n, std::string_view what) {
  if (x.size() != n) {
    throw Error(Errc::invalid_input, std::string(what) + " has dimension " +
                                         std::to_string(x.size()) + ", expected " +
                                         std::to_string(n));
  }
}

Vector project_box(const Vector& lo, const Vector& hi, const Vector& x) {
  require_dim(lo, x.size(), "lower bound");
  require_dim(hi, x.size(), "upper bound");
  require_finite(x, "point");
  for (Index i = 0; i < x.size(); ++i) {
    if (std::isnan(lo[i]) || std::isnan(hi[i]) || lo[i] > hi[i]) {
      throw Error(Errc::invalid_set, "box bound lo > hi at coordinate " + std::to_string(i));
    }
  }
  return x.cwiseMax(lo).cwiseMin(hi);
}

Vector soft_threshold(double alpha, double lambda, const Vector& x) {
  if (!(alpha > 0.0) || !(lambda > 0.0)) {
    throw Error(Errc::invalid_input, "soft_threshold needs alpha > 0 and lambda > 0");
  }
  require_finite(x, "point");
  const double t = lambda * alpha;
  Vector out(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double shrunk = std::abs(x[i]) - t;
    out[i] = shrunk > 0.0 ? std::copysign(shrunk, x[i]) : 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------

ConvexSet ConvexSet::whole_space(Index n) {
  if (n < 1) throw Error(Errc::invalid_input, "dimension must be >= 1");
  ConvexSet s;
  s.kind_ = Kind::whole_space;
  s.n_ = n;
  return s;
}

ConvexSet ConvexSet::box(Vector lo, Vector hi) {
  if (lo.size() < 1 || lo.size() != hi.size()) {
    throw Error(Errc::invalid_set, "box bounds must be nonempty and of equal dimension");
  }
  for (Index i = 0; i < lo.size(); ++i) {
    if (std::isnan(lo[i]) || std::isnan(hi[i]) || lo[i] > hi[i] ||
        lo[i] == std::numeric_limits<double>::infinity() ||
        hi[i] == -std::numeric_limits<double>::infinity()) {
      throw Error(Errc::invalid_set, "degenerate box at coordinate " + std::to_string(i));
    }
  }
  ConvexSet s;
  s.kind_ = Kind::box;
  s.n_ = lo.size();
  s.a_ = std::move(lo);
  s.b_ = std::move(hi);
  return s;
}

ConvexSet ConvexSet::ball(Vector center, double radius) {
  if (center.size() < 1) throw Error(Errc::invalid_set, "ball center is empty");
  require_finite(center, "ball center");
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw Error(Errc::invalid_set, "ball radius must be finite and nonnegative");
  }
  ConvexSet s;
  s.kind_ = Kind::ball;
  s.n_ = center.size();
  s.a_ = std::move(center);
  s.radius_ = radius;
  return s;
}

Vector ConvexSet::project(const Vector& x) const {
  require_dim(x, n_, "point");
  require_finite(x, "point");
  Vector out(n_);
  project_into(x, out);
  return out;
}

void ConvexSet::project_into(const Vector& x, Vector& out) const {
  switch (kind_) {
    case Kind::whole_space:
      out = x;
      return;
    case Kind::box:
      out = x.cwiseMax(a_).cwiseMin(b_);
      return;
    case Kind::ball: {
      const double dist = (x - a_).norm();
      if (dist <= radius_) {
        out = x;
      } else {
        out = a_ + (radius_ / dist) * (x - a_);
      }
      return;
    }
  }
}

bool ConvexSet::contains(const Vector& x, double tol) const {
  if (x.size() != n_ || !x.allFinite()) return false;
  switch (kind_) {
    case Kind::whole_space:
      return true;
    case Kind::box:
      for (Index i = 0; i < n_; ++i) {
        if (x[i] < a_[i] - tol || x[i] > b_[i] + tol) return false;
      }
      return true;
    case Kind::ball:
      return (x - a_).norm() <= radius_ + tol;
  }
  return false;
}

// ---------------------------------------------------------------------------

LipschitzMap::LipschitzMap(Index n, Evaluator eval, double lipschitz, ConvexSet domain)
    : n_(n), eval_(std::move(eval)), lipschitz_(lipschitz), domain_(std::move(domain)) {
  if (n_ < 1) throw Error(Errc::invalid_input, "dimension must be >= 1");
  if (!eval_) throw Error(Errc::invalid_input, "missing evaluator");
  if (!(lipschitz_ > 0.0) || !std::isfinite(lipschitz_)) {
    throw Error(Errc::invalid_input, "Lipschitz constant must be positive and finite");
  }
  if (domain_.dim() != n_) throw Error(Errc::invalid_input, "domain dimension mismatch");
}

Vector LipschitzMap::operator()(const Vector& x) const {
  require_dim(x, n_, "point");
  require_finite(x, "point");
  Vector out(n_);
  eval_(x, out);
  return out;
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const Matrix gram = m.transpose() * m;
  // Deterministic, not aligned with any coordinate axis.
  Vector u(gram.cols());
  for (Index i = 0; i < u.size(); ++i) u[i] = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i));
  u.normalize();
  double estimate = 0.0;
  for (int it = 0; it < 200; ++it) {
    Vector w = gram * u;
    const double next = u.dot(w);
    const double norm_w = w.norm();
    if (norm_w == 0.0) return 0.0;
    u = w / norm_w;
    if (it > 0 && std::abs(next - estimate) <= 1e-12 * std::abs(next)) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  // Rayleigh quotient of the final vector.
  estimate = std::max(estimate, u.dot(gram * u));
  return std::sqrt(std::max(estimate, 0.0));
}

double min_symmetric_eigenvalue(const Matrix& m) {
  const Matrix sym = m + m.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

LipschitzMap affine_map(const Matrix& m, const Vector& q) {
  return affine_map(m, q, ConvexSet::whole_space(std::max<Index>(m.rows(), 1)));
}

LipschitzMap affine_map(const Matrix& m, const Vector& q, ConvexSet domain) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw Error(Errc::invalid_input, "affine map needs a nonempty square matrix");
  }
  require_dim(q, m.rows(), "offset q");
  require_finite(q, "offset q");
  if (!m.allFinite()) throw Error(Errc::invalid_input, "matrix has non-finite entries");
  const double lam_min = min_symmetric_eigenvalue(m);
  if (lam_min < -kPsdTolerance) {
    throw Error(Errc::not_monotone,
                "lambda_min(M + M^T) = " + std::to_string(lam_min) + " < -1e-9");
  }
  double lipschitz = spectral_norm(m);
  // A zero matrix is 0-Lipschitz; any positive constant is valid.
  if (lipschitz == 0.0) lipschitz = 1.0;
  auto eval = [m, q](const Vector& x, Vector& out) { out.noalias() = m * x; out += q; };
  return LipschitzMap(m.rows(), std::move(eval), lipschitz, std::move(domain));
}

// ---------------------------------------------------------------------------

ResolventMap ResolventMap::zero(Index n) {
  if (n < 1) throw Error(Errc::invalid_input, "dimension must be >= 1");
  ResolventMap r;
  r.kind_ = Kind::zero;
  r.n_ = n;
  return r;
}

ResolventMap ResolventMap::normal_cone(ConvexSet set) {
  ResolventMap r;
  r.kind_ = Kind::normal_cone;
  r.n_ = set.dim();
  r.set_ = std::move(set);
  return r;
}

ResolventMap ResolventMap::l1_norm(Index n, double alpha) {
  if (n < 1) throw Error(Errc::invalid_input, "dimension must be >= 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(Errc::invalid_input, "l1 weight alpha must be positive");
  }
  ResolventMap r;
  r.kind_ = Kind::l1_norm;
  r.n_ = n;
  r.alpha_ = alpha;
  return r;
}

ResolventMap ResolventMap::custom(Index n, ResolventFn resolvent, ValueFn value,
                                  MembershipFn membership) {
  if (n < 1) throw Error(Errc::invalid_input, "dimension must be >= 1");
  if (!resolvent) throw Error(Errc::invalid_input, "custom resolvent map needs a resolvent");
  ResolventMap r;
  r.kind_ = Kind::custom;
  r.n_ = n;
  r.custom_resolvent_ = std::move(resolvent);
  r.custom_value_ = std::move(value);
  r.custom_membership_ = std::move(membership);
  return r;
}

Vector ResolventMap::resolvent(double lambda, const Vector& x) const {
  if (!(lambda > 0.0)) throw Error(Errc::invalid_input, "resolvent needs lambda > 0");
  require_dim(x, n_, "point");
  require_finite(x, "point");
  Vector out(n_);
  resolvent_into(lambda, x, out);
  return out;
}

void ResolventMap::resolvent_into(double lambda, const Vector& x, Vector& out) const {
  switch (kind_) {
    case Kind::zero:
      out = x;
      return;
    case Kind::normal_cone:
      set_->project_into(x, out);
      return;
    case Kind::l1_norm: {
      const double t = lambda * alpha_;
      out.resize(x.size());
      for (Index i = 0; i < x.size(); ++i) {
        const double shrunk = std::abs(x[i]) - t;
        out[i] = shrunk > 0.0 ? std::copysign(shrunk, x[i]) : 0.0;
      }
      return;
    }
    case Kind::custom:
      custom_resolvent_(lambda, x, out);
      return;
  }
}

bool ResolventMap::has_value_function() const noexcept {
  return kind_ != Kind::custom || static_cast<bool>(custom_value_);
}

double ResolventMap::value(const Vector& y) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::normal_cone:
      return set_->contains(y, kIndicatorTolerance) ? 0.0
                                                     : std::numeric_limits<double>::infinity();
    case Kind::l1_norm:
      return alpha_ * y.lpNorm<1>();
    case Kind::custom:
      if (!custom_value_) {
        throw Error(Errc::unsupported_problem, "resolvent map has no value function");
      }
      return custom_value_(y);
  }
  return 0.0;
}

bool ResolventMap::has_membership_test() const noexcept {
  return kind_ != Kind::custom || static_cast<bool>(custom_membership_);
}

bool ResolventMap::contains(const Vector& c, const Vector& y, double tol) const {
  if (c.size() != n_ || y.size() != n_) return false;
  switch (kind_) {
    case Kind::zero:
      return c.lpNorm<Eigen::Infinity>() <= tol;
    case Kind::l1_norm:
      for (Index i = 0; i < n_; ++i) {
        if (std::abs(y[i]) <= tol) {
          if (std::abs(c[i]) > alpha_ + tol) return false;
        } else if (std::abs(c[i] - std::copysign(alpha_, y[i])) > tol) {
          return false;
        }
      }
      return true;
    case Kind::normal_cone: {
      const ConvexSet& s = *set_;
      if (!s.contains(y, tol)) return false;
      switch (s.kind()) {
        case ConvexSet::Kind::whole_space:
          return c.lpNorm<Eigen::Infinity>() <= tol;
        case ConvexSet::Kind::box:
          for (Index i = 0; i < n_; ++i) {
            const bool at_lo = y[i] <= s.lo()[i] + tol;
            const bool at_hi = y[i] >= s.hi()[i] - tol;
            if (at_lo && at_hi) continue;
            if (at_hi) {
              if (c[i] < -tol) return false;
            } else if (at_lo) {
              if (c[i] > tol) return false;
            } else if (std::abs(c[i]) > tol) {
              return false;
            }
          }
          return true;
        case ConvexSet::Kind::ball: {
          const Vector offset = y - s.center();
          const double dist = offset.norm();
          if (dist < s.radius() - tol || s.radius() == 0.0) {
            return s.radius() == 0.0 || c.norm() <= tol;
          }
          const Vector u = offset / dist;
          const double along = c.dot(u);
          return along >= -tol && (c - along * u).norm() <= tol;
        }
      }
      return false;
    }
    case Kind::custom:
      if (!custom_membership_) {
        throw Error(Errc::unsupported_problem, "resolvent map has no membership test");
      }
      return custom_membership_(c, y, tol);
  }
  return false;
}

Vector shifted_resolvent(const ResolventMap& c, double lambda, double mu, const Vector& x0,
                         const Vector& x) {
  if (!(lambda > 0.0)) throw Error(Errc::invalid_input, "shifted_resolvent needs lambda > 0");
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw Error(Errc::invalid_input, "shifted_resolvent needs finite mu >= 0");
  }
  require_dim(x, c.dim(), "point");
  require_dim(x0, c.dim(), "anchor x0");
  require_finite(x, "point");
  require_finite(x0, "anchor x0");
  Vector scratch(x.size());
  Vector out(x.size());
  shifted_resolvent_into(c, lambda, mu, x0, x, scratch, out);
  return out;
}

void shifted_resolvent_into(const ResolventMap& c, double lambda, double mu, const Vector& x0,
                            const Vector& x, Vector& scratch, Vector& out) {
  if (mu == 0.0) {
    c.resolvent_into(lambda, x, out);
    return;
  }
  const double denom = 1.0 + lambda * mu;
  scratch = (x + (lambda * mu) * x0) / denom;
  c.resolvent_into(lambda / denom, scratch, out);
}

EnlargementScore sample_enlargement_violation(std::span<const GraphPoint> pairs, const Vector& y,
                                              const Vector& v, double eps) {
  if (!(eps >= 0.0)) throw Error(Errc::invalid_input, "epsilon must be nonnegative");
  require_finite(y, "y");
  require_finite(v, "v");
  if (pairs.empty()) return {0.0, true};
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& p : pairs) {
    require_dim(p.y, y.size(), "sample y'");
    require_dim(p.v, y.size(), "sample v'");
    worst = std::max(worst, -(v - p.v).dot(y - p.y) - eps);
  }
  return {worst, false};
}

}  // namespace rhpe
