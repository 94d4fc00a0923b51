#pragma once

#include "rhpe/operators.hpp"

#include <span>
#include <vector>

namespace rhpe {

/// One accepted HPE step: v ∈ A(y) + B^[ε](y) with stepsize λ. For the
/// regularized methods A = μ(· − x0), so b = v − μ(y − x0) is the B-part;
/// without regularization b == v.
struct HpeCertificate {
  Vector y;
  Vector v;
  Vector b;
  double eps = 0.0;
  double lambda = 0.0;
  /// Smallest σ_k ≤ σ for which the relative-error inequality held.
  double sigma_used = 0.0;
};

struct HpeCheck {
  bool holds = false;
  double lhs = 0.0;  // ‖λv + y − x_prev‖² + 2λε
  double rhs = 0.0;  // σ²‖y − x_prev‖²
};

/// Relative slack applied to every inequality check: lhs ≤ rhs + 1e-10·max(1, rhs).
inline constexpr double kRelativeSlack = 1e-10;

inline bool within_slack(double lhs, double rhs) noexcept {
  return lhs <= rhs + kRelativeSlack * (rhs > 1.0 ? rhs : 1.0);
}

HpeCheck verify_hpe_condition(const Vector& x_prev, const HpeCertificate& cert, double sigma);

/// x_next = x_prev − λv.
Vector extragradient_update(const Vector& x_prev, double lambda, const Vector& v);

/// (1−σ)‖y − x_prev‖ ≤ ‖λv‖ ≤ (1+σ)‖y − x_prev‖, each side with relative slack.
bool step_length_bracket_holds(const Vector& x_prev, const HpeCertificate& cert, double sigma);

// ---------------------------------------------------------------------------
// Rate machinery
// ---------------------------------------------------------------------------

/// θ = (1/(2λμ) + 1/(1−σ²))⁻¹ ∈ (0, 1). Called with the iteration's own λ_k
/// it gives θ_k. Throws degenerate_regularization for μ = 0.
double theta(double lambda_min, double mu, double sigma);

struct RateConstants {
  double theta = 0.0;
  double lambda_min = 0.0;
  double mu = 0.0;
  double sigma = 0.0;

  static RateConstants make(double lambda_min, double mu, double sigma);
};

struct RateBounds {
  double v_bound = 0.0;
  double eps_bound = 0.0;
  double x_bound = 0.0;
};

/// Pointwise bounds at iteration k ≥ 1 for a μ-strongly monotone inclusion:
///   ‖v_k‖ ≤ √((1+σ)/(1−σ))·(1−θ)^((k−1)/2)·d0/λ
///   ε_k   ≤ σ²/(2(1−σ²))·(1−θ)^(k−1)·d0²/λ
///   ‖x* − x_k‖ ≤ (1−θ)^(k/2)·d0
RateBounds pointwise_rate_bounds(long k, double d0, double lambda_min, double mu, double sigma);

/// Γ_k = [∏_{j≤k} (1 − θ_j)]^{1/2}; each θ_j must lie in (0, 1).
std::vector<double> gamma_sequence(std::span<const double> thetas);

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

struct IterationRecord {
  long k = 0;      // global inner-iteration index (1-based)
  int round = 1;   // outer round (DR-HPE); 1 otherwise
  Vector x_prev;
  Vector x_next;
  Vector y;
  double lambda = 0.0;
  double mu = 0.0;
  double v_norm = 0.0;
  double b_norm = 0.0;
  double eps = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double y_dist_x0 = 0.0;
  double theta_k = 0.0;  // 0 when μ = 0
  double gamma_k = 1.0;  // restarts at 1 in each outer round
};

}  // namespace rhpe
