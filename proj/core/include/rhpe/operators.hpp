#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <variant>

namespace rhpe {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Throws Errc::invalid_input if any coordinate is NaN or infinite.
void require_finite(const Vector& x, std::string_view what);

/// Throws Errc::invalid_input unless `x` has dimension `n`.
void require_dim(const Vector& x, Index n, std::string_view what);

/// Componentwise clamp of x into [lo, hi]. Bounds may be infinite.
Vector project_box(const Vector& lo, const Vector& hi, const Vector& x);

/// Resolvent of λ∂(α‖·‖₁): sign(x_i)·max(|x_i| − λα, 0).
Vector soft_threshold(double alpha, double lambda, const Vector& x);

// ---------------------------------------------------------------------------
// Closed convex sets
// ---------------------------------------------------------------------------

/// A closed convex set with an exact projection: the whole space, a box
/// (bounds may be ±∞), or a Euclidean ball.
class ConvexSet {
 public:
  enum class Kind { whole_space, box, ball };

  static ConvexSet whole_space(Index n);
  static ConvexSet box(Vector lo, Vector hi);
  static ConvexSet ball(Vector center, double radius);

  Kind kind() const noexcept { return kind_; }
  Index dim() const noexcept { return n_; }

  Vector project(const Vector& x) const;
  void project_into(const Vector& x, Vector& out) const;
  bool contains(const Vector& x, double tol) const;

  // Box data (empty unless kind() == box).
  const Vector& lo() const noexcept { return a_; }
  const Vector& hi() const noexcept { return b_; }
  // Ball data (center empty unless kind() == ball).
  const Vector& center() const noexcept { return a_; }
  double radius() const noexcept { return radius_; }

 private:
  ConvexSet() = default;

  Kind kind_ = Kind::whole_space;
  Index n_ = 0;
  Vector a_;
  Vector b_;
  double radius_ = 0.0;
};

// ---------------------------------------------------------------------------
// Single-valued Lipschitz maps
// ---------------------------------------------------------------------------

/// A monotone map F, L-Lipschitz on its domain set Ω. The evaluator writes
/// into a caller-owned vector so hot loops stay allocation free.
class LipschitzMap {
 public:
  using Evaluator = std::function<void(const Vector& x, Vector& out)>;

  LipschitzMap(Index n, Evaluator eval, double lipschitz, ConvexSet domain);

  Vector operator()(const Vector& x) const;
  void evaluate_into(const Vector& x, Vector& out) const { eval_(x, out); }

  double lipschitz() const noexcept { return lipschitz_; }
  const ConvexSet& domain() const noexcept { return domain_; }
  Index dim() const noexcept { return n_; }

 private:
  Index n_;
  Evaluator eval_;
  double lipschitz_;
  ConvexSet domain_;
};

/// Largest singular value by power iteration on MᵀM: stops after 200
/// iterations or when the relative change drops below 1e-12.
double spectral_norm(const Matrix& m);

/// Smallest eigenvalue of the symmetric matrix M + Mᵀ.
double min_symmetric_eigenvalue(const Matrix& m);

/// F(x) = Mx + q on the whole space. Rejects M with λ_min(M + Mᵀ) < −1e-9
/// (Errc::not_monotone).
LipschitzMap affine_map(const Matrix& m, const Vector& q);
LipschitzMap affine_map(const Matrix& m, const Vector& q, ConvexSet domain);

// ---------------------------------------------------------------------------
// Resolvent-computable maximal monotone maps
// ---------------------------------------------------------------------------

/// A maximal monotone C with computable (I + λC)⁻¹. When C = ∂g the value
/// function g is available; concrete kinds also provide an exact membership
/// test for c ∈ C(y).
class ResolventMap {
 public:
  enum class Kind { zero, normal_cone, l1_norm, custom };

  using ResolventFn = std::function<void(double lambda, const Vector& x, Vector& out)>;
  using ValueFn = std::function<double(const Vector& y)>;
  using MembershipFn = std::function<bool(const Vector& c, const Vector& y, double tol)>;

  /// C ≡ 0, resolvent is the identity, g ≡ 0.
  static ResolventMap zero(Index n);
  /// C = N_Ω, resolvent is P_Ω, g = δ_Ω.
  static ResolventMap normal_cone(ConvexSet set);
  /// C = ∂(α‖·‖₁), resolvent is soft thresholding.
  static ResolventMap l1_norm(Index n, double alpha);
  static ResolventMap custom(Index n, ResolventFn resolvent, ValueFn value = {},
                             MembershipFn membership = {});

  Kind kind() const noexcept { return kind_; }
  Index dim() const noexcept { return n_; }

  Vector resolvent(double lambda, const Vector& x) const;
  void resolvent_into(double lambda, const Vector& x, Vector& out) const;

  bool has_value_function() const noexcept;
  /// g(y); +∞ outside dom g. Throws unsupported_problem without a g.
  double value(const Vector& y) const;

  bool has_membership_test() const noexcept;
  /// c ∈ C(y) up to `tol`. Throws unsupported_problem without a test.
  bool contains(const Vector& c, const Vector& y, double tol) const;

  /// Underlying set for normal cones.
  const ConvexSet* set() const noexcept { return set_ ? &*set_ : nullptr; }
  double alpha() const noexcept { return alpha_; }

 private:
  ResolventMap() = default;

  Kind kind_ = Kind::zero;
  Index n_ = 0;
  std::optional<ConvexSet> set_;
  double alpha_ = 0.0;
  ResolventFn custom_resolvent_;
  ValueFn custom_value_;
  MembershipFn custom_membership_;
};

/// Resolvent of C_μ = C + μ(· − x0):
///   (I + λC_μ)⁻¹x = (I + λ/(1+λμ) C)⁻¹((x + λμx0)/(1+λμ)).
/// With μ = 0 this is exactly C.resolvent(λ, x).
Vector shifted_resolvent(const ResolventMap& c, double lambda, double mu, const Vector& x0,
                         const Vector& x);
void shifted_resolvent_into(const ResolventMap& c, double lambda, double mu, const Vector& x0,
                            const Vector& x, Vector& scratch, Vector& out);

// ---------------------------------------------------------------------------
// ε-enlargement falsification
// ---------------------------------------------------------------------------

struct GraphPoint {
  Vector y;
  Vector v;
};

struct EnlargementScore {
  double score = 0.0;
  bool empty_sample = false;
};

/// max over samples (y′, v′) of −⟨v − v′, y − y′⟩ − ε. A positive score
/// proves v ∉ B^[ε](y); a nonpositive one is only consistent with membership.
EnlargementScore sample_enlargement_violation(std::span<const GraphPoint> pairs, const Vector& y,
                                              const Vector& v, double eps);

}  // namespace rhpe
