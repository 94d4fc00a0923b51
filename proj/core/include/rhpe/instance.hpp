#pragma once

#include "rhpe/operators.hpp"

#include <functional>
#include <optional>
#include <string>

namespace rhpe {

enum class ConstraintKind { none, box, l1 };

const char* to_string(ConstraintKind kind) noexcept;

/// The resolvent-computable part C of B = F + C for affine instances.
struct Constraint {
  ConstraintKind kind = ConstraintKind::none;
  Vector lo;          // box only
  Vector hi;          // box only
  double alpha = 0.0; // l1 only
};

/// B = F + C with F(x) = Mx + q monotone and Lipschitz on Ω, C maximal
/// monotone with a computable resolvent, and Dom(C) ⊆ Ω ⊆ Dom(F).
///
/// All shipped instances are affine, which keeps M and q available for file
/// export and for the regularized-solution oracle. The evaluator inside F may
/// exploit structure (block rotations are evaluated in O(n)).
struct ProblemInstance {
  std::string name;
  Matrix m;
  Vector q;
  Constraint constraint;
  LipschitzMap f;
  ResolventMap c;
  ConvexSet omega;

  std::optional<Vector> known_solution;
  /// Generator-supplied default starting point.
  std::optional<Vector> start;
  /// True when the solution set B⁻¹(0) is known to be the single point
  /// `known_solution`, so d0 = ‖x0 − x*‖.
  bool unique_solution = false;

  /// x*_μ, the unique zero of B + μ(· − x0). Empty when unavailable.
  std::function<Vector(double mu, const Vector& x0)> solution_oracle;

  Index dim() const noexcept { return q.size(); }
};

/// Builds the full instance (F, C, Ω, oracle) from affine data. Ω is the box
/// for box constraints and the whole space otherwise. Uniqueness is inferred:
/// M + Mᵀ positive definite, or M nonsingular with a known interior zero of F.
ProblemInstance make_affine_instance(std::string name, Matrix m, Vector q, Constraint constraint,
                                     std::optional<Vector> known_solution = std::nullopt);

/// Natural residual ‖y − (I + C)⁻¹(y − (F(y) + μ(y − x0)))‖ of the regularized
/// inclusion at y; zero exactly at x*_μ.
double regularized_residual(const ProblemInstance& problem, double mu, const Vector& x0,
                            const Vector& y);

/// Distance from x0 to B⁻¹(0) when the solution set is a known singleton.
std::optional<double> solution_distance(const ProblemInstance& problem, const Vector& x0);

}  // namespace rhpe
