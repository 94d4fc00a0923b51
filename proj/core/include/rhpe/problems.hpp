#pragma once

#include "rhpe/instance.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace rhpe {

/// Seeded source used by every generator: std::mt19937_64, uniform doubles
/// taken as (next() >> 11)·2⁻⁵³, so streams are reproducible across
/// platforms and languages.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

/// F(x) = Mx + q, M = (1−s)·S/‖S‖ + s·A/‖A‖ with S = GᵀG PSD and A skew
/// (entries of G, A uniform in [−1, 1]); q = −Mx* for an x* drawn in the
/// middle 80% of the box, so 0 ∈ F(x*) + N_box(x*). The default start is drawn
/// uniformly from the box widened by half its width on each side.
ProblemInstance make_affine_box_vi(Index n, std::uint64_t seed, double skew_fraction,
                                   const Vector& lo, const Vector& hi);

/// Block-diagonal rotation field: block j acts as scale·spacing^(−j)·[[0,1],[−1,0]]
/// on coordinates (2j, 2j+1). C = 0, Ω = whole space, unique zero at the
/// origin, L = scale. The default start puts `amplitude` on the first
/// coordinate of every block; with blocks = 1 it is (amplitude, 0).
ProblemInstance make_skew_rotation(double scale, int blocks = 1, double spacing = 4.0,
                                   double amplitude = 1.0);

/// F(x) = Mx + q with M = ½(S/‖S‖ + A/‖A‖) and C = ∂(α‖·‖₁). The solution x*
/// has ⌈n/4⌉ nonzeros; q = −Mx* − s with s ∈ ∂(α‖·‖₁)(x*).
ProblemInstance make_l1_regularized(Index n, std::uint64_t seed, double alpha);

/// Class-specific exact test of 0 ∈ F(x) + C(x) within `tol`: complementarity
/// of −F(x) for boxes, subgradient conditions for ℓ1, ‖F(x)‖∞ ≤ tol for C = 0.
bool verify_solution(const ProblemInstance& problem, const Vector& x, double tol);

/// Instance by name: "skew" (2D rotation), "skew-multi" (8 blocks, spacing 4,
/// amplitude 0.1), "box-vi", "l1". `dim` and `seed` feed the random families.
ProblemInstance named_problem(std::string_view name, Index dim, std::uint64_t seed);

}  // namespace rhpe
