#include "rhpe/problems.hpp"

#include "rhpe/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace rhpe {

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error(Errc::invalid_input, "empty range");
  return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
}

namespace {

Matrix uniform_matrix(Rng& rng, Index n) {
  Matrix g(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) g(i, j) = rng.uniform(-1.0, 1.0);
  }
  return g;
}

// (1−s)·S/‖S‖ + s·A/‖A‖; a vanishing part (e.g. skew in 1D) is dropped.
Matrix monotone_mix(Rng& rng, Index n, double skew_fraction) {
  const Matrix g = uniform_matrix(rng, n);
  Matrix s = g.transpose() * g;
  const Matrix k = uniform_matrix(rng, n);
  Matrix a = 0.5 * (k - k.transpose());
  const double ns = spectral_norm(s);
  const double na = spectral_norm(a);
  if (ns > 0.0) s /= ns;
  if (na > 0.0) a /= na;
  return (1.0 - skew_fraction) * s + skew_fraction * a;
}

double finite_or(double v, double fallback) { return std::isfinite(v) ? v : fallback; }

}  // namespace

ProblemInstance make_affine_box_vi(Index n, std::uint64_t seed, double skew_fraction,
                                   const Vector& lo, const Vector& hi) {
  if (n < 1) throw Error(Errc::invalid_input, "dimension must be >= 1");
  if (!(skew_fraction >= 0.0 && skew_fraction <= 1.0)) {
    throw Error(Errc::invalid_input, "skew_fraction must lie in [0, 1]");
  }
  require_dim(lo, n, "box lower bound");
  require_dim(hi, n, "box upper bound");
  // Validates the box (throws invalid_set).
  (void)ConvexSet::box(lo, hi);
  for (Index i = 0; i < n; ++i) {
    if (!(lo[i] < hi[i])) throw Error(Errc::invalid_set, "box must have nonempty interior");
  }

  Rng rng(seed);
  const Matrix m = monotone_mix(rng, n, skew_fraction);
  Vector x_star(n);
  Vector start(n);
  for (Index i = 0; i < n; ++i) {
    const double a = finite_or(lo[i], finite_or(hi[i], 1.0) - 2.0);
    const double b = finite_or(hi[i], a + 2.0);
    x_star[i] = a + (b - a) * rng.uniform(0.1, 0.9);
  }
  for (Index i = 0; i < n; ++i) {
    const double a = finite_or(lo[i], finite_or(hi[i], 1.0) - 2.0);
    const double b = finite_or(hi[i], a + 2.0);
    const double w = b - a;
    start[i] = rng.uniform(a - 0.5 * w, b + 0.5 * w);
  }
  Vector q = -(m * x_star);
  Constraint con{ConstraintKind::box, lo, hi, 0.0};
  ProblemInstance p = make_affine_instance("box-vi-n" + std::to_string(n) + "-s" +
                                               std::to_string(seed),
                                           m, std::move(q), std::move(con), x_star);
  p.start = std::move(start);
  return p;
}

ProblemInstance make_skew_rotation(double scale, int blocks, double spacing, double amplitude) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw Error(Errc::invalid_input, "scale must be > 0");
  if (blocks < 1) throw Error(Errc::invalid_input, "need at least one rotation block");
  if (!(spacing >= 1.0)) throw Error(Errc::invalid_input, "frequency spacing must be >= 1");
  const Index n = 2 * static_cast<Index>(blocks);
  Vector freq(blocks);
  for (int j = 0; j < blocks; ++j) freq[j] = scale * std::pow(spacing, -static_cast<double>(j));

  Matrix m = Matrix::Zero(n, n);
  Vector start = Vector::Zero(n);
  for (int j = 0; j < blocks; ++j) {
    m(2 * j, 2 * j + 1) = freq[j];
    m(2 * j + 1, 2 * j) = -freq[j];
    start[2 * j] = amplitude;
  }
  std::string name = blocks == 1 ? "skew" : "skew-multi-b" + std::to_string(blocks);
  ProblemInstance p = make_affine_instance(std::move(name), m, Vector::Zero(n), Constraint{},
                                           Vector::Zero(n));
  // O(n) evaluation of the block rotation; L is the top frequency.
  p.f = LipschitzMap(
      n,
      [freq](const Vector& x, Vector& out) {
        out.resize(x.size());
        for (Index j = 0; j < freq.size(); ++j) {
          out[2 * j] = freq[j] * x[2 * j + 1];
          out[2 * j + 1] = -freq[j] * x[2 * j];
        }
      },
      scale, ConvexSet::whole_space(n));
  p.start = std::move(start);
  return p;
}

ProblemInstance make_l1_regularized(Index n, std::uint64_t seed, double alpha) {
  if (n < 1) throw Error(Errc::invalid_input, "dimension must be >= 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(Errc::invalid_input, "alpha must be > 0");
  Rng rng(seed);
  const Matrix m = monotone_mix(rng, n, 0.5);

  const Index support = (n + 3) / 4;
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  for (Index i = 0; i < support; ++i) {
    const auto j = static_cast<Index>(i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - i))));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  Vector x_star = Vector::Zero(n);
  for (Index i = 0; i < support; ++i) {
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    x_star[order[static_cast<std::size_t>(i)]] = sign * rng.uniform(0.5, 1.5);
  }
  Vector s(n);
  for (Index i = 0; i < n; ++i) {
    s[i] = x_star[i] != 0.0 ? std::copysign(alpha, x_star[i]) : rng.uniform(-0.9, 0.9) * alpha;
  }
  Vector start(n);
  for (Index i = 0; i < n; ++i) start[i] = rng.uniform(-2.0, 2.0);

  Vector q = -(m * x_star) - s;
  Constraint con{ConstraintKind::l1, Vector(), Vector(), alpha};
  ProblemInstance p =
      make_affine_instance("l1-n" + std::to_string(n) + "-s" + std::to_string(seed), m,
                           std::move(q), std::move(con), x_star);
  p.start = std::move(start);
  return p;
}

bool verify_solution(const ProblemInstance& problem, const Vector& x, double tol) {
  require_dim(x, problem.dim(), "point");
  if (!x.allFinite()) return false;
  if (!problem.c.has_membership_test()) {
    throw Error(Errc::unsupported_problem, problem.name + " has no membership test for C");
  }
  Vector fx(x.size());
  problem.f.evaluate_into(x, fx);
  return problem.c.contains(-fx, x, tol);
}

ProblemInstance named_problem(std::string_view name, Index dim, std::uint64_t seed) {
  if (name == "skew") return make_skew_rotation(1.0);
  if (name == "skew-multi") return make_skew_rotation(1.0, 8, 4.0, 0.1);
  if (name == "box-vi") {
    return make_affine_box_vi(dim, seed, 0.5, Vector::Constant(dim, -1.0), Vector::Constant(dim, 1.0));
  }
  if (name == "l1") return make_l1_regularized(dim, seed, 0.5);
  throw Error(Errc::invalid_config, "unknown problem '" + std::string(name) + "'");
}

}  // namespace rhpe
