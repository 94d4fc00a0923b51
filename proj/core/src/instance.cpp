#include "rhpe/instance.hpp"

#include "rhpe/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace rhpe {

const char* to_string(ConstraintKind kind) noexcept {
  switch (kind) {
    case ConstraintKind::none: return "none";
    case ConstraintKind::box: return "box";
    case ConstraintKind::l1: return "l1";
  }
  return "none";
}

namespace {

// Per-coordinate state of the active-set oracle. For boxes: free / at lower
// / at upper bound. For ℓ1: zero / positive / negative.
enum class Slot : unsigned char { free_or_zero, lower_or_pos, upper_or_neg };

struct AffineVi {
  Matrix a;  // M + μI
  Vector r;  // q − μx0
  const Constraint* constraint;
};

// Solves the linear system induced by a pattern. Returns false if singular.
bool solve_pattern(const AffineVi& vi, const std::vector<Slot>& pattern, Vector& x) {
  const Index n = vi.r.size();
  const Constraint& con = *vi.constraint;
  std::vector<Index> free_idx;
  Vector rhs_shift = Vector::Zero(n);
  x.setZero(n);
  for (Index i = 0; i < n; ++i) {
    const Slot s = pattern[static_cast<std::size_t>(i)];
    if (con.kind == ConstraintKind::box) {
      if (s == Slot::free_or_zero) {
        free_idx.push_back(i);
      } else {
        x[i] = s == Slot::lower_or_pos ? con.lo[i] : con.hi[i];
      }
    } else {  // l1
      if (s == Slot::free_or_zero) {
        x[i] = 0.0;
      } else {
        free_idx.push_back(i);
        rhs_shift[i] = s == Slot::lower_or_pos ? con.alpha : -con.alpha;
      }
    }
  }
  if (free_idx.empty()) return true;
  const Index nf = static_cast<Index>(free_idx.size());
  Matrix aff(nf, nf);
  Vector rhs(nf);
  for (Index p = 0; p < nf; ++p) {
    const Index i = free_idx[static_cast<std::size_t>(p)];
    double acc = -vi.r[i] - rhs_shift[i];
    for (Index j = 0; j < n; ++j) {
      const Slot sj = pattern[static_cast<std::size_t>(j)];
      const bool j_fixed = con.kind == ConstraintKind::box ? sj != Slot::free_or_zero : false;
      if (j_fixed) acc -= vi.a(i, j) * x[j];
    }
    rhs[p] = acc;
    for (Index q = 0; q < nf; ++q) aff(p, q) = vi.a(i, free_idx[static_cast<std::size_t>(q)]);
  }
  Eigen::PartialPivLU<Matrix> lu(aff);
  const Vector sol = lu.solve(rhs);
  if (!sol.allFinite()) return false;
  for (Index p = 0; p < nf; ++p) x[free_idx[static_cast<std::size_t>(p)]] = sol[p];
  return true;
}

// Checks KKT for the pattern solution and proposes the next pattern.
bool update_pattern(const AffineVi& vi, const Vector& x, std::vector<Slot>& pattern) {
  const Constraint& con = *vi.constraint;
  const Vector w = -(vi.a * x + vi.r);
  const double tol = 1e-13 * (1.0 + x.lpNorm<Eigen::Infinity>() + w.lpNorm<Eigen::Infinity>());
  bool optimal = true;
  for (Index i = 0; i < x.size(); ++i) {
    Slot& s = pattern[static_cast<std::size_t>(i)];
    if (con.kind == ConstraintKind::box) {
      if (s == Slot::free_or_zero) {
        if (x[i] < con.lo[i] - tol) {
          s = Slot::lower_or_pos;
          optimal = false;
        } else if (x[i] > con.hi[i] + tol) {
          s = Slot::upper_or_neg;
          optimal = false;
        }
      } else if (s == Slot::lower_or_pos && w[i] > tol) {
        s = Slot::free_or_zero;
        optimal = false;
      } else if (s == Slot::upper_or_neg && w[i] < -tol) {
        s = Slot::free_or_zero;
        optimal = false;
      }
    } else {
      if (s == Slot::free_or_zero) {
        if (w[i] > con.alpha + tol) {
          s = Slot::lower_or_pos;
          optimal = false;
        } else if (w[i] < -con.alpha - tol) {
          s = Slot::upper_or_neg;
          optimal = false;
        }
      } else if ((s == Slot::lower_or_pos && x[i] < -tol) ||
                 (s == Slot::upper_or_neg && x[i] > tol)) {
        s = Slot::free_or_zero;
        optimal = false;
      }
    }
  }
  return optimal;
}

std::vector<Slot> pattern_from_point(const Constraint& con, const Vector& x) {
  std::vector<Slot> pattern(static_cast<std::size_t>(x.size()), Slot::free_or_zero);
  for (Index i = 0; i < x.size(); ++i) {
    Slot& s = pattern[static_cast<std::size_t>(i)];
    if (con.kind == ConstraintKind::box) {
      if (x[i] <= con.lo[i]) s = Slot::lower_or_pos;
      else if (x[i] >= con.hi[i]) s = Slot::upper_or_neg;
    } else {
      if (x[i] > 0.0) s = Slot::lower_or_pos;
      else if (x[i] < 0.0) s = Slot::upper_or_neg;
    }
  }
  return pattern;
}

bool active_set(const AffineVi& vi, std::vector<Slot> pattern, Vector& x) {
  for (int round = 0; round < 200; ++round) {
    if (!solve_pattern(vi, pattern, x)) return false;
    if (update_pattern(vi, x, pattern)) return true;
  }
  return false;
}

Vector resolvent_of(const Constraint& con, double lambda, const Vector& z) {
  switch (con.kind) {
    case ConstraintKind::none: return z;
    case ConstraintKind::box: return z.cwiseMax(con.lo).cwiseMin(con.hi);
    case ConstraintKind::l1: return soft_threshold(con.alpha, lambda, z);
  }
  return z;
}

// Forward-backward-forward iteration on the strongly monotone problem, used
// only when the active-set sweep cycles.
Vector high_accuracy_solve(const AffineVi& vi, const Vector& start) {
  const double lip = std::max(spectral_norm(vi.a), 1e-300);
  const double lambda = 0.5 / lip;
  Vector x = start;
  for (long it = 0; it < 20'000'000; ++it) {
    const Vector fx = vi.a * x + vi.r;
    const Vector y = resolvent_of(*vi.constraint, lambda, x - lambda * fx);
    const Vector x_next = y - lambda * (vi.a * y - vi.a * x);
    const double step = (y - x).norm();
    x = x_next;
    if (step <= 1e-15 * (1.0 + x.norm())) break;
  }
  return x;
}

}  // namespace

ProblemInstance make_affine_instance(std::string name, Matrix m, Vector q, Constraint constraint,
                                     std::optional<Vector> known_solution) {
  const Index n = q.size();
  if (n < 1 || m.rows() != n || m.cols() != n) {
    throw Error(Errc::invalid_input, "affine instance needs square M matching q");
  }
  ConvexSet omega = ConvexSet::whole_space(n);
  std::optional<ResolventMap> c;
  switch (constraint.kind) {
    case ConstraintKind::none:
      c = ResolventMap::zero(n);
      break;
    case ConstraintKind::box:
      omega = ConvexSet::box(constraint.lo, constraint.hi);
      c = ResolventMap::normal_cone(omega);
      break;
    case ConstraintKind::l1:
      c = ResolventMap::l1_norm(n, constraint.alpha);
      break;
  }
  LipschitzMap f = affine_map(m, q, omega);

  bool unique = min_symmetric_eigenvalue(m) > 1e-10 * std::max(1.0, f.lipschitz());
  if (!unique && known_solution && constraint.kind != ConstraintKind::l1) {
    Eigen::FullPivLU<Matrix> lu(m);
    lu.setThreshold(1e-10);
    const bool nonsingular = lu.rank() == n;
    const Vector fx = m * *known_solution + q;
    const bool zero_of_f = fx.norm() <= 1e-12 * (1.0 + q.norm());
    bool interior = true;
    if (constraint.kind == ConstraintKind::box) {
      for (Index i = 0; i < n; ++i) {
        interior = interior && (*known_solution)[i] > constraint.lo[i] &&
                   (*known_solution)[i] < constraint.hi[i];
      }
    }
    unique = nonsingular && zero_of_f && interior;
  }

  ProblemInstance p{std::move(name), std::move(m), std::move(q), std::move(constraint),
                    std::move(f), std::move(*c), std::move(omega), std::move(known_solution),
                    std::nullopt, unique, {}};

  p.solution_oracle = [m = p.m, qv = p.q, con = p.constraint](double mu, const Vector& x0) {
    if (!(mu > 0.0)) throw Error(Errc::invalid_input, "oracle needs mu > 0");
    require_dim(x0, qv.size(), "x0");
    AffineVi vi{m + mu * Matrix::Identity(m.rows(), m.cols()), qv - mu * x0, &con};
    const Vector unconstrained = Eigen::PartialPivLU<Matrix>(vi.a).solve(-vi.r);
    if (con.kind == ConstraintKind::none) return unconstrained;
    Vector x;
    if (active_set(vi, pattern_from_point(con, resolvent_of(con, 1.0, unconstrained)), x)) {
      return x;
    }
    const Vector approx = high_accuracy_solve(vi, x0);
    if (active_set(vi, pattern_from_point(con, approx), x)) return x;
    return approx;
  };
  return p;
}

double regularized_residual(const ProblemInstance& problem, double mu, const Vector& x0,
                            const Vector& y) {
  Vector fy(y.size());
  problem.f.evaluate_into(y, fy);
  const Vector z = y - (fy + mu * (y - x0));
  return (y - problem.c.resolvent(1.0, z)).norm();
}

std::optional<double> solution_distance(const ProblemInstance& problem, const Vector& x0) {
  if (!problem.unique_solution || !problem.known_solution) return std::nullopt;
  return (x0 - *problem.known_solution).norm();
}

}  // namespace rhpe
