#pragma once

#include "rhpe/hpe.hpp"
#include "rhpe/inner.hpp"
#include "rhpe/instance.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace rhpe {

/// Tolerances and caps shared by the three solvers.
///
/// `rho_bar`/`eps_bar` are the targets for the unregularized inclusion:
/// ‖b‖ ≤ ρ̄, ε ≤ ε̄ with b ∈ B^[ε](y). `rho` ∈ (0, ρ̄) is the residual tolerance
/// handed to each regularized solve; it defaults to ρ̄/2. `lambda_bar` is the
/// stepsize scale in D̄0 and defaults to the engine stepsize σ/L.
struct SolverConfig {
  double sigma = 0.5;
  double rho_bar = 1e-4;
  double eps_bar = 1e-4;
  std::optional<double> rho;
  std::optional<double> lambda_bar;
  long max_inner = 1'000'000;
  int max_outer = 64;

  double rho_value() const { return rho.value_or(0.5 * rho_bar); }
  /// Throws invalid_config unless 0 < ρ < ρ̄, 0 ≤ σ < 1, ε̄ > 0, λ̄ > 0 and caps ≥ 1.
  void validate() const;
};

struct RegularizationState {
  double mu = 0.0;
  Vector x0;
  double d0_guess = 0.0;  // current D0
};

enum class Termination { converged, inner_cap, outer_cap, numeric_failure };

const char* to_string(Termination t) noexcept;

struct SolveReport {
  /// Last inner step: final (y, b, ε) plus the engine's C-part data.
  StepResult final_step;
  long inner_iterations = 0;
  int outer_iterations = 0;
  Termination termination = Termination::numeric_failure;
  std::vector<IterationRecord> trace;
  /// Static iteration bound at the final μ, evaluated with d = D0 (infinite
  /// for the unregularized baseline).
  double predicted_bound = 0.0;
  double mu_final = 0.0;
  double d0_guess_final = 0.0;
  /// Smallest stepsize used by the engine.
  double lambda_min = 0.0;

  const HpeCertificate& certificate() const noexcept { return final_step.cert; }
};

struct SolveOptions {
  /// Store every IterationRecord in SolveReport::trace.
  bool keep_trace = false;
  /// Called once per inner iteration with a fully populated record.
  std::function<void(const IterationRecord&)> observer;
};

/// μ(D0, ρ) = (ρ̄ − ρ) / ([1 + 1/√(1−σ²)]·D0).
double mu_of(double d0_guess, double rho, double rho_bar, double sigma);

/// D̄0 = 2λ̄(ρ̄ − ρ) / [(1−σ²)(1 + 1/√(1−σ²))].
double d0_bar(double lambda_bar, double rho, double rho_bar, double sigma);

/// (1/(2λμ) + 1/(1−σ²))·[2 + max{log⁺((1+σ)/(1−σ)·d²/(λ²ρ²)), log⁺(σ²d²/(2(1−σ²)λε))}].
double static_iteration_bound(double lambda_min, double mu, double sigma, double d, double rho,
                              double eps);

/// K = 1 + ⌈log₂⁺(d0/D̄0)⌉: the smallest k with 2^(k−1)·D̄0 ≥ d0.
int outer_round_bound(double d0, double d0_bar_value);

/// Static μ-regularized HPE: iterates on 0 ∈ B(x) + μ(x − x0) from x0 and
/// stops once ‖b + μ(y − x0)‖ ≤ cfg.rho_value() and ε ≤ cfg.eps_bar.
SolveReport static_solve(const ProblemInstance& problem, const RegularizationState& reg,
                         const SolverConfig& cfg, InnerEngine engine,
                         const SolveOptions& opts = {});

/// Dynamic regularized HPE: D0 starts at D̄0 and doubles until a static
/// solve (restarted from x0 each round) ends with μ‖y − x0‖ ≤ ρ̄ − ρ.
SolveReport dr_hpe_solve(const ProblemInstance& problem, const Vector& x0,
                         const SolverConfig& cfg, InnerEngine engine,
                         const SolveOptions& opts = {});

/// Baseline HPE with μ = 0, stopping on ‖b‖ ≤ ρ̄ and ε ≤ ε̄.
SolveReport unregularized_hpe_solve(const ProblemInstance& problem, const Vector& x0,
                                    const SolverConfig& cfg, InnerEngine engine,
                                    const SolveOptions& opts = {});

struct DistancePair {
  double d_mu = 0.0;
  double d0 = 0.0;
};

/// d_μ = ‖x*_μ − x0‖ (oracle) and d0 = dist(x0, B⁻¹(0)); throws
/// unsupported_problem without oracle or solution data and numeric_failure if
/// d_μ > d0 + 1e-8.
DistancePair d_mu_gap_check(const ProblemInstance& problem, const Vector& x0, double mu);

}  // namespace rhpe
