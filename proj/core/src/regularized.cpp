#include "rhpe/regularized.hpp"

#include "rhpe/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace rhpe {

namespace {

constexpr double kDivergenceFactor = 1e12;

double log_plus(double x) { return x > 1.0 ? std::log(x) : 0.0; }

// HPE loop on B + μ(· − x0) started at x0, with the stopping test
// ‖v‖ ≤ res_tol, ε ≤ eps_tol (v = b when μ = 0).
Termination run_inner_loop(const ProblemInstance& problem, InnerEngine& engine, const Vector& x0,
                           double mu, double res_tol, double eps_tol, long max_inner, int round,
                           const SolveOptions& opts, SolveReport& report) {
  const bool want_record = opts.keep_trace || static_cast<bool>(opts.observer);
  const double guard = kDivergenceFactor * (1.0 + x0.norm());
  const double sigma = engine.sigma();

  Vector x = x0;
  Vector x_next(x0.size());
  StepResult& step = report.final_step;
  StepWorkspace ws;
  IterationRecord rec;
  double gamma = 1.0;

  for (long k = 1;; ++k) {
    if (k > max_inner) return Termination::inner_cap;
    engine.step(problem, mu, x0, x, step, ws);
    ++report.inner_iterations;

    const HpeCertificate& cert = step.cert;
    const double v_norm = cert.v.norm();
    const bool stop = v_norm <= res_tol && cert.eps <= eps_tol;
    x_next = x - cert.lambda * cert.v;

    if (want_record) {
      const double theta_k = mu > 0.0 ? theta(cert.lambda, mu, sigma) : 0.0;
      gamma *= std::sqrt(1.0 - theta_k);
      rec.k = report.inner_iterations;
      rec.round = round;
      rec.x_prev = x;
      rec.x_next = x_next;
      rec.y = cert.y;
      rec.lambda = cert.lambda;
      rec.mu = mu;
      rec.v_norm = v_norm;
      rec.b_norm = cert.b.norm();
      rec.eps = cert.eps;
      rec.lhs = step.check.lhs;
      rec.rhs = step.check.rhs;
      rec.y_dist_x0 = (cert.y - x0).norm();
      rec.theta_k = theta_k;
      rec.gamma_k = gamma;
      if (opts.observer) opts.observer(rec);
      if (opts.keep_trace) report.trace.push_back(rec);
    }

    if (stop) return Termination::converged;
    x.swap(x_next);
    if (!(x.norm() <= guard)) return Termination::numeric_failure;
  }
}

void check_engine(const SolverConfig& cfg, const InnerEngine& engine) {
  if (engine.sigma() != cfg.sigma) {
    throw Error(Errc::invalid_config, "engine sigma differs from solver sigma");
  }
}

}  // namespace

const char* to_string(Termination t) noexcept {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::inner_cap: return "inner_cap";
    case Termination::outer_cap: return "outer_cap";
    case Termination::numeric_failure: return "numeric_failure";
  }
  return "numeric_failure";
}

void SolverConfig::validate() const {
  if (!(sigma >= 0.0 && sigma < 1.0)) throw Error(Errc::invalid_config, "sigma must lie in [0, 1)");
  if (!(rho_bar > 0.0) || !std::isfinite(rho_bar)) {
    throw Error(Errc::invalid_config, "rho_bar must be positive");
  }
  if (!(eps_bar > 0.0) || !std::isfinite(eps_bar)) {
    throw Error(Errc::invalid_config, "eps_bar must be positive");
  }
  const double r = rho_value();
  if (!(r > 0.0 && r < rho_bar)) throw Error(Errc::invalid_config, "rho must lie in (0, rho_bar)");
  if (lambda_bar && !(*lambda_bar > 0.0)) {
    throw Error(Errc::invalid_config, "lambda_bar must be positive");
  }
  if (max_inner < 1 || max_outer < 1) throw Error(Errc::invalid_config, "caps must be >= 1");
}

double mu_of(double d0_guess, double rho, double rho_bar, double sigma) {
  if (!(rho > 0.0 && rho < rho_bar)) throw Error(Errc::invalid_config, "need 0 < rho < rho_bar");
  if (!(sigma >= 0.0 && sigma < 1.0)) throw Error(Errc::invalid_config, "sigma must lie in [0, 1)");
  if (!(d0_guess > 0.0)) throw Error(Errc::invalid_config, "D0 must be positive");
  return (rho_bar - rho) / ((1.0 + 1.0 / std::sqrt(1.0 - sigma * sigma)) * d0_guess);
}

double d0_bar(double lambda_bar, double rho, double rho_bar, double sigma) {
  if (!(rho > 0.0 && rho < rho_bar)) throw Error(Errc::invalid_config, "need 0 < rho < rho_bar");
  if (!(sigma >= 0.0 && sigma < 1.0)) throw Error(Errc::invalid_config, "sigma must lie in [0, 1)");
  if (!(lambda_bar > 0.0)) throw Error(Errc::invalid_config, "lambda_bar must be positive");
  const double s2 = 1.0 - sigma * sigma;
  return 2.0 * lambda_bar * (rho_bar - rho) / (s2 * (1.0 + 1.0 / std::sqrt(s2)));
}

double static_iteration_bound(double lambda_min, double mu, double sigma, double d, double rho,
                              double eps) {
  if (!(lambda_min > 0.0 && mu > 0.0 && rho > 0.0 && eps > 0.0 && d >= 0.0)) {
    throw Error(Errc::invalid_input, "static bound needs positive lambda, mu, rho, eps and d >= 0");
  }
  if (!(sigma >= 0.0 && sigma < 1.0)) throw Error(Errc::invalid_input, "sigma must lie in [0, 1)");
  const double s2 = 1.0 - sigma * sigma;
  const double inv_theta = 1.0 / (2.0 * lambda_min * mu) + 1.0 / s2;
  const double d2 = d * d;
  const double residual_term =
      log_plus((1.0 + sigma) / (1.0 - sigma) * d2 / (lambda_min * lambda_min * rho * rho));
  const double eps_term = log_plus(sigma * sigma * d2 / (2.0 * s2 * lambda_min * eps));
  return inv_theta * (2.0 + std::max(residual_term, eps_term));
}

int outer_round_bound(double d0, double d0_bar_value) {
  if (!(d0 >= 0.0) || !(d0_bar_value > 0.0)) {
    throw Error(Errc::invalid_input, "outer bound needs d0 >= 0 and D0_bar > 0");
  }
  const double ratio = d0 / d0_bar_value;
  return 1 + (ratio > 1.0 ? static_cast<int>(std::ceil(std::log2(ratio))) : 0);
}

SolveReport static_solve(const ProblemInstance& problem, const RegularizationState& reg,
                         const SolverConfig& cfg, InnerEngine engine, const SolveOptions& opts) {
  cfg.validate();
  check_engine(cfg, engine);
  if (!(reg.mu > 0.0) || !std::isfinite(reg.mu)) {
    throw Error(Errc::degenerate_regularization, "static solve needs mu > 0");
  }
  require_dim(reg.x0, problem.dim(), "x0");
  require_finite(reg.x0, "x0");

  SolveReport report;
  report.outer_iterations = 1;
  report.mu_final = reg.mu;
  report.d0_guess_final = reg.d0_guess;
  report.termination = run_inner_loop(problem, engine, reg.x0, reg.mu, cfg.rho_value(),
                                      cfg.eps_bar, cfg.max_inner, 1, opts, report);
  report.lambda_min = engine.lambda();
  report.predicted_bound =
      reg.d0_guess > 0.0
          ? static_iteration_bound(engine.lambda(), reg.mu, cfg.sigma, reg.d0_guess,
                                   cfg.rho_value(), cfg.eps_bar)
          : std::numeric_limits<double>::quiet_NaN();
  return report;
}

SolveReport dr_hpe_solve(const ProblemInstance& problem, const Vector& x0,
                         const SolverConfig& cfg, InnerEngine engine, const SolveOptions& opts) {
  cfg.validate();
  check_engine(cfg, engine);
  require_dim(x0, problem.dim(), "x0");
  require_finite(x0, "x0");

  const double rho = cfg.rho_value();
  const double lambda_bar = cfg.lambda_bar.value_or(engine.nominal_lambda());
  double d0_guess = d0_bar(lambda_bar, rho, cfg.rho_bar, cfg.sigma);

  SolveReport report;
  for (int round = 1; round <= cfg.max_outer; ++round) {
    const double mu = mu_of(d0_guess, rho, cfg.rho_bar, cfg.sigma);
    report.outer_iterations = round;
    report.mu_final = mu;
    report.d0_guess_final = d0_guess;
    report.termination = run_inner_loop(problem, engine, x0, mu, rho, cfg.eps_bar, cfg.max_inner,
                                        round, opts, report);
    report.lambda_min = engine.lambda();
    report.predicted_bound =
        static_iteration_bound(engine.lambda(), mu, cfg.sigma, d0_guess, rho, cfg.eps_bar);
    if (report.termination != Termination::converged) return report;
    if (mu * (report.final_step.cert.y - x0).norm() <= cfg.rho_bar - rho) return report;
    d0_guess *= 2.0;
  }
  report.termination = Termination::outer_cap;
  return report;
}

SolveReport unregularized_hpe_solve(const ProblemInstance& problem, const Vector& x0,
                                    const SolverConfig& cfg, InnerEngine engine,
                                    const SolveOptions& opts) {
  cfg.validate();
  check_engine(cfg, engine);
  require_dim(x0, problem.dim(), "x0");
  require_finite(x0, "x0");

  SolveReport report;
  report.outer_iterations = 1;
  report.mu_final = 0.0;
  report.termination = run_inner_loop(problem, engine, x0, 0.0, cfg.rho_bar, cfg.eps_bar,
                                      cfg.max_inner, 1, opts, report);
  report.lambda_min = engine.lambda();
  report.predicted_bound = std::numeric_limits<double>::infinity();
  return report;
}

DistancePair d_mu_gap_check(const ProblemInstance& problem, const Vector& x0, double mu) {
  if (!(mu > 0.0)) throw Error(Errc::invalid_input, "mu must be positive");
  if (!problem.solution_oracle) {
    throw Error(Errc::unsupported_problem, problem.name + " has no regularized-solution oracle");
  }
  const auto d0 = solution_distance(problem, x0);
  if (!d0) throw Error(Errc::unsupported_problem, problem.name + " has no unique known solution");
  const Vector x_mu = problem.solution_oracle(mu, x0);
  DistancePair out{(x_mu - x0).norm(), *d0};
  if (out.d_mu > out.d0 + 1e-8) {
    throw Error(Errc::numeric_failure, "d_mu = " + std::to_string(out.d_mu) + " exceeds d0 = " +
                                           std::to_string(out.d0));
  }
  return out;
}

}  // namespace rhpe
