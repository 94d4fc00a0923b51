#pragma once

#include "rhpe/inner.hpp"
#include "rhpe/instance.hpp"
#include "rhpe/regularized.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rhpe {

enum class Method { baseline, static_reg, dr_hpe };

const char* to_string(Method m) noexcept;
Method parse_method(std::string_view name);

enum class StartChoice { instance_default, solution, zero };

StartChoice parse_start(std::string_view name);

struct RunSpec {
  std::string problem = "skew";  // generator name or path to a .json file
  Method method = Method::dr_hpe;
  EngineKind engine = EngineKind::tseng;
  std::vector<double> rho_bars{1e-2, 1e-3, 1e-4};
  double eps_bar = 1e-4;
  double sigma = 0.9;
  double rho_frac = 0.5;
  std::uint64_t seed = 0;
  Index dim = 10;
  StartChoice start = StartChoice::instance_default;
  /// D0 for the static method; defaults to the oracle d0 when known, else D̄0.
  std::optional<double> d0_guess;
  std::optional<long> max_inner;
  int max_outer = 64;
  bool record_wall_time = true;
  int jobs = 1;

  /// Throws invalid_config: ρ-fraction in (0,1), ρ̄ values positive and distinct, etc.
  void validate() const;
};

inline constexpr std::string_view kSweepCsvHeader =
    "problem,method,engine,rho_bar,eps_bar,sigma,rho,mu_final,d0_oracle,outer_iters,"
    "inner_iters,b_norm,eps_final,terminated,wall_ms";

inline constexpr std::string_view kTraceCsvHeader =
    "k,lambda,lhs,rhs,v_norm,b_norm,eps,y_dist_x0,gamma_k";

struct SweepRow {
  std::string problem;
  std::string method;
  std::string engine;
  double rho_bar = 0.0;
  double eps_bar = 0.0;
  double sigma = 0.0;
  double rho = 0.0;
  double mu_final = 0.0;
  double d0_oracle = 0.0;  // NaN when unknown
  long outer_iters = 0;
  long inner_iters = 0;
  double b_norm = 0.0;
  double eps_final = 0.0;
  std::string terminated;
  double wall_ms = 0.0;

  bool converged() const { return terminated == "converged"; }
};

struct SweepPoint {
  SweepRow row;
  SolveReport report;
  /// Every recorded iteration satisfied the HPE inequality, and a converged
  /// certificate met ‖b‖ ≤ ρ̄ and ε ≤ ε̄.
  bool verified = false;
  long hpe_failures = 0;
};

struct SweepSummary {
  std::vector<SweepPoint> points;  // in the order of RunSpec::rho_bars
  std::optional<double> slope;

  std::vector<SweepRow> rows() const;
  bool all_converged() const;
  bool all_verified() const;
};

/// Resolves the problem reference of a spec (generator name or JSON path).
ProblemInstance resolve_problem(const RunSpec& spec);

/// Runs one solve per ρ̄ (concurrently when jobs > 1). When `trace_last` is
/// set the report of the final sweep point keeps its full trace.
SweepSummary run_sweep(const RunSpec& spec, bool trace_last = false);

/// Least-squares slope of log(inner_iters) against log(1/ρ̄) over converged
/// rows; empty with fewer than three such rows.
std::optional<double> fit_slope(const std::vector<SweepRow>& rows);

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);
std::vector<SweepRow> read_sweep_csv(std::istream& in);
void write_trace_csv(const std::vector<IterationRecord>& trace, std::ostream& out);

/// Independent re-check that reads only serialized rows: every converged row
/// must satisfy b_norm ≤ rho_bar and eps_final ≤ eps_bar. Returns the indices
/// of failing rows.
std::vector<std::size_t> verify_rows(const std::vector<SweepRow>& rows);

enum class Trend { increasing, decreasing, constant, mixed };

const char* to_string(Trend t) noexcept;

struct RatioRow {
  double rho_bar = 0.0;
  long inner_a = 0;
  long inner_b = 0;
  double ratio = 0.0;  // inner_a / inner_b
};

struct RatioTable {
  std::vector<RatioRow> rows;  // sorted by decreasing ρ̄
  /// Direction of the ratio as ρ̄ decreases.
  Trend trend = Trend::constant;
};

/// Per-ρ̄ iteration ratios of two sweeps over the same problem and grid;
/// throws invalid_comparison otherwise.
RatioTable compare(const std::vector<SweepRow>& a, const std::vector<SweepRow>& b);

/// Exit codes of the bench tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitNonConvergence = 3;
inline constexpr int kExitVerification = 4;

/// Writes `out_csv` (and the trace of the final point to `trace_csv` when
/// nonempty) and returns the exit code.
int run_to_files(const RunSpec& spec, const std::string& out_csv, const std::string& trace_csv,
                 bool strict, std::ostream& log);

}  // namespace rhpe
