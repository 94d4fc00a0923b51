#include "rhpe/bench.hpp"

#include "rhpe/error.hpp"
#include "rhpe/problem_io.hpp"
#include "rhpe/problems.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace rhpe {

const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::baseline: return "baseline";
    case Method::static_reg: return "static";
    case Method::dr_hpe: return "dr-hpe";
  }
  return "dr-hpe";
}

Method parse_method(std::string_view name) {
  if (name == "baseline") return Method::baseline;
  if (name == "static") return Method::static_reg;
  if (name == "dr-hpe") return Method::dr_hpe;
  throw Error(Errc::invalid_config, "unknown method '" + std::string(name) + "'");
}

StartChoice parse_start(std::string_view name) {
  if (name == "default") return StartChoice::instance_default;
  if (name == "solution") return StartChoice::solution;
  if (name == "zero") return StartChoice::zero;
  throw Error(Errc::invalid_config, "unknown start '" + std::string(name) + "'");
}

const char* to_string(Trend t) noexcept {
  switch (t) {
    case Trend::increasing: return "increasing";
    case Trend::decreasing: return "decreasing";
    case Trend::constant: return "constant";
    case Trend::mixed: return "mixed";
  }
  return "mixed";
}

void RunSpec::validate() const {
  if (rho_bars.empty()) throw Error(Errc::invalid_config, "empty rho_bar grid");
  std::set<double> seen;
  for (double r : rho_bars) {
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(Errc::invalid_config, "rho_bar must be positive");
    if (!seen.insert(r).second) throw Error(Errc::invalid_config, "duplicate rho_bar in grid");
  }
  if (!(eps_bar > 0.0) || !std::isfinite(eps_bar)) throw Error(Errc::invalid_config, "eps_bar must be positive");
  if (!(sigma > 0.0 && sigma < 1.0)) throw Error(Errc::invalid_config, "sigma must lie in (0, 1)");
  if (!(rho_frac > 0.0 && rho_frac < 1.0)) throw Error(Errc::invalid_config, "rho fraction must lie in (0, 1)");
  if (d0_guess && !(*d0_guess > 0.0)) throw Error(Errc::invalid_config, "D0 must be positive");
  if (max_inner && *max_inner < 1) throw Error(Errc::invalid_config, "max_inner must be >= 1");
  if (max_outer < 1) throw Error(Errc::invalid_config, "max_outer must be >= 1");
  if (jobs < 1) throw Error(Errc::invalid_config, "jobs must be >= 1");
  if (dim < 1) throw Error(Errc::invalid_config, "dim must be >= 1");
}

ProblemInstance resolve_problem(const RunSpec& spec) {
  const auto& ref = spec.problem;
  if (ref.size() > 5 && ref.compare(ref.size() - 5, 5, ".json") == 0) return load_problem(ref);
  return named_problem(ref, spec.dim, spec.seed);
}

namespace {

Vector start_point(const ProblemInstance& p, StartChoice choice) {
  switch (choice) {
    case StartChoice::instance_default:
      return p.start ? *p.start : Vector::Zero(p.dim());
    case StartChoice::zero:
      return Vector::Zero(p.dim());
    case StartChoice::solution:
      if (!p.known_solution) {
        throw Error(Errc::invalid_config, p.name + " has no known solution to start from");
      }
      return *p.known_solution;
  }
  return Vector::Zero(p.dim());
}

// Re-derives the HPE inequality from the record's points: λv = x_prev − x_next.
bool record_holds(const IterationRecord& r, double sigma) {
  const double lhs = (r.y - r.x_next).squaredNorm() + 2.0 * r.lambda * r.eps;
  const double rhs = sigma * sigma * (r.y - r.x_prev).squaredNorm();
  return within_slack(lhs, rhs);
}

SweepPoint solve_point(const RunSpec& spec, const ProblemInstance& problem, const Vector& x0,
                       std::optional<double> d0_oracle, double rho_bar, bool keep_trace) {
  SolverConfig cfg;
  cfg.sigma = spec.sigma;
  cfg.rho_bar = rho_bar;
  cfg.eps_bar = spec.eps_bar;
  cfg.rho = spec.rho_frac * rho_bar;
  cfg.max_outer = spec.max_outer;

  InnerEngine engine = InnerEngine::make(spec.engine, problem, spec.sigma);

  double mu_static = 0.0;
  double d0_static = 0.0;
  if (spec.method == Method::static_reg) {
    d0_static = spec.d0_guess.value_or(
        d0_oracle ? *d0_oracle : d0_bar(engine.nominal_lambda(), *cfg.rho, rho_bar, spec.sigma));
    if (!(d0_static > 0.0)) {
      // x0 already solves the problem; any positive D0 gives a valid μ.
      d0_static = d0_bar(engine.nominal_lambda(), *cfg.rho, rho_bar, spec.sigma);
    }
    mu_static = mu_of(d0_static, *cfg.rho, rho_bar, spec.sigma);
  }

  if (spec.max_inner) {
    cfg.max_inner = *spec.max_inner;
  } else if (spec.method == Method::static_reg && problem.solution_oracle) {
    // Ten times the static bound at the oracle distance d_μ.
    const double d_mu = (problem.solution_oracle(mu_static, x0) - x0).norm();
    const double bound = static_iteration_bound(engine.nominal_lambda(), mu_static, spec.sigma,
                                                d_mu, *cfg.rho, spec.eps_bar);
    if (std::isfinite(bound) && bound < 1e15) cfg.max_inner = 10 * static_cast<long>(std::ceil(bound));
  }
  cfg.validate();

  SweepPoint pt;
  SolveOptions opts;
  opts.keep_trace = keep_trace;
  opts.observer = [&pt, sigma = spec.sigma](const IterationRecord& r) {
    if (!record_holds(r, sigma)) ++pt.hpe_failures;
  };

  const auto t0 = std::chrono::steady_clock::now();
  bool failed = false;
  try {
    switch (spec.method) {
      case Method::baseline:
        pt.report = unregularized_hpe_solve(problem, x0, cfg, std::move(engine), opts);
        break;
      case Method::static_reg:
        pt.report = static_solve(problem, RegularizationState{mu_static, x0, d0_static}, cfg,
                                 std::move(engine), opts);
        break;
      case Method::dr_hpe:
        pt.report = dr_hpe_solve(problem, x0, cfg, std::move(engine), opts);
        break;
    }
  } catch (const Error& e) {
    if (e.code() != Errc::certificate_violation && e.code() != Errc::broken_convexity) throw;
    failed = true;
    pt.report.termination = Termination::numeric_failure;
  }
  const auto t1 = std::chrono::steady_clock::now();

  const SolveReport& rep = pt.report;
  SweepRow& row = pt.row;
  row.problem = problem.name;
  row.method = to_string(spec.method);
  row.engine = to_string(spec.engine);
  row.rho_bar = rho_bar;
  row.eps_bar = spec.eps_bar;
  row.sigma = spec.sigma;
  row.rho = *cfg.rho;
  row.mu_final = rep.mu_final;
  row.d0_oracle = d0_oracle.value_or(std::numeric_limits<double>::quiet_NaN());
  row.outer_iters = rep.outer_iterations;
  row.inner_iters = rep.inner_iterations;
  row.b_norm = rep.final_step.cert.b.size() > 0 ? rep.final_step.cert.b.norm()
                                                : std::numeric_limits<double>::quiet_NaN();
  row.eps_final = rep.final_step.cert.b.size() > 0 ? rep.final_step.cert.eps
                                                   : std::numeric_limits<double>::quiet_NaN();
  row.terminated = to_string(rep.termination);
  row.wall_ms = spec.record_wall_time
                    ? std::chrono::duration<double, std::milli>(t1 - t0).count()
                    : 0.0;

  pt.verified = !failed && pt.hpe_failures == 0;
  if (pt.verified && rep.termination == Termination::converged) {
    pt.verified = row.b_norm <= rho_bar && row.eps_final <= spec.eps_bar;
  }
  return pt;
}

void put_number(std::ostream& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

double parse_double(std::string_view s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(Errc::invalid_input, "bad number '" + std::string(s) + "' in sweep CSV");
  }
  return v;
}

long parse_long(std::string_view s) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(Errc::invalid_input, "bad integer '" + std::string(s) + "' in sweep CSV");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::vector<SweepRow> SweepSummary::rows() const {
  std::vector<SweepRow> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.row);
  return out;
}

bool SweepSummary::all_converged() const {
  return std::all_of(points.begin(), points.end(), [](const SweepPoint& p) { return p.row.converged(); });
}

bool SweepSummary::all_verified() const {
  return std::all_of(points.begin(), points.end(), [](const SweepPoint& p) { return p.verified; });
}

SweepSummary run_sweep(const RunSpec& spec, bool trace_last) {
  spec.validate();
  const ProblemInstance problem = resolve_problem(spec);
  if (spec.engine == EngineKind::korpelevich && !problem.c.has_value_function()) {
    throw Error(Errc::invalid_config, "korpelevich needs C = ∂g with g evaluable");
  }
  const Vector x0 = start_point(problem, spec.start);
  const std::optional<double> d0_oracle = solution_distance(problem, x0);

  SweepSummary summary;
  const std::size_t n = spec.rho_bars.size();
  summary.points.resize(n);
  auto task = [&](std::size_t i) {
    return solve_point(spec, problem, x0, d0_oracle, spec.rho_bars[i], trace_last && i + 1 == n);
  };
  if (spec.jobs <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) summary.points[i] = task(i);
  } else {
    std::size_t next = 0;
    while (next < n) {
      std::vector<std::future<SweepPoint>> batch;
      const std::size_t end = std::min(n, next + static_cast<std::size_t>(spec.jobs));
      for (std::size_t i = next; i < end; ++i) batch.push_back(std::async(std::launch::async, task, i));
      for (std::size_t i = next; i < end; ++i) summary.points[i] = batch[i - next].get();
      next = end;
    }
  }
  summary.slope = fit_slope(summary.rows());
  return summary;
}

std::optional<double> fit_slope(const std::vector<SweepRow>& rows) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& r : rows) {
    if (!r.converged() || r.inner_iters < 1) continue;
    xs.push_back(std::log(1.0 / r.rho_bar));
    ys.push_back(std::log(static_cast<double>(r.inner_iters)));
  }
  if (xs.size() < 3) return std::nullopt;
  const double m = static_cast<double>(xs.size());
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / m;
  const double my = sy / m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) return std::nullopt;
  return sxy / sxx;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.problem << ',' << r.method << ',' << r.engine << ',';
    put_number(out, r.rho_bar);
    out << ',';
    put_number(out, r.eps_bar);
    out << ',';
    put_number(out, r.sigma);
    out << ',';
    put_number(out, r.rho);
    out << ',';
    put_number(out, r.mu_final);
    out << ',';
    put_number(out, r.d0_oracle);
    out << ',' << r.outer_iters << ',' << r.inner_iters << ',';
    put_number(out, r.b_norm);
    out << ',';
    put_number(out, r.eps_final);
    out << ',' << r.terminated << ',';
    put_number(out, r.wall_ms);
    out << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSweepCsvHeader) {
    throw Error(Errc::invalid_input, "sweep CSV header mismatch");
  }
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 15) throw Error(Errc::invalid_input, "sweep CSV row needs 15 fields");
    SweepRow r;
    r.problem = std::string(f[0]);
    r.method = std::string(f[1]);
    r.engine = std::string(f[2]);
    r.rho_bar = parse_double(f[3]);
    r.eps_bar = parse_double(f[4]);
    r.sigma = parse_double(f[5]);
    r.rho = parse_double(f[6]);
    r.mu_final = parse_double(f[7]);
    r.d0_oracle = parse_double(f[8]);
    r.outer_iters = parse_long(f[9]);
    r.inner_iters = parse_long(f[10]);
    r.b_norm = parse_double(f[11]);
    r.eps_final = parse_double(f[12]);
    r.terminated = std::string(f[13]);
    r.wall_ms = parse_double(f[14]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_trace_csv(const std::vector<IterationRecord>& trace, std::ostream& out) {
  out << kTraceCsvHeader << '\n';
  for (const auto& r : trace) {
    out << r.k << ',';
    for (double v : {r.lambda, r.lhs, r.rhs, r.v_norm, r.b_norm, r.eps, r.y_dist_x0}) {
      put_number(out, v);
      out << ',';
    }
    put_number(out, r.gamma_k);
    out << '\n';
  }
}

std::vector<std::size_t> verify_rows(const std::vector<SweepRow>& rows) {
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (!r.converged()) continue;
    if (!(r.b_norm <= r.rho_bar && r.eps_final <= r.eps_bar && r.eps_final >= 0.0)) bad.push_back(i);
  }
  return bad;
}

RatioTable compare(const std::vector<SweepRow>& a, const std::vector<SweepRow>& b) {
  if (a.empty() || b.empty()) throw Error(Errc::invalid_comparison, "empty sweep");
  if (a.size() != b.size()) throw Error(Errc::invalid_comparison, "sweeps have different grids");
  auto sorted = [](std::vector<SweepRow> v) {
    std::sort(v.begin(), v.end(), [](const SweepRow& x, const SweepRow& y) { return x.rho_bar > y.rho_bar; });
    return v;
  };
  const auto sa = sorted(a);
  const auto sb = sorted(b);
  RatioTable table;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    if (sa[i].problem != sb[i].problem || sa[i].problem != sa[0].problem) {
      throw Error(Errc::invalid_comparison, "sweeps cover different problems");
    }
    if (sa[i].rho_bar != sb[i].rho_bar) throw Error(Errc::invalid_comparison, "sweeps have different grids");
    if (sb[i].inner_iters < 1) throw Error(Errc::invalid_comparison, "zero iteration count in second sweep");
    table.rows.push_back(RatioRow{sa[i].rho_bar, sa[i].inner_iters, sb[i].inner_iters,
                                  static_cast<double>(sa[i].inner_iters) /
                                      static_cast<double>(sb[i].inner_iters)});
  }
  bool up = true;
  bool down = true;
  bool flat = true;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const double prev = table.rows[i - 1].ratio;
    const double cur = table.rows[i].ratio;
    up = up && cur > prev;
    down = down && cur < prev;
    flat = flat && cur == prev;
  }
  if (table.rows.size() < 2 || flat) {
    table.trend = Trend::constant;
  } else if (up) {
    table.trend = Trend::increasing;
  } else if (down) {
    table.trend = Trend::decreasing;
  } else {
    table.trend = Trend::mixed;
  }
  return table;
}

int run_to_files(const RunSpec& spec, const std::string& out_csv, const std::string& trace_csv,
                 bool strict, std::ostream& log) {
  SweepSummary summary;
  try {
    summary = run_sweep(spec, !trace_csv.empty());
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }

  const auto rows = summary.rows();
  {
    std::ofstream out(out_csv);
    if (!out) {
      log << "error: cannot write " << out_csv << '\n';
      return kExitInvalidConfig;
    }
    write_sweep_csv(rows, out);
  }
  if (!trace_csv.empty()) {
    std::ofstream out(trace_csv);
    if (!out) {
      log << "error: cannot write " << trace_csv << '\n';
      return kExitInvalidConfig;
    }
    write_trace_csv(summary.points.back().report.trace, out);
  }

  // Second, file-based pass over what was actually written.
  std::vector<SweepRow> reread;
  {
    std::ifstream in(out_csv);
    reread = read_sweep_csv(in);
  }
  const auto bad_rows = verify_rows(reread);

  for (const auto& p : summary.points) {
    log << p.row.method << " rho_bar=" << p.row.rho_bar << " inner=" << p.row.inner_iters
        << " outer=" << p.row.outer_iters << " " << p.row.terminated;
    if (p.hpe_failures > 0) log << " hpe_failures=" << p.hpe_failures;
    log << '\n';
  }
  if (summary.slope) log << "slope log(inner) vs log(1/rho_bar): " << *summary.slope << '\n';

  if (!bad_rows.empty() || !summary.all_verified()) {
    log << "verification failed\n";
    return kExitVerification;
  }
  if (strict && !summary.all_converged()) {
    log << "not every run converged\n";
    return kExitNonConvergence;
  }
  return kExitOk;
}

}  // namespace rhpe
