// bench: tolerance sweeps of the regularized HPE solvers.
//
//   bench run --problem skew-multi --method dr-hpe --rho-bar 1e-2,1e-3,1e-4 --out sweep.csv
//   bench compare --a baseline.csv --b dr.csv
//   bench dump --problem box-vi --dim 6 --seed 3 --out box.json

#include "rhpe/bench.hpp"
#include "rhpe/error.hpp"
#include "rhpe/problem_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

int do_compare(const std::string& path_a, const std::string& path_b) {
  auto load = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw rhpe::Error(rhpe::Errc::io_error, "cannot open " + path);
    return rhpe::read_sweep_csv(in);
  };
  const auto table = rhpe::compare(load(path_a), load(path_b));
  std::cout << "rho_bar,inner_a,inner_b,ratio\n";
  for (const auto& r : table.rows) {
    std::cout << r.rho_bar << ',' << r.inner_a << ',' << r.inner_b << ',' << r.ratio << '\n';
  }
  std::cout << "trend: " << rhpe::to_string(table.trend) << '\n';
  return rhpe::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized HPE benchmark harness"};
  app.require_subcommand(1);

  rhpe::RunSpec spec;
  std::string method = "dr-hpe";
  std::string engine = "tseng";
  std::string start = "default";
  std::string out_csv;
  std::string trace_csv;
  bool strict = false;
  bool no_timing = false;
  long max_inner = 0;
  double d0 = 0.0;

  auto* run = app.add_subcommand("run", "Sweep one method over a list of rho_bar values");
  run->add_option("--problem", spec.problem, "skew | skew-multi | box-vi | l1 | path.json")
      ->capture_default_str();
  run->add_option("--method", method, "baseline | static | dr-hpe")->capture_default_str();
  run->add_option("--engine", engine, "tseng | korpelevich")->capture_default_str();
  run->add_option("--rho-bar", spec.rho_bars, "Residual tolerances")->delimiter(',')
      ->capture_default_str();
  run->add_option("--eps-bar", spec.eps_bar, "Enlargement tolerance")->capture_default_str();
  run->add_option("--sigma", spec.sigma, "Relative error tolerance in (0,1)")->capture_default_str();
  run->add_option("--rho-frac", spec.rho_frac, "rho = rho_frac * rho_bar")->capture_default_str();
  run->add_option("--seed", spec.seed, "Generator seed")->capture_default_str();
  run->add_option("--dim", spec.dim, "Dimension of random families")->capture_default_str();
  run->add_option("--x0", start, "default | solution | zero")->capture_default_str();
  run->add_option("--d0", d0, "D0 for the static method (default: oracle d0, else D0_bar)");
  run->add_option("--max-inner", max_inner, "Inner iteration cap");
  run->add_option("--max-outer", spec.max_outer, "Outer round cap")->capture_default_str();
  run->add_option("--jobs", spec.jobs, "Concurrent sweep points")->capture_default_str();
  run->add_option("--out", out_csv, "Sweep CSV")->required();
  run->add_option("--trace", trace_csv, "Iteration trace of the last sweep point");
  run->add_flag("--strict", strict, "Exit 3 unless every run converged");
  run->add_flag("--no-timing", no_timing, "Write wall_ms = 0 for byte-identical output");

  std::string cmp_a;
  std::string cmp_b;
  auto* cmp = app.add_subcommand("compare", "Per-rho_bar iteration ratios of two sweep CSVs");
  cmp->add_option("--a", cmp_a, "Numerator sweep")->required();
  cmp->add_option("--b", cmp_b, "Denominator sweep")->required();

  std::string dump_out;
  auto* dump = app.add_subcommand("dump", "Write a generated problem as JSON");
  dump->add_option("--problem", spec.problem)->capture_default_str();
  dump->add_option("--dim", spec.dim)->capture_default_str();
  dump->add_option("--seed", spec.seed)->capture_default_str();
  dump->add_option("--out", dump_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return rhpe::kExitInvalidConfig;
  }

  try {
    if (*run) {
      spec.method = rhpe::parse_method(method);
      spec.engine = rhpe::parse_engine(engine);
      spec.start = rhpe::parse_start(start);
      if (run->count("--max-inner") > 0) spec.max_inner = max_inner;
      if (run->count("--d0") > 0) spec.d0_guess = d0;
      spec.record_wall_time = !no_timing;
      return rhpe::run_to_files(spec, out_csv, trace_csv, strict, std::cerr);
    }
    if (*cmp) return do_compare(cmp_a, cmp_b);
    if (*dump) {
      rhpe::save_problem(rhpe::resolve_problem(spec), dump_out);
      return rhpe::kExitOk;
    }
  } catch (const rhpe::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == rhpe::Errc::certificate_violation ? rhpe::kExitVerification
                                                         : rhpe::kExitInvalidConfig;
  }
  return rhpe::kExitInvalidConfig;
}
