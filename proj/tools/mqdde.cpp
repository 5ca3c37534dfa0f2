// mqdde: run the benchmark delay differential equations with the adaptive
// multiquadric collocation solver.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "mqdde/cli.hpp"
#include "mqdde/errors.hpp"

using namespace mqdde;

namespace {

struct Options {
  std::string case_name;
  std::vector<std::string> params;
  RunConfig run;
  bool all = false;
  bool verbose = false;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--param", o.params, "Case parameter as key=value (repeatable), e.g. p=-1");
  cmd->add_option("--preset", o.run.preset, "Named parameter preset of the case")->capture_default_str();
  cmd->add_option("--n0", o.run.tunables.n0, "Initial number of nodes")->check(CLI::Range(2, 100000));
  cmd->add_option("--itmax", o.run.tunables.itmax, "Last refinement iteration")->check(CLI::NonNegativeNumber);
  cmd->add_option("--theta-max", o.run.tunables.theta_max, "Residual target")->check(CLI::PositiveNumber);
  cmd->add_option("--theta-min", o.run.tunables.theta_min, "Residual below which nodes are removed")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--mu", o.run.tunables.mu, "Shape scale, used as given")->check(CLI::PositiveNumber);
  cmd->add_option("--gamma", o.run.tunables.gamma, "Alternating shape perturbation");
  cmd->add_option("--lambda", o.run.tunables.lambda, "Shape boost of the boundary centers")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--eta", o.run.tunables.eta, "Refinement threshold divisor")->check(CLI::PositiveNumber);
  cmd->add_option("--nev", o.run.n_ev, "Evaluation points for the RMS error")
      ->capture_default_str()
      ->check(CLI::Range(2, 100000000));
  cmd->add_option("--out", o.run.out_dir, "Directory for the CSV files");
  cmd->add_option("--oracle-h", o.run.oracle_h, "RK4 oracle step")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.run.seed, "Seed reserved for randomized checks");
  cmd->add_flag("-v,--verbose", o.verbose, "Print every refinement iteration as it finishes");
}

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw usage_error("--param expects key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) throw usage_error("--param " + key + ": '" + text + "' is not a number");
    out[key] = value;
  }
  return out;
}

void print_table(const RunResult& result) {
  for (std::size_t p = 0; p < result.reports.size(); ++p) {
    if (result.reports.size() > 1) {
      const auto& [lo, hi] = result.piece_bounds[p];
      std::printf("piece %zu [%.6g, %.6g]\n", p, lo, hi);
    }
    std::printf("%4s %6s %12s %12s %12s %8s\n", "it", "dof", "max|R|", "cond", "rms", "nl");
    for (const auto& r : result.reports[p].records) {
      std::printf("%4d %6d %12.3e %12.3e ", r.iteration, r.dof, r.max_residual, r.condition);
      if (r.rms) std::printf("%12.3e ", *r.rms); else std::printf("%12s ", "-");
      if (r.nl) std::printf("%4d %s\n", r.nl->iterations, to_string(r.nl->status).c_str());
      else std::printf("%8s\n", "-");
    }
    std::printf("status: %s\n", to_string(result.reports[p].status).c_str());
  }
}

void print_summary(const std::string& name, const RunResult& result) {
  if (result.solution) {
    std::printf("%s: dof %d", name.c_str(), result.dof);
    if (result.rms) std::printf(", rms %.3e", *result.rms);
    std::printf(", max error %.3e\n", result.max_error);
    for (const auto& s : result.samples) {
      std::printf("  x = %-10.6g y = %-22.16g |err| = %.2e\n", s.x, s.approx, std::abs(s.approx - s.exact));
    }
  }
  if (result.cross_check) {
    const auto& c = *result.cross_check;
    std::printf("cross-check (h = %g): max |mq - rk4| %.3e, rk4 error %.3e, mq error %.3e\n", c.h,
                c.max_difference, c.oracle_error, c.mq_error);
  }
  if (!result.diagnostic.empty()) std::fprintf(stderr, "%s: %s\n", name.c_str(), result.diagnostic.c_str());
}

int run_one(Options& o, const std::string& name, bool cross) {
  RunConfig cfg = o.run;
  cfg.case_name = name;
  cfg.parameters = parse_params(o.params);
  cfg.cross_check = cross;
  if (o.all && !cfg.out_dir.empty()) cfg.out_dir /= name;
  std::function<void(const RSARecord&)> progress;
  if (o.verbose) {
    progress = [&name](const RSARecord& r) {
      std::fprintf(stderr, "[%s] it %d dof %d max|R| %.3e cond %.3e\n", name.c_str(), r.iteration, r.dof,
                   r.max_residual, r.condition);
    };
  }
  const RunResult result = run_benchmark(cfg, progress);
  print_table(result);
  print_summary(name, result);
  return result.exit_code;
}

// 1 (error) outranks 2 (not converged) outranks 0.
int worst(int a, int b) {
  auto rank = [](int c) { return c == exit_error ? 2 : (c == exit_not_converged ? 1 : 0); };
  return rank(b) > rank(a) ? b : a;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive multiquadric collocation for delay differential equations"};
  app.set_config("--config", "", "INI or TOML file with option values; command-line flags win");
  app.require_subcommand(1);

  Options run_opts;
  auto* run = app.add_subcommand("run", "Solve a benchmark case and write CSV tables");
  run->add_option("case", run_opts.case_name, "Case name (see list)");
  run->add_flag("--all", run_opts.all, "Run every case, each into its own subdirectory of --out");
  add_common(run, run_opts);

  Options check_opts;
  auto* check = app.add_subcommand("cross-check", "Solve a case and compare with the RK4 oracle");
  check->add_option("case", check_opts.case_name, "Case name (example1, example2 or example3)")->required();
  add_common(check, check_opts);

  auto* list = app.add_subcommand("list", "List the registered cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_usage;
  }

  try {
    if (list->parsed()) {
      for (const auto& name : benchmark_names()) {
        const BenchmarkCase c = make_benchmark(name);
        std::printf("%-9s %s\n", name.c_str(), c.description.c_str());
        if (!c.parameters.empty()) {
          std::printf("          parameters:");
          for (const auto& [k, v] : c.parameters) std::printf(" %s=%g", k.c_str(), v);
          std::printf("\n");
        }
        std::printf("          presets:");
        for (const auto& [k, v] : c.presets) std::printf(" %s", k.c_str());
        std::printf("\n");
      }
      return exit_converged;
    }
    if (run->parsed()) {
      if (run_opts.all == !run_opts.case_name.empty()) {
        throw usage_error("run needs exactly one of a case name or --all");
      }
      if (!run_opts.all) return run_one(run_opts, run_opts.case_name, false);
      if (!run_opts.params.empty()) throw usage_error("--param cannot be combined with --all");
      int code = exit_converged;
      for (const auto& name : benchmark_names()) code = worst(code, run_one(run_opts, name, false));
      return code;
    }
    if (!oracle_supports(check_opts.case_name)) {
      RunConfig refused;
      refused.case_name = check_opts.case_name;
      cross_check(refused);  // throws the refusal before solving anything
    }
    return run_one(check_opts, check_opts.case_name, true);
  } catch (const usage_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_usage;
  } catch (const invalid_input& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_usage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_error;
  }
}
