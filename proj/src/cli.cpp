#include "mqdde/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "mqdde/errors.hpp"
#include "mqdde/oracle.hpp"

namespace mqdde {

namespace {

BenchmarkCase load_case(const RunConfig& config) {
  const auto names = benchmark_names();
  if (std::find(names.begin(), names.end(), config.case_name) == names.end()) {
    throw usage_error("unknown case '" + config.case_name + "'");
  }
  return make_benchmark(config.case_name, config.parameters);
}

std::ofstream open_csv(const std::filesystem::path& dir, const char* name) {
  std::ofstream out(dir / name);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  return out;
}

std::string optional_real(const std::optional<double>& v) { return v ? format_real(*v) : ""; }

// Best solution seen so far, to be dumped even when refinement aborts.
struct Solved {
  std::vector<RSAReport> reports;
  std::vector<std::pair<double, double>> bounds;
  ScalarFn solution;
  int dof = 0;
};

Solved solve_case(const BenchmarkCase& benchmark, const RSAConfig& rsa,
                  const std::function<void(const RSARecord&)>& progress) {
  RSAInputs inputs;
  inputs.exact = [&benchmark](double x) { return exact_eval(benchmark, x); };
  inputs.guess = benchmark.guess;
  inputs.progress = progress;

  Solved out;
  if (benchmark.breakpoints.empty()) {
    RSAResult res = run_rsa(benchmark.problem, rsa, inputs);
    out.dof = static_cast<int>(res.interpolant.basis().size());
    out.reports.push_back(std::move(res.report));
    out.bounds.emplace_back(domain_start(benchmark.problem), domain_end(benchmark.problem));
    out.solution = [y = std::move(res.interpolant)](double x) { return y.eval(x); };
  } else {
    PiecewiseSolution pw = solve_piecewise(benchmark.problem, benchmark.breakpoints, rsa, inputs);
    out.dof = pw.total_dof();
    for (auto& piece : pw.pieces) {
      out.reports.push_back(piece.report);
      out.bounds.emplace_back(piece.lo, piece.hi);
    }
    out.solution = [pw = std::move(pw)](double x) { return pw.eval(x); };
  }
  return out;
}

// Nonlinear solve that ran out of iterations at the final refinement step.
std::optional<std::string> nonlinear_failure(const std::vector<RSAReport>& reports) {
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (reports[i].records.empty()) continue;
    const auto& last = reports[i].records.back();
    if (last.nl && last.nl->status == NLStatus::max_iters) {
      std::ostringstream msg;
      msg << "nonlinear solver did not converge at the final iteration " << last.iteration;
      if (reports.size() > 1) msg << " of piece " << i;
      msg << " (|F| = " << last.nl->final_norm << " after " << last.nl->iterations << " iterations)";
      return msg.str();
    }
  }
  return std::nullopt;
}

}  // namespace

void RunConfig::validate() const {
  if (n_ev < 2) throw invalid_input("n_ev must be at least 2");
  if (!(oracle_h > 0.0)) throw invalid_input("oracle step must be positive");
}

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", value);
  return buf;
}

double rms_error(const ScalarFn& approx, const ScalarFn& exact, double a, double b, int n_ev) {
  if (n_ev < 2) throw invalid_input("rms_error: n_ev must be at least 2");
  double sum = 0.0;
  for (int i = 0; i < n_ev; ++i) {
    const double z = i == n_ev - 1 ? b : a + (b - a) * i / (n_ev - 1);
    double e;
    try {
      e = approx(z) - exact(z);
    } catch (const std::exception& err) {
      std::ostringstream msg;
      msg << "rms_error: evaluation failed at z = " << format_real(z) << ": " << err.what();
      throw domain_error(msg.str());
    }
    if (!std::isfinite(e)) {
      throw domain_error("rms_error: non-finite error at z = " + format_real(z));
    }
    sum += e * e;
  }
  return std::sqrt(sum / n_ev);
}

RSAConfig resolve_config(const BenchmarkCase& benchmark, const RunConfig& config) {
  auto it = benchmark.presets.find(config.preset);
  if (it == benchmark.presets.end()) {
    throw usage_error("case " + benchmark.name + " has no preset '" + config.preset + "'");
  }
  RSAOverrides overrides = it->second;
  const Tunables& t = config.tunables;
  if (t.n0) overrides.n0 = t.n0;
  if (t.mu) overrides.mu = t.mu;
  if (t.itmax) overrides.itmax = t.itmax;
  RSAConfig rsa = apply_overrides(RSAConfig{}, overrides);
  if (t.theta_max) rsa.theta_max = *t.theta_max;
  if (t.theta_min) rsa.theta_min = *t.theta_min;
  if (t.gamma) rsa.gamma = *t.gamma;
  if (t.lambda) rsa.lambda = *t.lambda;
  if (t.eta) rsa.eta = *t.eta;
  rsa.n_ev = config.n_ev;
  rsa.validate();
  return rsa;
}

void write_iterations_csv(std::ostream& out, const std::vector<RSAReport>& reports) {
  out << "iter,dof,max_residual,cond,rms,nl_iters\n";
  for (const auto& report : reports) {
    for (const auto& r : report.records) {
      out << r.iteration << ',' << r.dof << ',' << format_real(r.max_residual) << ','
          << format_real(r.condition) << ',' << optional_real(r.rms) << ',';
      if (r.nl) out << r.nl->iterations;
      out << '\n';
    }
  }
}

RunResult run_benchmark(const RunConfig& config, const std::function<void(const RSARecord&)>& progress) {
  config.validate();
  const BenchmarkCase benchmark = load_case(config);
  const RSAConfig rsa = resolve_config(benchmark, config);
  const double a = domain_start(benchmark.problem);
  const double b = domain_end(benchmark.problem);
  const ScalarFn exact = [&benchmark](double x) { return exact_eval(benchmark, x); };

  if (!config.out_dir.empty()) std::filesystem::create_directories(config.out_dir);

  RunResult out;
  Solved solved;
  try {
    solved = solve_case(benchmark, rsa, progress);
  } catch (const rsa_error& err) {
    out.exit_code = exit_error;
    out.diagnostic = err.what();
    out.reports.push_back(err.partial());
    if (!config.out_dir.empty()) {
      auto csv = open_csv(config.out_dir, "iterations.csv");
      write_iterations_csv(csv, out.reports);
    }
    return out;
  }

  out.reports = std::move(solved.reports);
  out.piece_bounds = std::move(solved.bounds);
  out.dof = solved.dof;
  out.solution = solved.solution;

  bool converged = true;
  for (const auto& r : out.reports) converged = converged && r.status == RSAStatus::residual_converged;
  out.exit_code = converged ? exit_converged : exit_not_converged;
  if (auto failure = nonlinear_failure(out.reports)) {
    out.exit_code = exit_error;
    out.diagnostic = *failure;
  }

  std::vector<SamplePoint> grid;
  try {
    out.rms = rms_error(out.solution, exact, a, b, config.n_ev);
    for (int i = 0; i < config.n_ev; ++i) {
      const double z = i == config.n_ev - 1 ? b : a + (b - a) * i / (config.n_ev - 1);
      grid.push_back({z, out.solution(z), exact(z)});
      out.max_error = std::max(out.max_error, std::abs(grid.back().approx - grid.back().exact));
    }
    for (double x : benchmark.sample_points) out.samples.push_back({x, out.solution(x), exact(x)});
  } catch (const std::exception& err) {
    out.exit_code = exit_error;
    out.diagnostic = err.what();
  }

  if (config.cross_check) out.cross_check = cross_check(config, out.solution);

  if (!config.out_dir.empty()) {
    auto iters = open_csv(config.out_dir, "iterations.csv");
    write_iterations_csv(iters, out.reports);
    auto errors = open_csv(config.out_dir, "errors.csv");
    errors << "x,y_approx,y_exact,abs_err\n";
    for (const auto& s : out.samples) {
      errors << format_real(s.x) << ',' << format_real(s.approx) << ',' << format_real(s.exact) << ','
             << format_real(std::abs(s.approx - s.exact)) << '\n';
    }
    auto solution = open_csv(config.out_dir, "solution.csv");
    solution << "x,y_approx,y_exact,abs_err\n";
    for (const auto& s : grid) {
      solution << format_real(s.x) << ',' << format_real(s.approx) << ',' << format_real(s.exact) << ','
               << format_real(std::abs(s.approx - s.exact)) << '\n';
    }
  }
  return out;
}

bool oracle_supports(const std::string& case_name) {
  return case_name == "example1" || case_name == "example2" || case_name == "example3";
}

CrossCheckReport cross_check(const RunConfig& config, const ScalarFn& solution) {
  if (!oracle_supports(config.case_name)) {
    throw usage_error("cross-check is not available for " + config.case_name +
                      ": the RK4 oracle handles retarded first-order equations only (example1-example3)");
  }
  config.validate();
  ScalarFn mq = solution;
  if (!mq) {
    RunConfig plain = config;
    plain.cross_check = false;
    plain.out_dir.clear();
    RunResult run = run_benchmark(plain);
    if (!run.solution) throw std::runtime_error("cross-check: solve failed: " + run.diagnostic);
    mq = run.solution;
  }
  const BenchmarkCase benchmark = load_case(config);
  const auto& lin = std::get<LinearDDE>(benchmark.problem);
  const DenseSolution rk = steps_rk4(as_retarded(lin), config.oracle_h, benchmark.breakpoints);

  CrossCheckReport rep;
  rep.h = config.oracle_h;
  for (int i = 0; i < config.n_ev; ++i) {
    const double z = i == config.n_ev - 1 ? lin.b : lin.a + (lin.b - lin.a) * i / (config.n_ev - 1);
    const double y_mq = mq(z);
    const double y_rk = rk.eval(z);
    const double y_ex = exact_eval(benchmark, z);
    rep.max_difference = std::max(rep.max_difference, std::abs(y_mq - y_rk));
    rep.oracle_error = std::max(rep.oracle_error, std::abs(y_rk - y_ex));
    rep.mq_error = std::max(rep.mq_error, std::abs(y_mq - y_ex));
  }
  return rep;
}

}  // namespace mqdde
