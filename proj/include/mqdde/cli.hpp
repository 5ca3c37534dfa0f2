#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mqdde/adapt.hpp"
#include "mqdde/errors.hpp"
#include "mqdde/problem.hpp"

namespace mqdde {

/// Exit codes of the harness and the command-line tool.
enum ExitCode : int { exit_converged = 0, exit_error = 1, exit_not_converged = 2, exit_usage = 64 };

/// Bad command-line or harness input: unknown case, unsupported request.
class usage_error : public invalid_input {
 public:
  using invalid_input::invalid_input;
};

/// User replacements for refinement parameters; unset fields keep the
/// case preset or the library default.
struct Tunables {
  std::optional<int> n0;
  std::optional<int> itmax;
  std::optional<double> theta_max;
  std::optional<double> theta_min;
  std::optional<double> mu;
  std::optional<double> gamma;
  std::optional<double> lambda;
  std::optional<double> eta;
};

struct RunConfig {
  std::string case_name;
  std::map<std::string, double> parameters;
  std::string preset = "default";
  Tunables tunables;
  int n_ev = 103;
  /// Where the CSV files go; nothing is written when empty.
  std::filesystem::path out_dir;
  /// Reserved for randomized checks; the solver itself is deterministic.
  std::uint64_t seed = 0;
  /// Also compare with the RK4 oracle (Examples 1-3 only).
  bool cross_check = false;
  double oracle_h = 1e-3;

  void validate() const;
};

/// sqrt(sum (approx(z_i) - exact(z_i))^2 / n_ev), z_i equispaced on [a, b]
/// with both ends included.
double rms_error(const ScalarFn& approx, const ScalarFn& exact, double a, double b, int n_ev);

/// Refinement settings for a case: library defaults, then the case preset,
/// then the user's tunables. An n0 without mu rescales mu.
RSAConfig resolve_config(const BenchmarkCase& benchmark, const RunConfig& config);

struct SamplePoint {
  double x;
  double approx;
  double exact;
};

struct CrossCheckReport {
  double max_difference = 0.0;   ///< max |MQ - oracle| over the evaluation grid
  double oracle_error = 0.0;     ///< max |oracle - exact| over the same grid
  double mq_error = 0.0;         ///< max |MQ - exact| over the same grid
  double h = 0.0;
};

struct RunResult {
  int exit_code = exit_error;
  /// Empty unless the run failed or a solver reported trouble.
  std::string diagnostic;
  /// One report per smooth piece; a single entry unless the case has breakpoints.
  std::vector<RSAReport> reports;
  std::vector<std::pair<double, double>> piece_bounds;
  int dof = 0;
  std::optional<double> rms;
  double max_error = 0.0;
  std::vector<SamplePoint> samples;
  std::optional<CrossCheckReport> cross_check;
  /// Evaluable solution on [a, b]; empty when the run failed.
  ScalarFn solution;
};

/// Solves a registered case and writes iterations.csv, errors.csv and
/// solution.csv into config.out_dir. Solver failures are reported through
/// exit_code and diagnostic; unknown cases raise usage_error.
/// `progress`, if set, sees every refinement record as it completes.
RunResult run_benchmark(const RunConfig& config,
                        const std::function<void(const RSARecord&)>& progress = {});

/// Cases the oracle can integrate: retarded first-order equations.
bool oracle_supports(const std::string& case_name);

/// Solves the case (as run_benchmark) and integrates it with the RK4 oracle.
/// Unsupported cases raise usage_error.
CrossCheckReport cross_check(const RunConfig& config, const ScalarFn& solution = {});

/// %.16e, which round-trips doubles.
std::string format_real(double value);

void write_iterations_csv(std::ostream& out, const std::vector<RSAReport>& reports);

}  // namespace mqdde
