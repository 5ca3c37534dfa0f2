#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mqdde {

/// f(x, order) -> f^(order)(x)
using SolutionFn = std::function<double(double, int)>;
using ScalarFn = std::function<double(double)>;

/// One smooth piece of a history function, valid from `start` up to the start
/// of the next segment.
struct HistorySegment {
  double start = -std::numeric_limits<double>::infinity();
  SolutionFn fn;
};

/// Prescribed solution for x <= a. May be piecewise smooth; jumps are located
/// at segment starts. Queries below the lower bound raise domain_error.
class History {
 public:
  History() = default;
  explicit History(SolutionFn fn, double lower = -std::numeric_limits<double>::infinity(),
                   bool lower_open = false);
  History(std::vector<HistorySegment> segments, double lower, bool lower_open);

  double eval(double x, int order) const;

  /// Index of the segment whose half-open range [start_i, start_{i+1}) holds x.
  std::size_t segment_index(double x) const;
  /// Evaluates segment `index` at x, extending it past its range if needed.
  double eval_segment(std::size_t index, double x, int order) const;

  const std::vector<HistorySegment>& segments() const { return segments_; }
  double lower_bound() const { return lower_; }
  bool lower_open() const { return lower_open_; }
  void check_domain(double x) const;

 private:
  std::vector<HistorySegment> segments_;
  double lower_ = -std::numeric_limits<double>::infinity();
  bool lower_open_ = false;
};

/// What a residual functional sees at a point x: the current approximation
/// and the delayed solution, which switches to the history for arguments
/// <= a + band. The band makes a state-dependent argument that lands on a
/// (to rounding) see the left limit, which matters for neutral terms whose
/// derivative jumps at a.
class StateLookup {
 public:
  StateLookup(double x, double a, const SolutionFn& current, const History& history, double band = 0.0)
      : x_(x), a_(a), band_(band), current_(current), history_(history) {}

  double x() const { return x_; }
  double at(int order) const { return current_(x_, order); }
  double lagged(double arg, int order) const {
    return arg <= a_ + band_ ? history_.eval(arg, order) : current_(arg, order);
  }

 private:
  double x_;
  double a_;
  double band_;
  const SolutionFn& current_;
  const History& history_;
};

/// y'(x) - p(x) y(x) - q(x) y(x - tau(x)) = s(x) on [a, b], y = h for x <= a.
struct LinearDDE {
  double a = 0.0;
  double b = 1.0;
  ScalarFn p;
  ScalarFn q;
  ScalarFn s;
  ScalarFn tau;
  History history;
};

/// Implicit DDE of order m written as G(x, y, delayed y) = 0, where G is the
/// left-hand side minus the right-hand side. Initial conditions
/// y^(k)(a) = h^(k)(a) for k < m.
struct GeneralDDE {
  double a = 0.0;
  double b = 1.0;
  int order = 1;
  std::function<double(const StateLookup&)> residual;
  History history;
};

using DDEProblem = std::variant<LinearDDE, GeneralDDE>;

/// Width of the StateLookup band used throughout: 1e-8 (b - a).
double history_band(const GeneralDDE& problem);

double domain_start(const DDEProblem& problem);
double domain_end(const DDEProblem& problem);
int order_of(const DDEProblem& problem);
const History& history_of(const DDEProblem& problem);
bool is_linear(const DDEProblem& problem);

/// Same equation restricted to [a, b] with a replacement history.
DDEProblem restrict_problem(const DDEProblem& problem, double a, double b, History history);

/// h^(order)(x) for x <= a.
double history_eval(const DDEProblem& problem, double x, int order);

/// Rewrites a linear problem as G = y' - p y - q y(x - tau) - s.
GeneralDDE as_general(const LinearDDE& problem);

// ---------------------------------------------------------------------------
// Benchmark registry

/// Per-case replacements for the default adaptive-refinement parameters.
struct RSAOverrides {
  std::optional<int> n0;
  /// mu = default_mu(n0, mu_numerator).
  std::optional<double> mu_numerator;
  /// Explicit mu; wins over mu_numerator.
  std::optional<double> mu;
  std::optional<int> itmax;
  std::optional<double> cond_cap;
};

struct BenchmarkCase {
  std::string name;
  std::string description;
  std::map<std::string, double> parameters;
  DDEProblem problem;
  SolutionFn exact;
  /// Interior points where the solution is not smooth.
  std::vector<double> breakpoints;
  /// Named parameter presets; "default" is always present.
  std::map<std::string, RSAOverrides> presets;
  /// Starting approximation for nonlinear problems.
  ScalarFn guess;
  /// Abscissae at which pointwise errors are tabulated.
  std::vector<double> sample_points;
};

std::vector<std::string> benchmark_names();

/// Builds a registered case. Unknown names and out-of-range parameters raise
/// invalid_input; the exact solution is checked against the equation before
/// the case is returned.
BenchmarkCase make_benchmark(std::string_view name, const std::map<std::string, double>& parameters = {});

/// Exact solution (or one of its first two derivatives) on [a, b].
double exact_eval(const BenchmarkCase& benchmark, double x, int order = 0);

/// Largest |residual| of the exact solution over `samples` points inside each
/// smooth subinterval. Domain errors propagate.
double exact_residual(const DDEProblem& problem, const SolutionFn& exact,
                      const std::vector<double>& breakpoints, int samples = 50);

enum class Example6Form {
  /// Delayed argument x - exp(1 - y(x)), as printed.
  printed,
  /// y'' = -y'(exp(1 - y(x))) y'(x)^2 exp(1 - y(x))
  state_argument,
  /// y'' = -y'(exp(1 - y'(x))) y'(x)^2 exp(1 - y'(x))
  derivative_argument,
};

GeneralDDE example6_problem(Example6Form form);

}  // namespace mqdde
