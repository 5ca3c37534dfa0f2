#pragma once

#include <functional>
#include <vector>

#include "mqdde/problem.hpp"

namespace mqdde {

/// Explicit retarded DDE y'(x) = f(x, y(x), y(arg(x, y(x)))) on [a, b].
struct RetardedDDE {
  double a = 0.0;
  double b = 1.0;
  std::function<double(double x, double y)> delayed_argument;
  std::function<double(double x, double y, double y_delayed)> rhs;
  History history;
};

RetardedDDE as_retarded(const LinearDDE& problem);

/// Piecewise cubic Hermite solution on a step grid, history below a.
class DenseSolution {
 public:
  struct Step {
    double x0, x1;
    double y0, y1;
    double f0, f1;
  };

  DenseSolution(double a, History history) : a_(a), history_(std::move(history)) {}

  /// y or y' at x; x <= a reads the history.
  double eval(double x, int order = 0) const;
  /// Hermite cubic of step i, evaluated (possibly slightly outside) at x.
  double eval_step(std::size_t index, double x, int order = 0) const;
  /// Index of the step containing x.
  std::size_t step_index(double x) const;

  const std::vector<Step>& steps() const { return steps_; }
  void push(const Step& step) { steps_.push_back(step); }
  double front() const { return steps_.empty() ? a_ : steps_.back().x1; }

 private:
  double a_;
  History history_;
  std::vector<Step> steps_;
};

/// Classical fixed-step RK4 by the method of steps. The grid has steps of at
/// most `h` and hits a, b and every breakpoint. Delayed values come from the
/// history, from finished steps, or (vanishing delays) from a fixed-point
/// iteration on the current step. Throws domain_error if that iteration does
/// not settle within 25 sweeps or if an argument lies ahead of the step.
DenseSolution steps_rk4(const RetardedDDE& problem, double h, const std::vector<double>& breakpoints = {});

}  // namespace mqdde
