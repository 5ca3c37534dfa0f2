#include "mqdde/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mqdde/errors.hpp"

namespace mqdde {

namespace {

double hermite(const DenseSolution::Step& s, double x, int order) {
  const double h = s.x1 - s.x0;
  const double t = (x - s.x0) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  if (order == 0) {
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * s.y0 + h10 * h * s.f0 + h01 * s.y1 + h11 * h * s.f1;
  }
  const double d00 = (6 * t2 - 6 * t) / h;
  const double d10 = 3 * t2 - 4 * t + 1;
  const double d01 = (-6 * t2 + 6 * t) / h;
  const double d11 = 3 * t2 - 2 * t;
  return d00 * s.y0 + d10 * s.f0 + d01 * s.y1 + d11 * s.f1;
}

constexpr int kMaxSweeps = 25;

}  // namespace

RetardedDDE as_retarded(const LinearDDE& problem) {
  RetardedDDE r;
  r.a = problem.a;
  r.b = problem.b;
  r.history = problem.history;
  r.delayed_argument = [tau = problem.tau](double x, double) { return x - tau(x); };
  r.rhs = [p = problem.p, q = problem.q, s = problem.s](double x, double y, double yd) {
    return p(x) * y + q(x) * yd + s(x);
  };
  return r;
}

std::size_t DenseSolution::step_index(double x) const {
  if (steps_.empty()) throw invalid_input("DenseSolution: no steps");
  auto it = std::upper_bound(steps_.begin(), steps_.end(), x,
                             [](double v, const Step& s) { return v < s.x1; });
  if (it == steps_.end()) return steps_.size() - 1;
  return static_cast<std::size_t>(std::distance(steps_.begin(), it));
}

double DenseSolution::eval_step(std::size_t index, double x, int order) const {
  if (order < 0 || order > 1) throw invalid_input("DenseSolution: only orders 0 and 1 are available");
  return hermite(steps_.at(index), x, order);
}

double DenseSolution::eval(double x, int order) const {
  if (x <= a_) return history_.eval(x, order);
  return eval_step(step_index(x), x, order);
}

DenseSolution steps_rk4(const RetardedDDE& problem, double h, const std::vector<double>& breakpoints) {
  if (!(h > 0.0)) throw invalid_input("steps_rk4: step must be positive");
  const double a = problem.a;
  std::vector<double> edges{a};
  for (double x : breakpoints) {
    if (!(x > edges.back() && x < problem.b)) {
      throw invalid_input("steps_rk4: breakpoints must be strictly increasing inside (a, b)");
    }
    edges.push_back(x);
  }
  edges.push_back(problem.b);

  DenseSolution sol(a, problem.history);
  const History& hist = problem.history;
  double y = hist.eval(a, 0);

  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double lo = edges[e];
    const double hi = edges[e + 1];
    const auto n = static_cast<long>(std::ceil((hi - lo) / h - 1e-9));
    const double hs = (hi - lo) / static_cast<double>(n);

    for (long i = 0; i < n; ++i) {
      const double x0 = lo + hs * static_cast<double>(i);
      const double x1 = i + 1 == n ? hi : lo + hs * static_cast<double>(i + 1);
      const double xm = 0.5 * (x0 + x1);
      DenseSolution::Step trial{x0, x1, y, y, 0.0, 0.0};
      bool overlap = false;

      // Delayed value seen from this step. A history jump is resolved from the
      // image of the step midpoint, so grid points on a jump image take the
      // limit from inside the step.
      auto lagged = [&](double t, double yt) {
        const double arg = problem.delayed_argument(t, yt);
        if (arg <= a) {
          const double probe = problem.delayed_argument(xm, yt);
          const std::size_t seg = probe <= a ? hist.segment_index(probe) : hist.segment_index(arg);
          return hist.eval_segment(seg, arg, 0);
        }
        if (arg <= x0) return sol.eval(arg, 0);
        if (arg > x1 * (1.0 + 1e-14) + 1e-14) {
          std::ostringstream msg;
          msg << "steps_rk4: delayed argument " << arg << " lies ahead of the step ending at " << x1;
          throw domain_error(msg.str());
        }
        overlap = true;
        return hermite(trial, std::min(arg, x1), 0);
      };
      auto f = [&](double t, double yt) { return problem.rhs(t, yt, lagged(t, yt)); };

      trial.f0 = f(x0, y);
      trial.y1 = y + (x1 - x0) * trial.f0;
      trial.f1 = trial.f0;

      double y_next = y;
      double f_next = trial.f0;
      int sweep = 0;
      for (;; ++sweep) {
        overlap = false;
        const double dx = x1 - x0;
        const double k1 = f(x0, y);
        const double k2 = f(x0 + 0.5 * dx, y + 0.5 * dx * k1);
        const double k3 = f(x0 + 0.5 * dx, y + 0.5 * dx * k2);
        const double k4 = f(x1, y + dx * k3);
        y_next = y + dx / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        trial.f0 = k1;
        f_next = f(x1, y_next);
        const double change = std::abs(y_next - trial.y1) + std::abs(f_next - trial.f1) * dx;
        trial.y1 = y_next;
        trial.f1 = f_next;
        if (!overlap) break;
        if (change <= 1e-15 * (1.0 + std::abs(y_next))) break;
        if (sweep + 1 >= kMaxSweeps) {
          std::ostringstream msg;
          msg << "steps_rk4: vanishing-delay iteration did not settle on [" << x0 << ", " << x1 << "]";
          throw domain_error(msg.str());
        }
      }
      sol.push(trial);
      y = y_next;
    }
  }
  return sol;
}

}  // namespace mqdde
