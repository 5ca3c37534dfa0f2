#include "mqdde/problem.hpp"

#include <algorithm>
#include <sstream>

#include "mqdde/errors.hpp"

namespace mqdde {

History::History(SolutionFn fn, double lower, bool lower_open)
    : History(std::vector<HistorySegment>{{-std::numeric_limits<double>::infinity(), std::move(fn)}},
              lower, lower_open) {}

History::History(std::vector<HistorySegment> segments, double lower, bool lower_open)
    : segments_(std::move(segments)), lower_(lower), lower_open_(lower_open) {
  if (segments_.empty()) throw invalid_input("History: at least one segment is required");
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    if (!(segments_[i].start > segments_[i - 1].start)) {
      throw invalid_input("History: segment starts must be strictly increasing");
    }
  }
  for (const auto& seg : segments_) {
    if (!seg.fn) throw invalid_input("History: empty segment function");
  }
}

void History::check_domain(double x) const {
  const bool below = lower_open_ ? !(x > lower_) : !(x >= lower_);
  if (below) {
    std::ostringstream msg;
    msg << "history evaluated at x = " << x << ", outside its domain (x "
        << (lower_open_ ? "> " : ">= ") << lower_ << ")";
    throw domain_error(msg.str());
  }
}

std::size_t History::segment_index(double x) const {
  if (segments_.empty()) throw invalid_input("History: not initialised");
  auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                             [](double v, const HistorySegment& s) { return v < s.start; });
  if (it == segments_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(segments_.begin(), it)) - 1;
}

double History::eval_segment(std::size_t index, double x, int order) const {
  check_domain(x);
  return segments_.at(index).fn(x, order);
}

double History::eval(double x, int order) const { return eval_segment(segment_index(x), x, order); }

double history_band(const GeneralDDE& problem) { return 1e-8 * (problem.b - problem.a); }

double domain_start(const DDEProblem& problem) {
  return std::visit([](const auto& p) { return p.a; }, problem);
}

double domain_end(const DDEProblem& problem) {
  return std::visit([](const auto& p) { return p.b; }, problem);
}

int order_of(const DDEProblem& problem) {
  if (const auto* g = std::get_if<GeneralDDE>(&problem)) return g->order;
  return 1;
}

const History& history_of(const DDEProblem& problem) {
  return std::visit([](const auto& p) -> const History& { return p.history; }, problem);
}

bool is_linear(const DDEProblem& problem) { return std::holds_alternative<LinearDDE>(problem); }

DDEProblem restrict_problem(const DDEProblem& problem, double a, double b, History history) {
  if (!(a < b)) throw invalid_input("restrict_problem: require a < b");
  return std::visit(
      [&](const auto& p) -> DDEProblem {
        auto copy = p;
        copy.a = a;
        copy.b = b;
        copy.history = std::move(history);
        return copy;
      },
      problem);
}

double history_eval(const DDEProblem& problem, double x, int order) {
  if (x > domain_start(problem)) {
    throw invalid_input("history_eval: x must not exceed the left end of the domain");
  }
  if (order < 0) throw invalid_input("history_eval: negative derivative order");
  return history_of(problem).eval(x, order);
}

GeneralDDE as_general(const LinearDDE& problem) {
  GeneralDDE g;
  g.a = problem.a;
  g.b = problem.b;
  g.order = 1;
  g.history = problem.history;
  g.residual = [p = problem.p, q = problem.q, s = problem.s,
                tau = problem.tau](const StateLookup& y) {
    const double x = y.x();
    return y.at(1) - p(x) * y.at(0) - q(x) * y.lagged(x - tau(x), 0) - s(x);
  };
  return g;
}

}  // namespace mqdde
