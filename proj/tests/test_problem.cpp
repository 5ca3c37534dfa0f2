#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mqdde/errors.hpp"
#include "mqdde/problem.hpp"

using namespace mqdde;
using std::numbers::pi;

namespace {

SolutionFn constant(double v) {
  return [v](double, int order) { return order == 0 ? v : 0.0; };
}

}  // namespace

TEST_CASE("History picks the half-open segment") {
  History h({{-1.0, constant(0.0)}, {-1.0 / 3.0, constant(1.0)}}, -1.0, false);
  CHECK(h.eval(-0.5, 0) == 0.0);
  CHECK(h.eval(-1.0 / 3.0, 0) == 1.0);
  CHECK(h.eval(0.0, 0) == 1.0);
  CHECK(h.segment_index(-1.0) == 0);
  CHECK(h.segment_index(-0.2) == 1);
  CHECK_THROWS_AS(h.eval(-1.5, 0), domain_error);
}

TEST_CASE("History rejects malformed segments") {
  CHECK_THROWS_AS(History(std::vector<HistorySegment>{}, 0.0, false), invalid_input);
  CHECK_THROWS_AS(History({{0.0, constant(1.0)}, {0.0, constant(2.0)}}, -1.0, false), invalid_input);
  CHECK_THROWS_AS(History({{0.0, SolutionFn{}}}, -1.0, false), invalid_input);
}

TEST_CASE("Open lower bound excludes the bound itself") {
  History h([](double x, int) { return std::log(x); }, 0.0, true);
  CHECK_THROWS_AS(h.eval(0.0, 0), domain_error);
  CHECK(h.eval(1.0, 0) == doctest::Approx(0.0));
}

TEST_CASE("StateLookup switches to the history at and just above a") {
  History h(constant(-1.0));
  SolutionFn current = [](double x, int) { return x; };
  StateLookup y(0.5, 0.0, current, h, 1e-8);
  CHECK(y.at(0) == 0.5);
  CHECK(y.lagged(-0.1, 0) == -1.0);
  CHECK(y.lagged(0.0, 0) == -1.0);
  CHECK(y.lagged(5e-9, 0) == -1.0);
  CHECK(y.lagged(0.25, 0) == 0.25);
}

TEST_CASE("registry lists the six cases and rejects unknown names") {
  CHECK(benchmark_names().size() == 6);
  CHECK_THROWS_AS(make_benchmark("example9"), invalid_input);
  CHECK_THROWS_AS(make_benchmark("example1", {{"q", 1.0}}), invalid_input);
}

TEST_CASE("example1 parameters and values") {
  const auto c = make_benchmark("example1", {{"p", -0.1}});
  CHECK(c.parameters.at("A") == doctest::Approx(-0.1 - std::exp(0.15 * pi)));
  CHECK(domain_start(c.problem) == 0.0);
  CHECK(domain_end(c.problem) == 13.0);
  CHECK(exact_eval(c, 0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(make_benchmark("example1", {{"p", 0.5}}), invalid_input);

  const auto d = make_benchmark("example1", {{"p", -1.0}});
  CHECK(exact_eval(d, 0.0) == doctest::Approx(1.0));
  CHECK(history_eval(d.problem, -pi, 0) == doctest::Approx(std::exp(pi)));
  const auto& lin = std::get<LinearDDE>(d.problem);
  CHECK(lin.tau(2.0) == doctest::Approx(1.5 * pi));
}

TEST_CASE("example2 guards q") {
  CHECK_NOTHROW(make_benchmark("example2", {{"q", 0.9}}));
  CHECK_THROWS_AS(make_benchmark("example2", {{"q", 1.0}}), invalid_input);
  CHECK_THROWS_AS(make_benchmark("example2", {{"q", 0.0}}), invalid_input);
  const auto c = make_benchmark("example2", {{"q", 0.2}});
  CHECK(exact_eval(c, 3.0) == doctest::Approx(std::exp(-3.0)));
}

TEST_CASE("example3 breakpoints and branches") {
  const auto c = make_benchmark("example3");
  REQUIRE(c.breakpoints.size() == 4);
  CHECK(c.breakpoints[0] == doctest::Approx(2.0 / 3.0));
  CHECK(c.breakpoints[1] == doctest::Approx(1.0));
  CHECK(c.breakpoints[2] == doctest::Approx(5.0 / 3.0));
  CHECK(c.breakpoints[3] == doctest::Approx(2.0));
  CHECK(domain_end(c.problem) == doctest::Approx(8.0 / 3.0));
  CHECK(exact_eval(c, 0.5) == doctest::Approx(std::exp(0.5)));
  // Continuity across every breakpoint.
  for (double x : c.breakpoints) {
    CHECK(exact_eval(c, x - 1e-12) == doctest::Approx(exact_eval(c, x + 1e-12)).epsilon(1e-9));
  }
  CHECK(history_eval(c.problem, -0.5, 0) == 0.0);
  CHECK(history_eval(c.problem, -0.2, 0) == 1.0);
}

TEST_CASE("example4 history") {
  const auto c = make_benchmark("example4");
  CHECK(history_eval(c.problem, -0.5, 0) == doctest::Approx(1.5));
  CHECK(order_of(c.problem) == 1);
  CHECK_FALSE(is_linear(c.problem));
  CHECK(exact_eval(c, 0.5) == doctest::Approx(1.5));
}

TEST_CASE("example5 guards c") {
  CHECK_THROWS_AS(make_benchmark("example5", {{"c", 1.5}}), invalid_input);
  CHECK_THROWS_AS(make_benchmark("example5", {{"c", -1.01}}), invalid_input);
  const auto c = make_benchmark("example5", {{"c", 1.0}});
  CHECK(exact_eval(c, pi / 2) == doctest::Approx(1.0));
  CHECK(c.presets.count("default") == 1);
  CHECK(c.presets.at("default").n0 == 11);
  CHECK(c.presets.at("n0_10").n0 == 10);
  CHECK(c.guess(2.0) == 0.5);
}

TEST_CASE("example6 registration") {
  const auto c = make_benchmark("example6");
  CHECK(order_of(c.problem) == 2);
  CHECK(domain_start(c.problem) == 1.0);
  CHECK(domain_end(c.problem) == 5.0);
  CHECK(history_eval(c.problem, 0.5, 1) == doctest::Approx(2.0));
  CHECK(c.description.find("printed form rejected") != std::string::npos);

  // The printed equation leaves the history domain; both rearrangements hold.
  CHECK_THROWS_AS(exact_residual(example6_problem(Example6Form::printed), c.exact, {}, 50), domain_error);
  CHECK(exact_residual(example6_problem(Example6Form::state_argument), c.exact, {}, 50) <= 1e-8);
  CHECK(exact_residual(example6_problem(Example6Form::derivative_argument), c.exact, {}, 50) <= 1e-8);
}

TEST_CASE("every registered exact solution satisfies its equation") {
  for (const auto& name : benchmark_names()) {
    const auto c = make_benchmark(name);
    CHECK_MESSAGE(exact_residual(c.problem, c.exact, c.breakpoints, 50) <= 1e-8, name);
  }
}

TEST_CASE("exact_eval outside [a, b] is rejected") {
  const auto c = make_benchmark("example2");
  CHECK_THROWS_AS(exact_eval(c, 10.5), invalid_input);
  CHECK_THROWS_AS(exact_eval(c, -0.1), invalid_input);
}

TEST_CASE("history_eval guards") {
  const auto c = make_benchmark("example4");
  CHECK_THROWS_AS(history_eval(c.problem, 0.5, 0), invalid_input);
  CHECK_THROWS_AS(history_eval(c.problem, -0.5, -1), invalid_input);
}

TEST_CASE("restrict_problem keeps the equation and swaps the history") {
  const auto c = make_benchmark("example3");
  const auto piece = restrict_problem(c.problem, 1.0, 5.0 / 3.0, History(constant(7.0)));
  CHECK(domain_start(piece) == 1.0);
  CHECK(domain_end(piece) == doctest::Approx(5.0 / 3.0));
  CHECK(history_eval(piece, 0.5, 0) == 7.0);
  CHECK_THROWS_AS(restrict_problem(c.problem, 2.0, 1.0, History(constant(0.0))), invalid_input);
}

TEST_CASE("as_general reproduces the linear residual") {
  const auto c = make_benchmark("example2", {{"q", 0.5}});
  const auto& lin = std::get<LinearDDE>(c.problem);
  const GeneralDDE g = as_general(lin);
  CHECK(exact_residual(g, c.exact, {}, 50) <= 1e-10);
  SolutionFn zero = [](double, int) { return 0.0; };
  StateLookup y(4.0, g.a, zero, g.history, history_band(g));
  CHECK(g.residual(y) == doctest::Approx(0.25 * std::exp(-2.0)));
}
