#include <cmath>
#include <numbers>
#include <sstream>

#include "mqdde/errors.hpp"
#include "mqdde/problem.hpp"

namespace mqdde {

namespace {

RSAOverrides preset(int n0, std::optional<double> mu_numerator = std::nullopt) {
  RSAOverrides o;
  o.n0 = n0;
  o.mu_numerator = mu_numerator;
  return o;
}

using std::numbers::pi;

double param_or(const std::map<std::string, double>& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void reject_unknown(const std::map<std::string, double>& params, std::initializer_list<const char*> known,
                    std::string_view name) {
  for (const auto& [key, value] : params) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) {
      throw invalid_input("unknown parameter '" + key + "' for " + std::string(name));
    }
  }
}

void require_order(int order, int max_order) {
  if (order < 0 || order > max_order) {
    throw invalid_input("derivative order " + std::to_string(order) + " not available");
  }
}

// Stiff DDE with constant lag 3*pi/2.
BenchmarkCase example1(const std::map<std::string, double>& params) {
  reject_unknown(params, {"p"}, "example1");
  const double p = param_or(params, "p", -0.1);
  if (!(p < 0.0)) throw invalid_input("example1 requires p < 0");
  const double lag = 1.5 * pi;
  const double A = p - std::exp(-lag * p);

  auto solution = [p](double x, int order) {
    require_order(order, 2);
    switch (order) {
      case 0:
        return std::exp(p * x) + std::sin(x);
      case 1:
        return p * std::exp(p * x) + std::cos(x);
      default:
        return p * p * std::exp(p * x) - std::sin(x);
    }
  };

  LinearDDE dde;
  dde.a = 0.0;
  dde.b = 13.0;
  dde.p = [A](double) { return A; };
  dde.q = [](double) { return 1.0; };
  dde.s = [A](double x) { return -A * std::sin(x); };
  dde.tau = [lag](double) { return lag; };
  dde.history = History(solution, -lag, false);

  BenchmarkCase c;
  c.name = "example1";
  c.description = "stiff linear DDE y' = A y + y(x - 3pi/2) - A sin x on [0, 13], A = p - exp(-3 pi p / 2)";
  c.parameters = {{"p", p}, {"A", A}};
  c.problem = dde;
  c.exact = solution;
  c.presets["default"] = {};
  for (int k = 1; k <= 5; ++k) c.sample_points.push_back(0.75 * pi * k);
  return c;
}

// Pantograph equation with proportional delay q x.
BenchmarkCase example2(const std::map<std::string, double>& params) {
  reject_unknown(params, {"q"}, "example2");
  const double q = param_or(params, "q", 0.5);
  if (!(q > 0.0 && q < 1.0)) throw invalid_input("example2 requires 0 < q < 1");

  auto solution = [](double x, int order) {
    require_order(order, 2);
    return (order % 2 == 0 ? 1.0 : -1.0) * std::exp(-x);
  };

  LinearDDE dde;
  dde.a = 0.0;
  dde.b = 10.0;
  dde.p = [](double) { return -1.0; };
  dde.q = [q](double) { return 0.5 * q; };
  dde.s = [q](double x) { return -0.5 * q * std::exp(-q * x); };
  dde.tau = [q](double x) { return (1.0 - q) * x; };
  dde.history = History(solution);

  BenchmarkCase c;
  c.name = "example2";
  c.description = "pantograph DDE y' = -y + (q/2) y(q x) - (q/2) exp(-q x), y(0) = 1, on [0, 10]";
  c.parameters = {{"q", q}};
  c.problem = dde;
  c.exact = solution;
  c.presets["default"] = {};
  c.sample_points = {10.0};
  return c;
}

// y' = y + y(x - 1) with a history that jumps at -1/3.
BenchmarkCase example3(const std::map<std::string, double>& params) {
  reject_unknown(params, {}, "example3");
  const double e = std::numbers::e;
  const double C1 = 1.0 + std::exp(-2.0 / 3.0);
  const double C2 = -2.0 / e + C1;
  const double C3 = (5.0 / 3.0) / e + C2 - std::exp(-5.0 / 3.0) - C1 * (5.0 / 3.0) / e;
  const double C4 = std::exp(-2.0) + 2.0 * C1 / e + C3 - 2.0 * C2 / e;

  auto solution = [=](double x, int order) {
    require_order(order, 2);
    const double ex = std::exp(x);
    const double ex1 = std::exp(x - 1.0);
    // d^k/dx^k (x e^(x-1)) = (x + k) e^(x-1)
    const double xe = (x + order) * ex1;
    if (x <= 2.0 / 3.0) return ex;
    if (x <= 1.0) return (order == 0 ? -1.0 : 0.0) + C1 * ex;
    if (x <= 5.0 / 3.0) return xe + C2 * ex;
    if (x <= 2.0) return (order == 0 ? 1.0 : 0.0) + C1 * xe + C3 * ex;
    // (x^2/2 - x) e^(x-2) and its derivatives
    const double ex2 = std::exp(x - 2.0);
    const double poly = order == 0 ? 0.5 * x * x - x : (order == 1 ? 0.5 * x * x - 1.0 : 0.5 * x * x + x - 1.0);
    return poly * ex2 + C2 * xe + C4 * ex;
  };

  auto zero = [](double, int) { return 0.0; };
  auto one = [](double, int order) { return order == 0 ? 1.0 : 0.0; };

  LinearDDE dde;
  dde.a = 0.0;
  dde.b = 8.0 / 3.0;
  dde.p = [](double) { return 1.0; };
  dde.q = [](double) { return 1.0; };
  dde.s = [](double) { return 0.0; };
  dde.tau = [](double) { return 1.0; };
  dde.history = History({{-1.0, zero}, {-1.0 / 3.0, one}}, -1.0, false);

  BenchmarkCase c;
  c.name = "example3";
  c.description = "y' = y + y(x - 1) on [0, 8/3] with history 0 on [-1, -1/3), 1 on [-1/3, 0]";
  c.problem = dde;
  c.exact = solution;
  c.breakpoints = {2.0 / 3.0, 1.0, 5.0 / 3.0, 2.0};
  c.presets["default"] = {};
  for (int k = 1; k <= 10; ++k) c.sample_points.push_back(0.25 * k);
  return c;
}

// Neutral equation with state-dependent delay, y' = -y'(y(x) - 2).
BenchmarkCase example4(const std::map<std::string, double>& params) {
  reject_unknown(params, {}, "example4");
  auto solution = [](double x, int order) {
    require_order(order, 2);
    return order == 0 ? 1.0 + x : (order == 1 ? 1.0 : 0.0);
  };
  auto history = [](double x, int order) {
    require_order(order, 2);
    return order == 0 ? 1.0 - x : (order == 1 ? -1.0 : 0.0);
  };

  GeneralDDE dde;
  dde.a = 0.0;
  dde.b = 1.0;
  dde.order = 1;
  dde.history = History(history);
  dde.residual = [](const StateLookup& y) { return y.at(1) + y.lagged(y.at(0) - 2.0, 1); };

  BenchmarkCase c;
  c.name = "example4";
  c.description = "neutral state-delay DDE y' = -y'(y(x) - 2) on [0, 1], y = 1 - x for x <= 0";
  c.problem = dde;
  c.exact = solution;
  c.presets["default"] = {};
  c.guess = [](double) { return 0.0; };
  return c;
}

// Neutral equation with vanishing state delay x y(x)^2.
BenchmarkCase example5(const std::map<std::string, double>& params) {
  reject_unknown(params, {"c"}, "example5");
  const double cpar = param_or(params, "c", 0.0);
  if (!(cpar >= -1.0 && cpar <= 1.0)) throw invalid_input("example5 requires c in [-1, 1]");

  auto solution = [](double x, int order) {
    require_order(order, 2);
    return order == 0 ? std::sin(x) : (order == 1 ? std::cos(x) : -std::sin(x));
  };
  auto forcing = [cpar](double x) {
    const double s = std::sin(x);
    return (1.0 - cpar) * s * std::cos(x * s * s) - std::sin(x + x * s * s);
  };

  GeneralDDE dde;
  dde.a = 0.0;
  dde.b = pi;
  dde.order = 1;
  dde.history = History(solution);
  dde.residual = [cpar, forcing](const StateLookup& y) {
    const double x = y.x();
    const double u = y.at(0);
    const double arg = x * u * u;
    return y.at(1) - std::cos(x) * (1.0 + y.lagged(arg, 0)) - cpar * u * y.lagged(arg, 1) - forcing(x);
  };

  BenchmarkCase c;
  c.name = "example5";
  c.description = "neutral DDE with vanishing state delay x y(x)^2 on [0, pi], y(0) = 0";
  c.parameters = {{"c", cpar}};
  c.problem = dde;
  c.exact = solution;
  c.presets["default"] = preset(11, 20.0);
  c.presets["n0_10"] = preset(10, 25.0);
  c.guess = [](double) { return 0.5; };
  c.sample_points = {pi};
  return c;
}

const char* form_name(Example6Form form) {
  switch (form) {
    case Example6Form::printed:
      return "printed";
    case Example6Form::state_argument:
      return "state-argument";
    case Example6Form::derivative_argument:
      return "derivative-argument";
  }
  return "unknown";
}

BenchmarkCase example6(const std::map<std::string, double>& params) {
  reject_unknown(params, {}, "example6");
  auto solution = [](double x, int order) {
    require_order(order, 2);
    return order == 0 ? std::log(x) : (order == 1 ? 1.0 / x : -1.0 / (x * x));
  };

  BenchmarkCase c;
  c.name = "example6";
  c.exact = solution;
  c.presets["default"] = preset(10);
  // Taylor polynomial of the initial conditions y(1) = 0, y'(1) = 1.
  c.guess = [](double x) { return x - 1.0; };

  // The printed equation sends its delayed argument below the history domain
  // near x = 1; fall back to the first rearrangement that log(x) satisfies.
  std::ostringstream rejected;
  for (auto form : {Example6Form::printed, Example6Form::derivative_argument, Example6Form::state_argument}) {
    GeneralDDE dde = example6_problem(form);
    double worst = 0.0;
    try {
      worst = exact_residual(dde, solution, {}, 50);
    } catch (const domain_error& err) {
      rejected << "; " << form_name(form) << " form rejected: " << err.what();
      continue;
    }
    if (worst > 1e-8) {
      rejected << "; " << form_name(form) << " form rejected: residual " << worst;
      continue;
    }
    c.problem = dde;
    switch (form) {
      case Example6Form::printed:
        c.description = "second-order DDE y'' = (exp(1-y) - x) y(x - exp(1-y)) y'^2 on [1, 5]";
        break;
      case Example6Form::derivative_argument:
        c.description =
            "second-order DDE y'' = -y'(exp(1 - y'(x))) y'(x)^2 exp(1 - y'(x)) on [1, 5], "
            "y = log x for 0 < x <= 1";
        break;
      case Example6Form::state_argument:
        c.description =
            "second-order DDE y'' = -y'(exp(1 - y(x))) y'(x)^2 exp(1 - y(x)) on [1, 5], "
            "y = log x for 0 < x <= 1";
        break;
    }
    c.description += rejected.str();
    return c;
  }
  throw invalid_input("example6: no equation form is satisfied by log(x)" + rejected.str());
}

}  // namespace

GeneralDDE example6_problem(Example6Form form) {
  auto history = [](double x, int order) {
    require_order(order, 2);
    return order == 0 ? std::log(x) : (order == 1 ? 1.0 / x : -1.0 / (x * x));
  };

  GeneralDDE dde;
  dde.a = 1.0;
  dde.b = 5.0;
  dde.order = 2;
  dde.history = History(history, 0.0, true);
  switch (form) {
    case Example6Form::printed:
      dde.residual = [](const StateLookup& y) {
        const double x = y.x();
        const double w = std::exp(1.0 - y.at(0));
        const double dy = y.at(1);
        return y.at(2) - (w - x) * y.lagged(x - w, 0) * dy * dy;
      };
      break;
    case Example6Form::state_argument:
      dde.residual = [](const StateLookup& y) {
        const double w = std::exp(1.0 - y.at(0));
        const double dy = y.at(1);
        return y.at(2) + y.lagged(w, 1) * dy * dy * w;
      };
      break;
    case Example6Form::derivative_argument:
      dde.residual = [](const StateLookup& y) {
        const double dy = y.at(1);
        const double w = std::exp(1.0 - dy);
        return y.at(2) + y.lagged(w, 1) * dy * dy * w;
      };
      break;
  }
  return dde;
}

std::vector<std::string> benchmark_names() {
  return {"example1", "example2", "example3", "example4", "example5", "example6"};
}

BenchmarkCase make_benchmark(std::string_view name, const std::map<std::string, double>& parameters) {
  BenchmarkCase c;
  if (name == "example1") {
    c = example1(parameters);
  } else if (name == "example2") {
    c = example2(parameters);
  } else if (name == "example3") {
    c = example3(parameters);
  } else if (name == "example4") {
    c = example4(parameters);
  } else if (name == "example5") {
    c = example5(parameters);
  } else if (name == "example6") {
    return example6(parameters);
  } else {
    throw invalid_input("unknown benchmark '" + std::string(name) + "'");
  }

  const double worst = exact_residual(c.problem, c.exact, c.breakpoints, 50);
  if (!(worst <= 1e-8)) {
    std::ostringstream msg;
    msg << c.name << ": exact solution leaves residual " << worst;
    throw invalid_input(msg.str());
  }
  return c;
}

double exact_eval(const BenchmarkCase& benchmark, double x, int order) {
  const double a = domain_start(benchmark.problem);
  const double b = domain_end(benchmark.problem);
  if (!(x >= a && x <= b)) {
    std::ostringstream msg;
    msg << benchmark.name << ": x = " << x << " outside [" << a << ", " << b << "]";
    throw invalid_input(msg.str());
  }
  return benchmark.exact(x, order);
}

double exact_residual(const DDEProblem& problem, const SolutionFn& exact,
                      const std::vector<double>& breakpoints, int samples) {
  const double a = domain_start(problem);
  const double b = domain_end(problem);
  std::vector<double> edges{a};
  edges.insert(edges.end(), breakpoints.begin(), breakpoints.end());
  edges.push_back(b);

  const GeneralDDE general = is_linear(problem) ? as_general(std::get<LinearDDE>(problem))
                                                : std::get<GeneralDDE>(problem);
  double worst = 0.0;
  for (std::size_t piece = 0; piece + 1 < edges.size(); ++piece) {
    const double lo = edges[piece];
    const double hi = edges[piece + 1];
    for (int k = 0; k < samples; ++k) {
      const double x = lo + (k + 0.5) / samples * (hi - lo);
      StateLookup y(x, a, exact, general.history, history_band(general));
      worst = std::max(worst, std::abs(general.residual(y)));
    }
  }
  return worst;
}

}  // namespace mqdde
