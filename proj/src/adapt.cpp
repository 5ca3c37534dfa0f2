#include "mqdde/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mqdde/errors.hpp"
#include "mqdde/kernel.hpp"
#include "mqdde/linsolve.hpp"

namespace mqdde {

void RSAConfig::validate() const {
  if (n0 < 2) throw invalid_input("RSAConfig: n0 must be at least 2");
  if (!(lambda > 0.0) || !(mu > 0.0) || !(eta > 0.0)) {
    throw invalid_input("RSAConfig: lambda, mu and eta must be positive");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) throw invalid_input("RSAConfig: gamma must lie in [0, 1)");
  if (!(theta_min > 0.0) || !(theta_max > theta_min)) {
    throw invalid_input("RSAConfig: require theta_max > theta_min > 0");
  }
  if (itmax < 0) throw invalid_input("RSAConfig: itmax must be non-negative");
  if (n_ev < 2) throw invalid_input("RSAConfig: n_ev must be at least 2");
  if (cond_cap && !(*cond_cap > 1.0)) throw invalid_input("RSAConfig: cond_cap must exceed 1");
  if (!(cap_shrink > 0.0 && cap_shrink < 1.0)) throw invalid_input("RSAConfig: cap_shrink must lie in (0, 1)");
  if (extra_offset && !(*extra_offset > 0.0)) throw invalid_input("RSAConfig: extra_offset must be positive");
}

double default_mu(int n0, double numerator) {
  if (n0 < 2 || !(numerator > 0.0)) throw invalid_input("default_mu: need n0 >= 2 and a positive numerator");
  return shape_gain * std::sqrt(numerator / n0);
}

RSAConfig apply_overrides(RSAConfig base, const RSAOverrides& overrides) {
  if (overrides.n0 || overrides.mu_numerator) {
    if (overrides.n0) base.n0 = *overrides.n0;
    base.mu = default_mu(base.n0, overrides.mu_numerator.value_or(40.0));
  }
  if (overrides.mu) base.mu = *overrides.mu;
  if (overrides.itmax) base.itmax = *overrides.itmax;
  if (overrides.cond_cap) base.cond_cap = *overrides.cond_cap;
  return base;
}

std::string to_string(RSAStatus status) {
  return status == RSAStatus::residual_converged ? "residual-converged" : "itmax-reached";
}

std::vector<double> midpoints(std::span<const double> nodes) {
  if (nodes.size() < 2) throw invalid_input("midpoints: need at least two nodes");
  std::vector<double> z(nodes.size() - 1);
  for (std::size_t j = 0; j + 1 < nodes.size(); ++j) z[j] = 0.5 * (nodes[j] + nodes[j + 1]);
  return z;
}

std::vector<double> refine_nodes(std::span<const double> nodes, std::span<const double> residuals,
                                 const RSAConfig& config, int* added, int* deleted) {
  const std::size_t n = nodes.size();
  if (n < 2 || residuals.size() != n - 1) {
    throw invalid_input("refine_nodes: need one residual per pair of consecutive nodes");
  }
  const auto z = midpoints(nodes);

  double rmax = 0.0;
  for (double r : residuals) rmax = std::max(rmax, std::abs(r));
  const double threshold = std::max(config.theta_max, rmax / config.eta);

  std::vector<double> out;
  out.reserve(2 * n);
  int n_added = 0;
  int n_deleted = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool interior = i > 0 && i + 1 < n;
    const bool quiet = interior && std::abs(residuals[i - 1]) < config.theta_min &&
                       std::abs(residuals[i]) < config.theta_min;
    if (quiet) {
      ++n_deleted;
    } else {
      out.push_back(nodes[i]);
    }
    if (i + 1 < n && std::abs(residuals[i]) > threshold) {
      out.push_back(z[i]);
      ++n_added;
    }
  }

  // Sorted by construction; drop near-duplicates produced by tiny gaps.
  const double tol = 1e-12 * (nodes.back() - nodes.front());
  std::vector<double> unique;
  unique.reserve(out.size());
  for (double x : out) {
    if (!unique.empty() && x - unique.back() <= tol) {
      if (x == nodes.back()) unique.back() = x;
      continue;
    }
    unique.push_back(x);
  }
  if (added) *added = n_added;
  if (deleted) *deleted = n_deleted;
  return unique;
}

namespace {

double rms_against(const Interpolant& y, const ScalarFn& exact, double a, double b, int n_ev) {
  double sum = 0.0;
  for (int i = 0; i < n_ev; ++i) {
    const double x = a + (b - a) * i / (n_ev - 1);
    const double e = y.eval(x) - exact(x);
    sum += e * e;
  }
  return std::sqrt(sum / n_ev);
}

// Shrinks all shapes until the interpolation matrix is below the cap.
void cap_condition(MQBasis& basis, const RSAConfig& config) {
  if (!config.cond_cap) return;
  double factor = 1.0;
  while (condition_number(interpolation_matrix(basis)) > *config.cond_cap) {
    if (factor * config.cap_shrink < config.cap_floor) break;
    factor *= config.cap_shrink;
    for (auto& c : basis.centers) c.shape *= config.cap_shrink;
  }
}

}  // namespace

StepResult rsa_step(const DDEProblem& problem, std::span<const double> nodes, const RSAConfig& config,
                    double spacing, const Interpolant* warm, const RSAInputs& inputs) {
  config.validate();
  const int m = order_of(problem);
  const double a = domain_start(problem);
  const double b = domain_end(problem);
  if (nodes.size() < 2 || nodes.front() != a || nodes.back() != b) {
    throw invalid_input("rsa_step: nodes must start at a and end at b");
  }

  MQBasis basis = build_centers(nodes, m, spacing);
  ShapeRule rule{config.lambda, config.mu, config.gamma, m, config.boost_first_node};
  set_shapes(basis, distribute_shapes(nodes, rule));

  StepResult out;
  out.record.dof = static_cast<int>(basis.size());
  if (const auto* lin = std::get_if<LinearDDE>(&problem)) {
    LinearSolution sol = solve_linear(*lin, basis, config.rcond);
    out.interpolant = std::move(sol.interpolant);
    out.record.condition = sol.info.condition;
  } else {
    const auto& gen = std::get<GeneralDDE>(problem);
    cap_condition(basis, config);
    Interpolant start;
    if (warm != nullptr) {
      start = fit_function([warm](double x) { return warm->eval(x); }, basis, config.rcond);
    } else if (inputs.guess) {
      start = fit_function(inputs.guess, basis, config.rcond);
    } else {
      throw invalid_input("rsa_step: nonlinear problems need an initial guess");
    }
    NLResult sol = dogleg_solve(assemble_F(gen, basis), start.coefficients(), config.nl,
                                 assemble_jacobian(gen, basis));
    out.interpolant = Interpolant(basis, std::move(sol.x));
    out.record.condition = sol.report.iterations > 0 ? sol.report.condition
                                                     : condition_number(interpolation_matrix(basis));
    out.record.nl = sol.report;
  }

  const auto z = midpoints(nodes);
  std::vector<double> residuals(z.size());
  double rmax = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    residuals[j] = residual_at(problem, out.interpolant, z[j]);
    if (!std::isfinite(residuals[j])) {
      std::ostringstream msg;
      msg << "rsa_step: non-finite residual at midpoint " << z[j];
      throw domain_error(msg.str());
    }
    rmax = std::max(rmax, std::abs(residuals[j]));
  }
  out.record.max_residual = rmax;
  out.nodes = refine_nodes(nodes, residuals, config, &out.record.added, &out.record.deleted);
  if (inputs.exact) out.record.rms = rms_against(out.interpolant, inputs.exact, a, b, config.n_ev);
  return out;
}

RSAResult run_rsa(const DDEProblem& problem, const RSAConfig& config, const RSAInputs& inputs) {
  config.validate();
  const double a = domain_start(problem);
  const double b = domain_end(problem);
  const double spacing = (b - a) / (config.n0 - 1);
  const double offset = config.extra_offset.value_or(spacing);

  std::vector<double> nodes(static_cast<std::size_t>(config.n0));
  for (int j = 0; j < config.n0; ++j) nodes[static_cast<std::size_t>(j)] = a + j * spacing;
  nodes.back() = b;

  RSAResult out;
  std::optional<Interpolant> warm;
  for (int k = 0; k <= config.itmax; ++k) {
    StepResult step;
    try {
      step = rsa_step(problem, nodes, config, offset, warm ? &*warm : nullptr, inputs);
    } catch (const std::exception& err) {
      std::ostringstream msg;
      msg << "refinement iteration " << k << " failed with " << nodes.size() << " nodes: " << err.what();
      throw rsa_error(msg.str(), out.report);
    }
    step.record.iteration = k;
    out.report.records.push_back(step.record);
    if (inputs.progress) inputs.progress(step.record);
    out.interpolant = step.interpolant;
    if (step.record.max_residual < config.theta_max) {
      out.report.status = RSAStatus::residual_converged;
      return out;
    }
    nodes = std::move(step.nodes);
    warm = std::move(step.interpolant);
  }
  out.report.status = RSAStatus::itmax_reached;
  return out;
}

double PiecewiseSolution::eval(double x, int order) const {
  if (pieces.empty()) throw invalid_input("PiecewiseSolution: no pieces");
  for (const auto& piece : pieces) {
    if (x < piece.hi) return piece.interpolant.eval(x, order);
  }
  return pieces.back().interpolant.eval(x, order);
}

int PiecewiseSolution::total_dof() const {
  int dof = 0;
  for (const auto& piece : pieces) dof += static_cast<int>(piece.interpolant.basis().size());
  return dof;
}

PiecewiseSolution solve_piecewise(const DDEProblem& problem, const std::vector<double>& breakpoints,
                                  const RSAConfig& config, const RSAInputs& inputs) {
  const double a = domain_start(problem);
  const double b = domain_end(problem);
  std::vector<double> edges{a};
  for (double x : breakpoints) {
    if (!(x > edges.back() && x < b)) {
      throw invalid_input("solve_piecewise: breakpoints must be strictly increasing inside (a, b)");
    }
    edges.push_back(x);
  }
  edges.push_back(b);

  const History& original = history_of(problem);
  std::vector<HistorySegment> segments = original.segments();

  PiecewiseSolution out;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double lo = edges[i];
    const double hi = edges[i + 1];
    History history(segments, original.lower_bound(), original.lower_open());
    const DDEProblem piece_problem = restrict_problem(problem, lo, hi, history);

    RSAInputs piece_inputs = inputs;
    if (i > 0 && inputs.guess) {
      // Continue from the previous piece rather than the global guess.
      const Interpolant prev = out.pieces.back().interpolant;
      piece_inputs.guess = [prev](double x) { return prev.eval(x); };
    }

    RSAResult res;
    try {
      res = run_rsa(piece_problem, config, piece_inputs);
    } catch (const rsa_error& err) {
      std::ostringstream msg;
      msg << "piece " << i << " [" << lo << ", " << hi << "]: " << err.what();
      throw rsa_error(msg.str(), err.partial());
    }
    Interpolant interp = res.interpolant;
    segments.push_back({lo, [interp](double x, int order) { return interp.eval(x, order); }});
    out.pieces.push_back({lo, hi, std::move(res.interpolant), std::move(res.report)});
  }
  return out;
}

}  // namespace mqdde
