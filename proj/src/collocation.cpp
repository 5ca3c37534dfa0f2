#include "mqdde/collocation.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mqdde/errors.hpp"

namespace mqdde {

MQBasis build_centers(std::span<const double> nodes, int order, double spacing) {
  if (order < 1) throw invalid_input("build_centers: order must be at least 1");
  if (!(spacing > 0.0)) throw invalid_input("build_centers: spacing must be positive");
  if (nodes.size() < 2) throw invalid_input("build_centers: need at least two nodes");
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i] > nodes[i - 1])) throw invalid_input("build_centers: nodes must be strictly increasing");
  }

  MQBasis basis;
  basis.n_extra = order;
  basis.centers.reserve(nodes.size() + static_cast<std::size_t>(order));
  const double unset = std::numeric_limits<double>::quiet_NaN();
  for (int k = order; k >= 1; --k) basis.centers.push_back({nodes.front() - k * spacing, unset});
  for (double x : nodes) basis.centers.push_back({x, unset});
  return basis;
}

void set_shapes(MQBasis& basis, std::span<const double> shapes) {
  if (shapes.size() != basis.size()) {
    throw invalid_input("set_shapes: expected " + std::to_string(basis.size()) + " shapes, got " +
                        std::to_string(shapes.size()));
  }
  for (std::size_t j = 0; j < shapes.size(); ++j) basis.centers[j].shape = shapes[j];
  basis.validate();
}

Interpolant::Interpolant(MQBasis basis, Eigen::VectorXd coefficients)
    : basis_(std::move(basis)), coefficients_(std::move(coefficients)) {
  if (static_cast<std::size_t>(coefficients_.size()) != basis_.size()) {
    throw invalid_input("Interpolant: coefficient count does not match basis size");
  }
}

double Interpolant::eval(double x, int order) const {
  if (order < 0 || order > 2) {
    throw invalid_input("Interpolant::eval: derivative order " + std::to_string(order) + " not supported");
  }
  const auto& centers = basis_.centers;
  double sum = 0.0;
  switch (order) {
    case 0:
      for (std::size_t j = 0; j < centers.size(); ++j) sum += coefficients_[j] * mq_eval(x, centers[j]);
      break;
    case 1:
      for (std::size_t j = 0; j < centers.size(); ++j) sum += coefficients_[j] * mq_deriv(x, centers[j]);
      break;
    default:
      for (std::size_t j = 0; j < centers.size(); ++j) sum += coefficients_[j] * mq_deriv2(x, centers[j]);
      break;
  }
  return sum;
}

SolutionFn Interpolant::as_function() const {
  return [self = *this](double x, int order) { return self.eval(x, order); };
}

double delayed_history(const LinearDDE& problem, double x, int order) {
  const double arg = x - problem.tau(x);
  // Pick the history segment seen from slightly inside the domain, so that a
  // node sitting on the image of a jump takes the limit from the inside.
  const double nudge = 1e-8 * (problem.b - problem.a);
  const double mid = 0.5 * (problem.a + problem.b);
  const double inner = x < mid ? x + nudge : x - nudge;
  const double probe = inner - problem.tau(inner);
  const History& h = problem.history;
  const std::size_t seg = probe <= problem.a ? h.segment_index(probe) : h.segment_index(arg);
  return h.eval_segment(seg, arg, order);
}

LinearSystem assemble_linear(const LinearDDE& problem, const MQBasis& basis) {
  basis.validate();
  const auto nodes = basis.nodes();
  const auto& centers = basis.centers;
  const Eigen::Index n = static_cast<Eigen::Index>(centers.size());
  const Eigen::Index rows = static_cast<Eigen::Index>(nodes.size()) + 1;

  LinearSystem sys{Eigen::MatrixXd::Zero(rows, n), Eigen::VectorXd::Zero(rows)};
  const double a = problem.a;
  for (Eigen::Index j = 0; j < n; ++j) sys.matrix(0, j) = mq_eval(a, centers[j]);
  sys.rhs(0) = problem.history.eval(a, 0);

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Eigen::Index row = static_cast<Eigen::Index>(i) + 1;
    const double x = nodes[i].position;
    const double p = problem.p(x);
    const double q = problem.q(x);
    const double arg = x - problem.tau(x);
    const bool from_history = arg <= a;
    for (Eigen::Index j = 0; j < n; ++j) {
      double v = mq_deriv(x, centers[j]) - p * mq_eval(x, centers[j]);
      if (!from_history) v -= q * mq_eval(arg, centers[j]);
      sys.matrix(row, j) = v;
    }
    sys.rhs(row) = problem.s(x) + (from_history ? q * delayed_history(problem, x) : 0.0);
  }
  return sys;
}

LinearSolution solve_linear(const LinearDDE& problem, const MQBasis& basis, double rcond) {
  const LinearSystem sys = assemble_linear(problem, basis);
  SolveResult res = pseudo_solve(sys.matrix, sys.rhs, rcond);
  return {Interpolant(basis, std::move(res.x)), res.info};
}

double residual_at(const DDEProblem& problem, const Interpolant& interpolant, double x) {
  if (const auto* lin = std::get_if<LinearDDE>(&problem)) {
    const double arg = x - lin->tau(x);
    const double delayed = arg <= lin->a ? delayed_history(*lin, x) : interpolant.eval(arg, 0);
    return lin->s(x) - interpolant.eval(x, 1) + lin->p(x) * interpolant.eval(x, 0) + lin->q(x) * delayed;
  }
  const auto& gen = std::get<GeneralDDE>(problem);
  const SolutionFn current = [&interpolant](double t, int order) { return interpolant.eval(t, order); };
  return gen.residual(StateLookup(x, gen.a, current, gen.history, history_band(gen)));
}

Eigen::MatrixXd interpolation_matrix(const MQBasis& basis) {
  const auto& centers = basis.centers;
  const Eigen::Index n = static_cast<Eigen::Index>(centers.size());
  Eigen::MatrixXd phi(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) phi(i, j) = mq_eval(centers[i].position, centers[j]);
  }
  return phi;
}

Interpolant fit_function(const ScalarFn& f, const MQBasis& basis, double rcond) {
  basis.validate();
  const Eigen::Index n = static_cast<Eigen::Index>(basis.size());
  Eigen::VectorXd values(n);
  for (Eigen::Index i = 0; i < n; ++i) values(i) = f(basis.centers[i].position);
  SolveResult res = pseudo_solve(interpolation_matrix(basis), values, rcond);
  return Interpolant(basis, std::move(res.x));
}

}  // namespace mqdde
