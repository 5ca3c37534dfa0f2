#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mqdde/kernel.hpp"
#include "mqdde/linsolve.hpp"
#include "mqdde/problem.hpp"

namespace mqdde {

/// Centers {a - order*spacing, ..., a - spacing} followed by `nodes`. Shapes
/// are left at NaN until set_shapes is called.
MQBasis build_centers(std::span<const double> nodes, int order, double spacing);

void set_shapes(MQBasis& basis, std::span<const double> shapes);

/// y(x) = sum_j alpha_j phi_j(x)
class Interpolant {
 public:
  Interpolant() = default;
  Interpolant(MQBasis basis, Eigen::VectorXd coefficients);

  double eval(double x, int order = 0) const;
  SolutionFn as_function() const;

  const MQBasis& basis() const { return basis_; }
  const Eigen::VectorXd& coefficients() const { return coefficients_; }

 private:
  MQBasis basis_;
  Eigen::VectorXd coefficients_;
};

struct LinearSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
};

/// Collocation system for a linear DDE: row 0 enforces y(a) = h(a), row i
/// enforces the equation at node i (two equations at a). The delayed term moves
/// to the right-hand side whenever x_i - tau(x_i) <= a.
LinearSystem assemble_linear(const LinearDDE& problem, const MQBasis& basis);

struct LinearSolution {
  Interpolant interpolant;
  SolveInfo info;
};

LinearSolution solve_linear(const LinearDDE& problem, const MQBasis& basis, double rcond = -1.0);

/// Pointwise residual. For linear problems
///   R(x) = s - y' + p y + q y(x - tau(x)),
/// with the history replacing y for delayed arguments <= a. For general
/// problems the residual functional G itself.
double residual_at(const DDEProblem& problem, const Interpolant& interpolant, double x);

/// Value of h(x - tau(x)) as seen from node x. At a jump of the history the
/// one-sided limit from inside [a, b] is used.
double delayed_history(const LinearDDE& problem, double x, int order = 0);

/// Phi_ij = phi_j(x_i) over all centers, extras included.
Eigen::MatrixXd interpolation_matrix(const MQBasis& basis);

/// Interpolates f at every center of the basis.
Interpolant fit_function(const ScalarFn& f, const MQBasis& basis, double rcond = -1.0);

}  // namespace mqdde
