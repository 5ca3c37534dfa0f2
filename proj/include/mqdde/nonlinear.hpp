#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "mqdde/kernel.hpp"
#include "mqdde/problem.hpp"

namespace mqdde {

using VectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

struct NLOptions {
  int max_iters = 30;
  double f_tol = 1e-12;
  double step_tol = 1e-14;
  /// Relative to max(1, |x0|, |first Gauss-Newton step|).
  double initial_radius = 1.0;
  double fd_step = std::sqrt(std::numeric_limits<double>::epsilon());
};

enum class NLStatus { converged, max_iters, stalled };

std::string to_string(NLStatus status);

struct NLReport {
  NLStatus status = NLStatus::max_iters;
  int iterations = 0;
  double final_norm = 0.0;
  /// Condition number of the last Jacobian factorised.
  double condition = 1.0;
};

struct NLResult {
  Eigen::VectorXd x;
  NLReport report;
};

/// Residual map alpha -> F(alpha) for collocation of a general DDE: the first
/// `order` components are y^(k)(a) - h^(k)(a), then G at every node. A
/// component whose evaluation leaves the history domain is reported as NaN.
VectorFn assemble_F(const GeneralDDE& problem, const MQBasis& basis);

/// Forward-difference Jacobian with column step fd_step * max(1, |x_k|).
/// Throws domain_error naming the first column that produced a non-finite value.
Eigen::MatrixXd fd_jacobian(const VectorFn& F, const Eigen::VectorXd& x, double fd_step);

/// Jacobian of assemble_F by the chain rule. G is differentiated numerically
/// with respect to each solution value it reads (central differences); those
/// partials multiply the exact basis derivatives. Values read from the history
/// are constants. Much more accurate than fd_jacobian when the coefficients are
/// large and cancel, which is the usual case for flat multiquadrics.
JacobianFn assemble_jacobian(const GeneralDDE& problem, const MQBasis& basis);

/// Powell dogleg trust-region iteration for F(x) = 0. Non-convergence is
/// reported in the status; the best iterate is always returned.
/// Without `jacobian`, forward differences are used.
NLResult dogleg_solve(const VectorFn& F, const Eigen::VectorXd& x0, const NLOptions& opts = {},
                      const JacobianFn& jacobian = {});

}  // namespace mqdde
