#pragma once

#include <Eigen/Dense>

namespace mqdde {

struct SolveInfo {
  /// sigma_max / sigma_min over every nonzero singular value.
  double condition = 1.0;
  /// Singular values kept after truncation.
  int rank = 0;
  /// Relative cutoff used for truncation.
  double truncation = 0.0;
};

struct SolveResult {
  Eigen::VectorXd x;
  SolveInfo info;
};

/// Default relative cutoff: machine epsilon times the larger matrix dimension.
double default_rcond(Eigen::Index rows, Eigen::Index cols);

/// Minimum-norm least-squares solution A^+ b through a truncated SVD.
/// Singular values below rcond * sigma_max are discarded. A negative rcond
/// selects default_rcond.
SolveResult pseudo_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double rcond = -1.0);

/// Ratio of extreme nonzero singular values of A.
double condition_number(const Eigen::MatrixXd& A);

/// Explicit truncated pseudoinverse, used for diagnostics and tests.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& A, double rcond = -1.0);

}  // namespace mqdde
