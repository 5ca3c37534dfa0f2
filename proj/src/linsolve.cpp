#include "mqdde/linsolve.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "mqdde/errors.hpp"

namespace mqdde {

namespace {

#ifdef MQDDE_BDC
using Svd = Eigen::BDCSVD<Eigen::MatrixXd>;
#else
using Svd = Eigen::JacobiSVD<Eigen::MatrixXd>;
#endif

double spectrum_condition(const Eigen::VectorXd& sigma) {
  if (sigma.size() == 0 || sigma(0) == 0.0) return 1.0;
  double smallest = sigma(0);
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > 0.0) smallest = sigma(i);
  }
  return sigma(0) / smallest;
}

Eigen::Index retained(const Eigen::VectorXd& sigma, double rcond) {
  if (sigma.size() == 0 || sigma(0) == 0.0) return 0;
  const double cutoff = rcond * sigma(0);
  Eigen::Index r = 0;
  while (r < sigma.size() && sigma(r) > cutoff) ++r;
  return r;
}

}  // namespace

double default_rcond(Eigen::Index rows, Eigen::Index cols) {
  return std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(rows, cols));
}

// The SVD iteration does not terminate on NaN input.
static void require_finite(const Eigen::MatrixXd& A, const char* who) {
  if (!A.allFinite()) throw domain_error(std::string(who) + ": matrix has non-finite entries");
}

SolveResult pseudo_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double rcond) {
  if (A.rows() != b.size()) {
    throw invalid_input("pseudo_solve: matrix has " + std::to_string(A.rows()) + " rows but rhs has " +
                        std::to_string(b.size()) + " entries");
  }
  if (rcond >= 1.0) throw invalid_input("pseudo_solve: rcond must lie in [0, 1)");
  require_finite(A, "pseudo_solve");
  if (!b.allFinite()) throw domain_error("pseudo_solve: right-hand side has non-finite entries");
  if (rcond < 0.0) rcond = default_rcond(A.rows(), A.cols());

  SolveResult out;
  out.x = Eigen::VectorXd::Zero(A.cols());
  out.info.truncation = rcond;
  if (A.size() == 0) return out;

  Svd svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const Eigen::Index r = retained(sigma, rcond);
  out.info.rank = static_cast<int>(r);
  out.info.condition = spectrum_condition(sigma);
  if (r == 0) return out;

  const Eigen::VectorXd coeffs =
      (svd.matrixU().leftCols(r).transpose() * b).cwiseQuotient(sigma.head(r));
  out.x = svd.matrixV().leftCols(r) * coeffs;
  return out;
}

double condition_number(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return 1.0;
  require_finite(A, "condition_number");
  Svd svd(A);
  return spectrum_condition(svd.singularValues());
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& A, double rcond) {
  if (rcond < 0.0) rcond = default_rcond(A.rows(), A.cols());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(A.cols(), A.rows());
  if (A.size() == 0) return out;
  require_finite(A, "pseudo_inverse");
  Svd svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const Eigen::Index r = retained(sigma, rcond);
  if (r == 0) return out;
  out = svd.matrixV().leftCols(r) * sigma.head(r).cwiseInverse().asDiagonal() *
        svd.matrixU().leftCols(r).transpose();
  return out;
}

}  // namespace mqdde
