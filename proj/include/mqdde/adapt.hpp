#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mqdde/collocation.hpp"
#include "mqdde/nonlinear.hpp"
#include "mqdde/problem.hpp"

namespace mqdde {

/// Calibration factor on the textbook shape scaling sqrt(numerator / n0).
/// Without it the interior multiquadrics are too narrow: errors stall near
/// 1e-5 and iteration-0 condition numbers sit orders of magnitude below those
/// the method needs for spectral accuracy.
inline constexpr double shape_gain = 6.0;

/// mu = shape_gain * sqrt(numerator / n0).
double default_mu(int n0, double numerator = 40.0);

struct RSAConfig {
  /// Initial node count.
  int n0 = 6;
  double lambda = 10.0;
  double mu = default_mu(6);
  double gamma = 0.1;
  double eta = 10.0;
  double theta_max = 1e-13;
  double theta_min = 1e-14;
  int itmax = 13;
  NLOptions nl;
  /// Nonlinear problems only: shrink shapes until the interpolation matrix
  /// condition number drops below this cap. Off by default.
  std::optional<double> cond_cap;
  double cap_shrink = 0.8;
  /// Smallest total shrink factor the cap may impose.
  double cap_floor = 1e-3;
  /// Boost the shape of the node at a as well as the extra centers.
  bool boost_first_node = false;
  /// Offset of the first extra center below a; defaults to the initial spacing.
  std::optional<double> extra_offset;
  /// Evaluation points for the RMS error.
  int n_ev = 103;
  /// Pseudoinverse cutoff; negative selects the default.
  double rcond = -1.0;

  void validate() const;
};

/// Applies a case's overrides; mu follows n0 and mu_numerator unless given
/// explicitly.
RSAConfig apply_overrides(RSAConfig base, const RSAOverrides& overrides);

struct RSARecord {
  int iteration = 0;
  int dof = 0;
  double max_residual = 0.0;
  double condition = 1.0;
  std::optional<double> rms;
  std::optional<NLReport> nl;
  int added = 0;
  int deleted = 0;
};

enum class RSAStatus { residual_converged, itmax_reached };

std::string to_string(RSAStatus status);

struct RSAReport {
  std::vector<RSARecord> records;
  RSAStatus status = RSAStatus::itmax_reached;
};

/// Auxiliary inputs: exact solution for error reporting, starting guess for
/// nonlinear problems.
struct RSAInputs {
  ScalarFn exact;
  ScalarFn guess;
  /// Called after every completed iteration.
  std::function<void(const RSARecord&)> progress;
};

struct StepResult {
  Interpolant interpolant;
  std::vector<double> nodes;
  RSARecord record;
};

/// (x_j + x_{j+1}) / 2 for consecutive nodes.
std::vector<double> midpoints(std::span<const double> nodes);

/// New node set from midpoint residuals: midpoints with |R_j| > Theta are
/// added, Theta = max(theta_max, max_j |R_j| / eta); interior node i is
/// removed when both flanking residuals are below theta_min. Endpoints are
/// never removed. `added` and `deleted` receive the counts.
std::vector<double> refine_nodes(std::span<const double> nodes, std::span<const double> residuals,
                                 const RSAConfig& config, int* added = nullptr, int* deleted = nullptr);

/// One refinement pass: distribute shapes, solve, measure midpoint residuals,
/// refine. `spacing` places the extra centers below a.
StepResult rsa_step(const DDEProblem& problem, std::span<const double> nodes, const RSAConfig& config,
                    double spacing, const Interpolant* warm = nullptr, const RSAInputs& inputs = {});

/// Refinement aborted by a solver or evaluation error; carries the records
/// completed so far.
class rsa_error : public std::runtime_error {
 public:
  rsa_error(const std::string& what, RSAReport partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const RSAReport& partial() const { return partial_; }

 private:
  RSAReport partial_;
};

struct RSAResult {
  Interpolant interpolant;
  RSAReport report;
};

/// Adaptive solve on [a, b] starting from n0 equispaced nodes.
RSAResult run_rsa(const DDEProblem& problem, const RSAConfig& config, const RSAInputs& inputs = {});

struct Piece {
  double lo = 0.0;
  double hi = 0.0;
  Interpolant interpolant;
  RSAReport report;
};

struct PiecewiseSolution {
  std::vector<Piece> pieces;

  /// Evaluates the piece containing x (pieces are closed on the left).
  double eval(double x, int order = 0) const;
  int total_dof() const;
};

/// Solves subinterval by subinterval, left to right. Each piece runs its own
/// refinement and sees the original history followed by the earlier pieces.
PiecewiseSolution solve_piecewise(const DDEProblem& problem, const std::vector<double>& breakpoints,
                                  const RSAConfig& config, const RSAInputs& inputs = {});

}  // namespace mqdde
