#include "mqdde/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mqdde/collocation.hpp"
#include "mqdde/errors.hpp"
#include "mqdde/linsolve.hpp"

namespace mqdde {

std::string to_string(NLStatus status) {
  switch (status) {
    case NLStatus::converged:
      return "converged";
    case NLStatus::max_iters:
      return "max-iters";
    case NLStatus::stalled:
      return "stalled";
  }
  return "unknown";
}

VectorFn assemble_F(const GeneralDDE& problem, const MQBasis& basis) {
  basis.validate();
  return [problem, basis](const Eigen::VectorXd& alpha) {
    const Interpolant y(basis, alpha);
    const SolutionFn current = [&y](double t, int order) { return y.eval(t, order); };
    const auto nodes = basis.nodes();
    const int m = problem.order;
    const double band = history_band(problem);
    Eigen::VectorXd F(static_cast<Eigen::Index>(nodes.size()) + m);
    for (int k = 0; k < m; ++k) {
      F(k) = y.eval(problem.a, k) - problem.history.eval(problem.a, k);
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      double value;
      try {
        value = problem.residual(StateLookup(nodes[i].position, problem.a, current, problem.history, band));
      } catch (const domain_error&) {
        value = std::numeric_limits<double>::quiet_NaN();
      }
      F(m + static_cast<Eigen::Index>(i)) = value;
    }
    return F;
  };
}

namespace {

// One value of the current approximation read by G.
struct Slot {
  double t;
  int order;
  double value;
};

// Evaluates G at x while recording every read of the current approximation.
// If `bump` names a slot, that read returns its recorded value plus `delta`;
// `reads` receives the number of reads, which changes when a delayed argument
// moves between the history and the solution.
double residual_with_slots(const GeneralDDE& problem, const Interpolant& y, double x,
                           std::vector<Slot>& slots, int bump, double delta, std::size_t& reads) {
  std::size_t count = 0;
  const bool record = bump < 0;
  const SolutionFn current = [&](double t, int order) {
    const std::size_t idx = count++;
    if (record) {
      const double v = y.eval(t, order);
      slots.push_back({t, order, v});
      return v;
    }
    if (static_cast<int>(idx) == bump) return slots[idx].value + delta;
    return y.eval(t, order);
  };
  const double g = problem.residual(StateLookup(x, problem.a, current, problem.history, history_band(problem)));
  reads = count;
  return g;
}

}  // namespace

JacobianFn assemble_jacobian(const GeneralDDE& problem, const MQBasis& basis) {
  basis.validate();
  return [problem, basis](const Eigen::VectorXd& alpha) {
    const Interpolant y(basis, alpha);
    const auto nodes = basis.nodes();
    const auto n = static_cast<Eigen::Index>(basis.size());
    const int m = problem.order;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nodes.size()) + m, n);
    auto add_basis_row = [&](Eigen::Index row, double weight, double t, int order) {
      for (Eigen::Index j = 0; j < n; ++j) {
        J(row, j) += weight * mq_derivative(t, basis.centers[static_cast<std::size_t>(j)], order);
      }
    };
    for (int k = 0; k < m; ++k) add_basis_row(k, 1.0, problem.a, k);

    const double step = std::cbrt(std::numeric_limits<double>::epsilon());
    std::vector<Slot> slots;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const Eigen::Index row = m + static_cast<Eigen::Index>(i);
      const double x = nodes[i].position;
      slots.clear();
      try {
        std::size_t reads = 0;
        const double g0 = residual_with_slots(problem, y, x, slots, -1, 0.0, reads);
        const std::size_t n_slots = slots.size();
        for (std::size_t s = 0; s < n_slots; ++s) {
          const double h = step * std::max(1.0, std::abs(slots[s].value));
          const int bump = static_cast<int>(s);
          std::size_t reads_up = 0, reads_down = 0;
          const double up = residual_with_slots(problem, y, x, slots, bump, h, reads_up);
          const double down = residual_with_slots(problem, y, x, slots, bump, -h, reads_down);
          // A bump that switches a delayed read between history and solution
          // crosses a jump in G; difference on the side that does not.
          const bool up_ok = reads_up == n_slots;
          const bool down_ok = reads_down == n_slots;
          double partial = 0.0;
          if (up_ok && down_ok) {
            partial = (up - down) / (2.0 * h);
          } else if (up_ok) {
            partial = (up - g0) / h;
          } else if (down_ok) {
            partial = (g0 - down) / h;
          }
          add_basis_row(row, partial, slots[s].t, slots[s].order);
        }
      } catch (const domain_error& e) {
        throw domain_error("assemble_jacobian: residual evaluation failed at node x = " +
                           std::to_string(x) + ": " + e.what());
      }
    }
    return J;
  };
}

Eigen::MatrixXd fd_jacobian(const VectorFn& F, const Eigen::VectorXd& x, double fd_step) {
  const Eigen::VectorXd f0 = F(x);
  if (!f0.allFinite()) throw domain_error("fd_jacobian: residual is not finite at the base point");
  Eigen::MatrixXd J(f0.size(), x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double h = fd_step * std::max(1.0, std::abs(x(k)));
    xp(k) = x(k) + h;
    // Use the representable step actually taken.
    const double dk = xp(k) - x(k);
    const Eigen::VectorXd fk = F(xp);
    xp(k) = x(k);
    if (!fk.allFinite()) {
      throw domain_error("fd_jacobian: residual evaluation failed when perturbing column " +
                         std::to_string(k));
    }
    J.col(k) = (fk - f0) / dk;
  }
  return J;
}

NLResult dogleg_solve(const VectorFn& F, const Eigen::VectorXd& x0, const NLOptions& opts,
                      const JacobianFn& jacobian) {
  if (opts.max_iters < 1 || !(opts.f_tol > 0.0) || !(opts.step_tol > 0.0) || !(opts.initial_radius > 0.0) ||
      !(opts.fd_step > 0.0)) {
    throw invalid_input("dogleg_solve: options must be positive");
  }

  NLResult out;
  out.x = x0;
  Eigen::VectorXd f = F(out.x);
  if (!f.allFinite()) throw domain_error("dogleg_solve: residual is not finite at the initial guess");
  double fnorm = f.norm();
  const double target = opts.f_tol * (1.0 + fnorm);
  // Set once the first Gauss-Newton step is known.
  double radius = -1.0;

  auto& rep = out.report;
  rep.final_norm = fnorm;
  if (fnorm <= target) {
    rep.status = NLStatus::converged;
    return out;
  }

  Eigen::MatrixXd J;
  Eigen::VectorXd gn_step;
  Eigen::VectorXd grad;
  bool refresh = true;

  while (rep.iterations < opts.max_iters) {
    ++rep.iterations;
    if (refresh) {
      J = jacobian ? jacobian(out.x) : fd_jacobian(F, out.x, opts.fd_step);
      SolveResult gn = pseudo_solve(J, -f);
      gn_step = std::move(gn.x);
      rep.condition = gn.info.condition;
      grad = J.transpose() * f;
      refresh = false;
      if (radius < 0.0) {
        // Coefficients of flat multiquadrics are large; an absolute radius would
        // need dozens of expansions before the first full step.
        radius = opts.initial_radius * std::max({1.0, out.x.norm(), gn_step.norm()});
      }
    }

    // Dogleg step inside the trust region.
    Eigen::VectorXd step;
    const double gn_norm = gn_step.norm();
    if (gn_norm <= radius) {
      step = gn_step;
    } else {
      const double gnorm = grad.norm();
      const double jg = (J * grad).squaredNorm();
      if (gnorm == 0.0 || jg == 0.0) {
        step = gn_step * (radius / gn_norm);
      } else {
        const Eigen::VectorXd cauchy = -(gnorm * gnorm / jg) * grad;
        const double cnorm = cauchy.norm();
        if (cnorm >= radius) {
          step = cauchy * (radius / cnorm);
        } else {
          // Largest t in [0, 1] with |cauchy + t (gn - cauchy)| = radius.
          const Eigen::VectorXd d = gn_step - cauchy;
          const double aa = d.squaredNorm();
          const double bb = 2.0 * cauchy.dot(d);
          const double cc = cnorm * cnorm - radius * radius;
          const double t = (-bb + std::sqrt(bb * bb - 4.0 * aa * cc)) / (2.0 * aa);
          step = cauchy + t * d;
        }
      }
    }

    const double step_norm = step.norm();
    const double predicted = fnorm * fnorm - (f + J * step).squaredNorm();
    const Eigen::VectorXd trial_x = out.x + step;
    const Eigen::VectorXd trial_f = F(trial_x);
    const double trial_norm = trial_f.allFinite() ? trial_f.norm() : std::numeric_limits<double>::infinity();
    const double actual = fnorm * fnorm - trial_norm * trial_norm;
    const double ratio = predicted > 0.0 ? actual / predicted : -1.0;

    if (ratio < 0.25) {
      radius = 0.25 * std::min(radius, step_norm);
    } else if (ratio >= 0.75) {
      radius = std::max(radius, 2.0 * step_norm);
    }

    if (ratio > 0.0 && trial_norm < fnorm) {
      out.x = trial_x;
      f = trial_f;
      fnorm = trial_norm;
      rep.final_norm = fnorm;
      refresh = true;
      if (fnorm <= target) {
        rep.status = NLStatus::converged;
        return out;
      }
    }

    if (radius < opts.step_tol * (1.0 + out.x.norm()) || predicted <= 0.0) {
      rep.status = NLStatus::stalled;
      return out;
    }
  }
  rep.status = NLStatus::max_iters;
  return out;
}

}  // namespace mqdde
