#pragma once

#include "odt/errors.hpp"
#include "odt/forward.hpp"

#include <Eigen/Core>

#include <cmath>
#include <string>

namespace odt {

struct LinearSolveResult {
  Eigen::ArrayXcd x;
  int iterations = 0;
  double final_step_change = 0.0;
  bool converged = false;
};

namespace detail {

inline double norm(const Eigen::ArrayXcd& a) { return a.matrix().norm(); }

inline void check_finite(double value, const char* where) {
  if (!std::isfinite(value)) throw NumericError(std::string(where) + ": non-finite value encountered");
}

}  // namespace detail

/// Conjugate gradient on the normal equations A^H A x = A^H b (CGLS form).
/// `op` and `op_adjoint` map Eigen::ArrayXcd -> Eigen::ArrayXcd. Stops when
/// the relative change between iterates drops below the tolerance, when the
/// normal-equation gradient vanishes, or on the iteration budget.
template <typename Op, typename OpAdjoint>
LinearSolveResult cgnr(const Op& op, const OpAdjoint& op_adjoint, const Eigen::ArrayXcd& b,
                       Eigen::ArrayXcd x0, const SolverBudget& budget, const IterationObserver& observer = {}) {
  LinearSolveResult res;
  res.x = std::move(x0);
  Eigen::ArrayXcd r = b - op(res.x);
  Eigen::ArrayXcd s = op_adjoint(r);
  Eigen::ArrayXcd p = s;
  double gamma = s.matrix().squaredNorm();
  detail::check_finite(gamma, "cgnr");

  for (int k = 1; k <= budget.max_iters; ++k) {
    res.iterations = k;
    if (gamma == 0.0) {
      res.final_step_change = 0.0;
      res.converged = true;
      if (observer) observer(k, res.x);
      break;
    }
    const Eigen::ArrayXcd q = op(p);
    const double qq = q.matrix().squaredNorm();
    detail::check_finite(qq, "cgnr");
    if (qq == 0.0) {
      res.converged = true;
      break;
    }
    const double alpha = gamma / qq;
    const double prev_norm = detail::norm(res.x);
    res.x += alpha * p;
    r -= alpha * q;
    res.final_step_change = alpha * detail::norm(p) / (prev_norm > 0.0 ? prev_norm : 1.0);
    detail::check_finite(res.final_step_change, "cgnr");

    const bool keep_going = !observer || observer(k, res.x);
    if (res.final_step_change < budget.rel_change_tol) {
      res.converged = true;
      break;
    }
    if (!keep_going) break;

    s = op_adjoint(r);
    const double gamma_next = s.matrix().squaredNorm();
    detail::check_finite(gamma_next, "cgnr");
    p = s + (gamma_next / gamma) * p;
    gamma = gamma_next;
  }
  return res;
}

/// Nesterov accelerated gradient on 0.5 ||A x - b||^2. Each iteration costs
/// one application of A and one of A^H: A y is formed by linearity from the
/// stored images of the last two iterates.
template <typename Op, typename OpAdjoint>
LinearSolveResult nagd(const Op& op, const OpAdjoint& op_adjoint, const Eigen::ArrayXcd& b, Eigen::ArrayXcd x0,
                       const SolverBudget& budget, const IterationObserver& observer = {}) {
  // Lipschitz constant of the gradient, ||A^H A||, by power iteration.
  double lip = 0.0;
  {
    Eigen::ArrayXcd v = b;
    double nv = detail::norm(v);
    if (nv == 0.0) {
      v = Eigen::ArrayXcd::Ones(b.size());
      nv = detail::norm(v);
    }
    v /= nv;
    for (int i = 0; i < 10; ++i) {
      Eigen::ArrayXcd w = op_adjoint(op(v));
      lip = detail::norm(w);
      detail::check_finite(lip, "nagd");
      if (lip == 0.0) break;
      v = w / lip;
    }
  }

  LinearSolveResult res;
  res.x = std::move(x0);
  Eigen::ArrayXcd ax = op(res.x);
  double objective = 0.5 * (ax - b).matrix().squaredNorm();
  if (lip == 0.0) {
    res.converged = true;
    return res;
  }
  double step = 1.0 / lip;
  Eigen::ArrayXcd x_prev = res.x;
  Eigen::ArrayXcd ax_prev = ax;
  double t = 1.0;

  for (int k = 1; k <= budget.max_iters; ++k) {
    res.iterations = k;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    const Eigen::ArrayXcd y = res.x + beta * (res.x - x_prev);
    const Eigen::ArrayXcd ay = ax + beta * (ax - ax_prev);
    const Eigen::ArrayXcd grad = op_adjoint(ay - b);
    Eigen::ArrayXcd x_new = y - step * grad;
    Eigen::ArrayXcd ax_new = op(x_new);
    const double objective_new = 0.5 * (ax_new - b).matrix().squaredNorm();
    detail::check_finite(objective_new, "nagd");

    if (objective_new > objective) {
      // Reject, shrink the step and restart the momentum from the current point.
      step *= 0.5;
      t = 1.0;
      x_prev = res.x;
      ax_prev = ax;
      res.final_step_change = 0.0;
      if (observer && !observer(k, res.x)) break;
      continue;
    }

    const double prev_norm = detail::norm(res.x);
    res.final_step_change = detail::norm(x_new - res.x) / (prev_norm > 0.0 ? prev_norm : 1.0);
    x_prev = std::move(res.x);
    ax_prev = std::move(ax);
    res.x = std::move(x_new);
    ax = std::move(ax_new);
    objective = objective_new;
    t = t_next;

    const bool keep_going = !observer || observer(k, res.x);
    if (res.final_step_change < budget.rel_change_tol) {
      res.converged = true;
      break;
    }
    if (!keep_going) break;
  }
  return res;
}

}  // namespace odt
