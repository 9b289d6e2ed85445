#pragma once

#include "odt/grid.hpp"

#include <Eigen/Core>

namespace odt {

struct ProxParams {
  double mu = 1.0;  // weight of the TV term
  double rho1 = 1.0;
  double rho2 = 1.0;
  int max_iters = 200;
  double rel_tol = 1e-5;
};

/// Per-pixel forward differences; column 0 along x (columns), column 1
/// along y (rows).
using GradField = Eigen::Array<double, Eigen::Dynamic, 2>;

/// Forward differences with periodic wrap-around.
GradField grad_op(const Eigen::ArrayXd& f, const Grid2D& grid);

/// Transpose of grad_op: <grad_op(f), q> = <f, grad_adjoint(q)>.
Eigen::ArrayXd grad_adjoint(const GradField& q, const Grid2D& grid);

/// Discrete divergence, -grad_adjoint.
Eigen::ArrayXd div_op(const GradField& q, const Grid2D& grid);

/// Isotropic total variation sum_n ||(grad f)_n||_2.
double tv_norm(const Eigen::ArrayXd& f, const Grid2D& grid);

Eigen::ArrayXd prox_nonneg(const Eigen::ArrayXd& q);

/// Row-wise shrinkage q_n (1 - gamma / ||q_n||)_+.
GradField prox_group_l21(const GradField& q, double gamma);

/// Solves ((1 + rho2) I + rho1 grad^T grad) x = rhs by division in the
/// Fourier domain (the periodic Laplacian is circulant).
Eigen::ArrayXd fourier_solve_A(const Eigen::ArrayXd& rhs, double rho1, double rho2, const Grid2D& grid);

/// 0.5 ||f - v||^2 + mu TV(f), ignoring the nonnegativity indicator.
double prox_objective(const Eigen::ArrayXd& f, const Eigen::ArrayXd& v, double mu, const Grid2D& grid);

struct ProxReport {
  Eigen::ArrayXd f;
  int iterations = 0;
  double primal_residual_grad = 0.0;  // ||grad f - q1||
  double primal_residual_id = 0.0;    // ||f - q2||
};

/// argmin_f 0.5 ||f - v||^2 + mu ||grad f||_{2,1} + i_{>=0}(f) by ADMM with
/// the splitting q1 = grad f, q2 = f. The returned f is clamped to f >= 0.
ProxReport prox_R_report(const Eigen::ArrayXd& v, const Grid2D& grid, const ProxParams& params);

inline Eigen::ArrayXd prox_R(const Eigen::ArrayXd& v, const Grid2D& grid, const ProxParams& params) {
  return prox_R_report(v, grid, params).f;
}

}  // namespace odt
