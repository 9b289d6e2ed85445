#include "odt/prox_tv.hpp"

#include "odt/errors.hpp"
#include "odt/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace odt {

GradField grad_op(const Eigen::ArrayXd& f, const Grid2D& grid) {
  const Index n = grid.n_side();
  if (f.size() != grid.size()) throw std::invalid_argument("grad_op: size mismatch");
  GradField g(grid.size(), 2);
  for (Index r = 0; r < n; ++r) {
    const Index rn = (r + 1) % n;
    for (Index c = 0; c < n; ++c) {
      const Index cn = (c + 1) % n;
      const double here = f(r * n + c);
      g(r * n + c, 0) = f(r * n + cn) - here;
      g(r * n + c, 1) = f(rn * n + c) - here;
    }
  }
  return g;
}

Eigen::ArrayXd grad_adjoint(const GradField& q, const Grid2D& grid) {
  const Index n = grid.n_side();
  if (q.rows() != grid.size()) throw std::invalid_argument("grad_adjoint: size mismatch");
  Eigen::ArrayXd out(grid.size());
  for (Index r = 0; r < n; ++r) {
    const Index rp = (r + n - 1) % n;
    for (Index c = 0; c < n; ++c) {
      const Index cp = (c + n - 1) % n;
      out(r * n + c) = q(r * n + cp, 0) - q(r * n + c, 0) + q(rp * n + c, 1) - q(r * n + c, 1);
    }
  }
  return out;
}

Eigen::ArrayXd div_op(const GradField& q, const Grid2D& grid) { return -grad_adjoint(q, grid); }

double tv_norm(const Eigen::ArrayXd& f, const Grid2D& grid) {
  return grad_op(f, grid).square().rowwise().sum().sqrt().sum();
}

Eigen::ArrayXd prox_nonneg(const Eigen::ArrayXd& q) { return q.max(0.0); }

GradField prox_group_l21(const GradField& q, double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("prox_group_l21: gamma must be nonnegative");
  const Eigen::ArrayXd norms = q.square().rowwise().sum().sqrt();
  Eigen::ArrayXd scale = Eigen::ArrayXd::Zero(norms.size());
  for (Index i = 0; i < norms.size(); ++i)
    if (norms(i) > gamma) scale(i) = 1.0 - gamma / norms(i);
  GradField out(q.rows(), 2);
  out.col(0) = q.col(0) * scale;
  out.col(1) = q.col(1) * scale;
  return out;
}

Eigen::ArrayXd fourier_solve_A(const Eigen::ArrayXd& rhs, double rho1, double rho2, const Grid2D& grid) {
  if (!(rho1 > 0.0) || !(rho2 > 0.0)) throw std::invalid_argument("fourier_solve_A: rho must be positive");
  const Index n = grid.n_side();
  if (rhs.size() != grid.size()) throw std::invalid_argument("fourier_solve_A: size mismatch");

  Eigen::ArrayXd eig1d(n);
  for (Index k = 0; k < n; ++k) eig1d(k) = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / static_cast<double>(n));

  Eigen::ArrayXcd buf = rhs.cast<cplx>();
  const auto fft = Fft2d::get(n);
  const std::span<cplx> view(buf.data(), static_cast<size_t>(buf.size()));
  fft->forward(view);
  const double norm = static_cast<double>(n * n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) buf(r * n + c) /= norm * ((1.0 + rho2) + rho1 * (eig1d(r) + eig1d(c)));
  fft->inverse(view);
  return buf.real();
}

double prox_objective(const Eigen::ArrayXd& f, const Eigen::ArrayXd& v, double mu, const Grid2D& grid) {
  return 0.5 * (f - v).square().sum() + mu * tv_norm(f, grid);
}

ProxReport prox_R_report(const Eigen::ArrayXd& v, const Grid2D& grid, const ProxParams& params) {
  if (!(params.mu > 0.0) || !(params.rho1 > 0.0) || !(params.rho2 > 0.0) || params.max_iters < 1)
    throw std::invalid_argument("prox_R: invalid parameters");
  if (v.size() != grid.size()) throw std::invalid_argument("prox_R: size mismatch");
  const double rho1 = params.rho1;
  const double rho2 = params.rho2;

  // Initialisation: f^0 = v, q1 = grad f^0, q2 = f^0, w1 = q1, w2 = q2.
  Eigen::ArrayXd f = v;
  GradField q1 = grad_op(f, grid);
  Eigen::ArrayXd q2 = f;
  GradField w1 = q1;
  Eigen::ArrayXd w2 = q2;

  ProxReport rep;
  for (int k = 1; k <= params.max_iters; ++k) {
    rep.iterations = k;
    const GradField grad_f = grad_op(f, grid);
    q1 = prox_group_l21(grad_f + w1 / rho1, params.mu / rho1);
    q2 = prox_nonneg(f + w2 / rho2);

    const Eigen::ArrayXd rhs = v + rho1 * grad_adjoint(q1 - w1 / rho1, grid) + rho2 * q2 - w2;
    Eigen::ArrayXd f_next = fourier_solve_A(rhs, rho1, rho2, grid);
    if (!f_next.allFinite()) throw NumericError("prox_R: non-finite iterate");

    const GradField grad_next = grad_op(f_next, grid);
    w1 += rho1 * (grad_next - q1);
    w2 += rho2 * (f_next - q2);

    const double prev_norm = f.matrix().norm();
    const double change = (f_next - f).matrix().norm() / (prev_norm > 0.0 ? prev_norm : 1.0);
    f = std::move(f_next);
    rep.primal_residual_grad = (grad_next - q1).matrix().norm();
    rep.primal_residual_id = (f - q2).matrix().norm();
    if (change < params.rel_tol) break;
  }
  rep.f = f.max(0.0);
  return rep;
}

}  // namespace odt
