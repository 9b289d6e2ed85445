#pragma once

#include "odt/greens.hpp"
#include "odt/grid.hpp"

#include <functional>

namespace odt {

struct SolverBudget {
  int max_iters = 120;
  double rel_change_tol = 1e-4;
};

/// Called after every iteration with the current iterate; returning false
/// stops the solver early.
using IterationObserver = std::function<bool(int iteration, const Eigen::ArrayXcd& iterate)>;

struct ForwardSolveReport {
  ComplexField field;
  int iterations = 0;
  double final_step_change = 0.0;  // ||u^k - u^{k-1}|| / ||u^{k-1}||
  double residual_norm = 0.0;      // ||A(f) u - u_in||
  bool converged = false;
};

/// A(f) u = u - G (f .* u)
ComplexField ls_apply(const GreenKernel& kernel, const ScatteringPotential& f, const ComplexField& u);

/// A(f)^H u = u - f .* (G^H u)
ComplexField ls_apply_adjoint(const GreenKernel& kernel, const ScatteringPotential& f, const ComplexField& u);

/// Least-squares forward solve min ||A(f) u - u_in|| by conjugate gradient
/// on the normal equations, started from u_in.
ForwardSolveReport solve_forward_cg(const GreenKernel& kernel, const ScatteringPotential& f,
                                    const ComplexField& u_in, const SolverBudget& budget,
                                    const IterationObserver& observer = {});

/// Same problem by Nesterov accelerated gradient descent. The step starts at
/// 1/L with L from 10 power iterations on A^H A; whenever the objective
/// increases the step is halved and the momentum restarted.
ForwardSolveReport solve_forward_nagd(const GreenKernel& kernel, const ScatteringPotential& f,
                                      const ComplexField& u_in, const SolverBudget& budget,
                                      const IterationObserver& observer = {});

/// y = G~ (f .* u) + u_in|Gamma
Eigen::VectorXcd measure(const DetectorOperator& detector, const ScatteringPotential& f, const ComplexField& u,
                         const Eigen::VectorXcd& u_in_on_gamma);

/// ||u - u_ref||^2 / ||u_ref||^2
double relative_error(const ComplexField& u, const ComplexField& u_ref);

/// Unit plane wave exp(i k_bg khat . (x - x0)) with khat = (sin angle, cos angle)
/// and phase origin x0 = (0, -source_offset).
cplx plane_wave_at(const Vec2& point, const PhysicsParams& phys, double angle, double source_offset);
ComplexField plane_wave(const Grid2D& grid, const PhysicsParams& phys, double angle, double source_offset);

}  // namespace odt
