#include "odt/forward.hpp"

#include "odt/linear_solvers.hpp"

#include <cmath>

namespace odt {
namespace {

struct LsOperators {
  const GreenKernel& kernel;
  const ScatteringPotential& f;

  Eigen::ArrayXcd forward(const Eigen::ArrayXcd& u) const {
    ComplexField fu(kernel.grid(), f.values.cast<cplx>() * u);
    return u - kernel.apply(fu).values;
  }
  Eigen::ArrayXcd adjoint(const Eigen::ArrayXcd& u) const {
    ComplexField in(kernel.grid(), u);
    return u - f.values.cast<cplx>() * kernel.apply_adjoint(in).values;
  }
};

ForwardSolveReport to_report(const Grid2D& grid, const LsOperators& ops, const ComplexField& u_in,
                             LinearSolveResult res) {
  ForwardSolveReport rep{ComplexField(grid, std::move(res.x))};
  rep.iterations = res.iterations;
  rep.final_step_change = res.final_step_change;
  rep.converged = res.converged;
  rep.residual_norm = (ops.forward(rep.field.values) - u_in.values).matrix().norm();
  return rep;
}

void check_inputs(const GreenKernel& kernel, const ScatteringPotential& f, const ComplexField& u_in) {
  if (!(f.grid == kernel.grid()) || !(u_in.grid == kernel.grid()))
    throw std::invalid_argument("forward solve: grid mismatch");
}

}  // namespace

ComplexField ls_apply(const GreenKernel& kernel, const ScatteringPotential& f, const ComplexField& u) {
  check_inputs(kernel, f, u);
  return ComplexField(u.grid, LsOperators{kernel, f}.forward(u.values));
}

ComplexField ls_apply_adjoint(const GreenKernel& kernel, const ScatteringPotential& f, const ComplexField& u) {
  check_inputs(kernel, f, u);
  return ComplexField(u.grid, LsOperators{kernel, f}.adjoint(u.values));
}

ForwardSolveReport solve_forward_cg(const GreenKernel& kernel, const ScatteringPotential& f,
                                    const ComplexField& u_in, const SolverBudget& budget,
                                    const IterationObserver& observer) {
  check_inputs(kernel, f, u_in);
  const LsOperators ops{kernel, f};
  auto res = cgnr([&](const Eigen::ArrayXcd& x) { return ops.forward(x); },
                  [&](const Eigen::ArrayXcd& x) { return ops.adjoint(x); }, u_in.values, u_in.values, budget,
                  observer);
  return to_report(kernel.grid(), ops, u_in, std::move(res));
}

ForwardSolveReport solve_forward_nagd(const GreenKernel& kernel, const ScatteringPotential& f,
                                      const ComplexField& u_in, const SolverBudget& budget,
                                      const IterationObserver& observer) {
  check_inputs(kernel, f, u_in);
  const LsOperators ops{kernel, f};
  auto res = nagd([&](const Eigen::ArrayXcd& x) { return ops.forward(x); },
                  [&](const Eigen::ArrayXcd& x) { return ops.adjoint(x); }, u_in.values, u_in.values, budget,
                  observer);
  return to_report(kernel.grid(), ops, u_in, std::move(res));
}

Eigen::VectorXcd measure(const DetectorOperator& detector, const ScatteringPotential& f, const ComplexField& u,
                         const Eigen::VectorXcd& u_in_on_gamma) {
  require_same_grid(f, u);
  if (!(detector.geometry().grid == f.grid)) throw std::invalid_argument("measure: detector grid mismatch");
  if (u_in_on_gamma.size() != detector.rows()) throw std::invalid_argument("measure: detector count mismatch");
  const Eigen::VectorXcd source = (f.values.cast<cplx>() * u.values).matrix();
  return detector.apply(source) + u_in_on_gamma;
}

double relative_error(const ComplexField& u, const ComplexField& u_ref) {
  require_same_grid(u, u_ref);
  const double ref = u_ref.values.matrix().squaredNorm();
  if (ref == 0.0) throw std::invalid_argument("relative_error: zero reference field");
  return (u.values - u_ref.values).matrix().squaredNorm() / ref;
}

cplx plane_wave_at(const Vec2& point, const PhysicsParams& phys, double angle, double source_offset) {
  const Vec2 khat(std::sin(angle), std::cos(angle));
  const Vec2 origin(0.0, -source_offset);
  const double phase = phys.k_bg() * khat.dot(point - origin);
  return std::polar(1.0, phase);
}

ComplexField plane_wave(const Grid2D& grid, const PhysicsParams& phys, double angle, double source_offset) {
  if (!(std::abs(angle) < 0.5 * std::numbers::pi)) throw std::invalid_argument("plane_wave: |angle| must be < pi/2");
  ComplexField u(grid);
  for (Index r = 0; r < grid.n_side(); ++r)
    for (Index c = 0; c < grid.n_side(); ++c) u(r, c) = plane_wave_at(grid.position(r, c), phys, angle, source_offset);
  return u;
}

}  // namespace odt
