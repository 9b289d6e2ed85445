#include "odt/forward.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace odt;
using testutil::rel;

namespace {

const PhysicsParams kPhys(1.333);

ScatteringPotential random_potential(const Grid2D& g, double contrast_level, std::uint64_t seed) {
  const double fmax = contrast_level * kPhys.k0() * kPhys.k0() * kPhys.n_b() * kPhys.n_b();
  return ScatteringPotential(g, fmax * testutil::random_real(g.size(), seed, 0.0, 1.0));
}

Eigen::MatrixXcd dense_A(const Grid2D& g, const ScatteringPotential& f) {
  const Eigen::MatrixXcd G = testutil::dense_green(g, kPhys.k_bg());
  return Eigen::MatrixXcd::Identity(g.size(), g.size()) - G * f.values.cast<cplx>().matrix().asDiagonal();
}

}  // namespace

TEST_CASE("ls operator and its adjoint against dense matrices") {
  for (Index n : {8, 16}) {
    const Grid2D g(n, 0.125 * static_cast<double>(n));
    const GreenKernel kernel(g, kPhys);
    const ScatteringPotential f = random_potential(g, 0.3, 21);
    const Eigen::MatrixXcd A = dense_A(g, f);
    const ComplexField u(g, testutil::random_complex(g.size(), 22));
    CHECK(rel(ls_apply(kernel, f, u).values, (A * u.values.matrix()).array()) < 1e-10);
    CHECK(rel(ls_apply_adjoint(kernel, f, u).values, (A.adjoint() * u.values.matrix()).array()) < 1e-10);

    const ComplexField w(g, testutil::random_complex(g.size(), 23));
    const cplx lhs = ls_apply(kernel, f, u).values.matrix().dot(w.values.matrix());
    const cplx rhs = u.values.matrix().dot(ls_apply_adjoint(kernel, f, w).values.matrix());
    CHECK(std::abs(lhs - rhs) / std::abs(lhs) < 1e-10);
  }
}

TEST_CASE("trivial potentials") {
  const Grid2D g(16, 2.0);
  const GreenKernel kernel(g, kPhys);
  const ScatteringPotential zero(g);
  const ComplexField u(g, testutil::random_complex(g.size(), 3));
  CHECK((ls_apply(kernel, zero, u).values == u.values).all());
  CHECK((ls_apply_adjoint(kernel, zero, u).values == u.values).all());
  const ScatteringPotential f = random_potential(g, 0.2, 4);
  CHECK(ls_apply(kernel, f, ComplexField(g)).values.abs().maxCoeff() == 0.0);

  const ComplexField u_in = plane_wave(g, kPhys, 0.3, 5.0);
  const ForwardSolveReport cg = solve_forward_cg(kernel, zero, u_in, {120, 1e-4});
  CHECK(cg.iterations == 1);
  CHECK(rel(cg.field.values, u_in.values) < 1e-15);
  const ForwardSolveReport nagd = solve_forward_nagd(kernel, zero, u_in, {120, 1e-4});
  CHECK(nagd.iterations <= 5);
  CHECK(rel(nagd.field.values, u_in.values) < 1e-4);
}

TEST_CASE("CG matches a dense least-squares solve") {
  const Grid2D g(16, 2.0);
  const GreenKernel kernel(g, kPhys);
  const ScatteringPotential f = random_potential(g, 0.3, 31);
  const ComplexField u_in = plane_wave(g, kPhys, -0.4, 3.0);
  const Eigen::VectorXcd ref = dense_A(g, f).colPivHouseholderQr().solve(u_in.values.matrix());
  const ForwardSolveReport rep = solve_forward_cg(kernel, f, u_in, {2000, 1e-12});
  CHECK(rep.converged);
  CHECK(rel(rep.field.values, ref.array()) < 1e-6);
}

TEST_CASE("CG residual is monotone and both solvers satisfy the residual bound") {
  const Grid2D g(32, 4.0);
  const GreenKernel kernel(g, kPhys);
  RefractiveMap n(g);
  for (Index i = 0; i < g.size(); ++i) n.values(i) = g.position(i / 32, i % 32).norm() < 1.0 ? 1.5 : 1.333;
  const ScatteringPotential f = potential_from_ri(n, kPhys);
  const ComplexField u_in = plane_wave(g, kPhys, 0.0, 8.0);

  std::vector<double> residuals;
  const SolverBudget budget{500, 1e-5};
  const ForwardSolveReport cg = solve_forward_cg(kernel, f, u_in, budget, [&](int, const Eigen::ArrayXcd& u) {
    residuals.push_back((ls_apply(kernel, f, ComplexField(g, u)).values - u_in.values).matrix().norm());
    return true;
  });
  for (size_t i = 1; i < residuals.size(); ++i) CHECK(residuals[i] <= residuals[i - 1] * (1.0 + 1e-12));
  CHECK(cg.converged);
  CHECK(cg.residual_norm / u_in.values.matrix().norm() <= 10.0 * budget.rel_change_tol);

  const ForwardSolveReport nagd = solve_forward_nagd(kernel, f, u_in, {3000, 1e-5});
  CHECK(nagd.converged);
  CHECK(nagd.residual_norm / u_in.values.matrix().norm() <= 10.0 * budget.rel_change_tol);
  CHECK(nagd.iterations >= cg.iterations);
}

TEST_CASE("mirror symmetry of a centred object at normal incidence") {
  const Grid2D g(32, 4.0);
  const GreenKernel kernel(g, kPhys);
  RefractiveMap n(g);
  for (Index r = 0; r < 32; ++r)
    for (Index c = 0; c < 32; ++c) n(r, c) = std::abs(g.x(c)) < 0.9 && std::abs(g.y(r) - 0.3) < 0.5 ? 1.45 : 1.333;
  const ScatteringPotential f = potential_from_ri(n, kPhys);
  const ForwardSolveReport rep = solve_forward_cg(kernel, f, plane_wave(g, kPhys, 0.0, 8.0), {500, 1e-10});
  double worst = 0.0;
  for (Index r = 0; r < 32; ++r)
    for (Index c = 0; c < 32; ++c) worst = std::max(worst, std::abs(rep.field(r, c) - rep.field(r, 31 - c)));
  CHECK(worst < 1e-8);
}

TEST_CASE("plane wave") {
  const Grid2D g(16, 2.0);
  const ComplexField u = plane_wave(g, kPhys, 0.0, 3.0);
  CHECK((u.values.abs() - 1.0).abs().maxCoeff() < 1e-14);
  for (Index c = 1; c < 16; ++c) CHECK(std::abs(u(4, c) - u(4, 0)) < 1e-12);
  const cplx step = std::exp(cplx(0.0, kPhys.k_bg() * g.pixel()));
  CHECK(std::abs(u(5, 2) / u(4, 2) - step) < 1e-12);
  // phase origin sits on the source line below the centre
  CHECK(std::abs(plane_wave_at(Vec2(0.0, -3.0), kPhys, 0.4, 3.0) - 1.0) < 1e-14);
  CHECK_THROWS(plane_wave(g, kPhys, std::numbers::pi / 2, 3.0));
}

TEST_CASE("measurement and relative error") {
  const Grid2D g(8, 1.0);
  const GreenKernel kernel(g, kPhys);
  const DetectorOperator det = build_detector_operator({{Vec2(0.1, 2.0), Vec2(-0.3, -2.0)}, g}, kPhys);
  const ComplexField u(g, testutil::random_complex(g.size(), 5));
  const Eigen::VectorXcd inc = testutil::random_complex(2, 6).matrix();
  CHECK((measure(det, ScatteringPotential(g), u, inc) - inc).norm() == 0.0);

  const ScatteringPotential f = random_potential(g, 0.2, 7);
  const ScatteringPotential f3(g, 3.0 * f.values);
  const Eigen::VectorXcd s1 = measure(det, f, u, inc) - inc;
  const Eigen::VectorXcd s3 = measure(det, f3, u, inc) - inc;
  CHECK((s3 - 3.0 * s1).norm() < 1e-12 * s3.norm());
  CHECK_THROWS(measure(det, f, u, Eigen::VectorXcd::Zero(3)));

  CHECK(relative_error(u, u) == 0.0);
  CHECK(relative_error(ComplexField(g), u) == doctest::Approx(1.0));
  CHECK(relative_error(ComplexField(g, 1.1 * u.values), u) == doctest::Approx(0.01));
  CHECK_THROWS(relative_error(u, ComplexField(g)));
}
