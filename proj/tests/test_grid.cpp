#include "odt/grid.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <limits>

using namespace odt;

TEST_CASE("grid geometry uses pixel centres") {
  const Grid2D g(4, 2.0);
  CHECK(g.pixel() == doctest::Approx(0.5));
  CHECK(g.x(0) == doctest::Approx(-0.75));
  CHECK(g.y(3) == doctest::Approx(0.75));
  CHECK(g.index(1, 2) == 6);
  CHECK_THROWS(Grid2D(1, 1.0));
  CHECK_THROWS(Grid2D(4, 0.0));
}

TEST_CASE("physics parameters") {
  const PhysicsParams p(1.333, 1.0);
  CHECK(p.k0() == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(p.k_bg() == doctest::Approx(2.0 * std::numbers::pi * 1.333));
  CHECK_THROWS(PhysicsParams(0.9, 1.0));
  CHECK_THROWS(PhysicsParams(1.333, 0.0));
}

TEST_CASE("potential from refractive index") {
  const Grid2D g(8, 4.0);
  const PhysicsParams phys;
  RefractiveMap n(g);
  n.values.setConstant(1.333);
  CHECK(potential_from_ri(n, phys).values.abs().maxCoeff() == 0.0);

  n(2, 3) = 1.457;
  const ScatteringPotential f = potential_from_ri(n, phys);
  const double k0sq = 4.0 * std::numbers::pi * std::numbers::pi;
  CHECK(f(2, 3) == doctest::Approx(k0sq * (1.457 * 1.457 - 1.333 * 1.333)).epsilon(1e-14));
  CHECK(f(2, 3) == doctest::Approx(13.658).epsilon(1e-4));
  CHECK(contrast(f, phys) == doctest::Approx((1.457 * 1.457 - 1.333 * 1.333) / (1.333 * 1.333)));
  CHECK(contrast(f, phys) == doctest::Approx(0.1947).epsilon(1e-3));

  n(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(potential_from_ri(n, phys));
}

TEST_CASE("refractive index round trip") {
  const Grid2D g(16, 4.0);
  const PhysicsParams phys(1.333);
  RefractiveMap n(g, 1.333 + 0.6 * testutil::random_real(g.size(), 5, 0.0, 1.0));
  const RefractiveMap back = ri_from_potential(potential_from_ri(n, phys), phys);
  CHECK(((back.values - n.values).abs() / n.values).maxCoeff() < 1e-12);
}

TEST_CASE("contrast of a bead with n = 1.88") {
  const Grid2D g(4, 1.0);
  const PhysicsParams phys(1.333);
  RefractiveMap n(g);
  n.values.setConstant(1.333);
  n(1, 1) = 1.88;
  CHECK(contrast(potential_from_ri(n, phys), phys) == doctest::Approx(0.9893).epsilon(1e-3));
}

TEST_CASE("contrast is sign invariant and linear") {
  const Grid2D g(8, 2.0);
  const PhysicsParams phys;
  ScatteringPotential f(g, testutil::random_real(g.size(), 3));
  const double c = contrast(f, phys);
  ScatteringPotential neg(g, -f.values);
  ScatteringPotential twice(g, 2.0 * f.values);
  CHECK(contrast(neg, phys) == doctest::Approx(c));
  CHECK(contrast(twice, phys) == doctest::Approx(2.0 * c));
  CHECK(contrast(ScatteringPotential(g), phys) == 0.0);
}

TEST_CASE("snr in decibels") {
  const Grid2D g(2, 1.0);
  Eigen::ArrayXd t(4), e(4);
  t << 3, 4, 0, 0;
  e << 3, 4.5, 0, 0;
  const ScatteringPotential truth(g, t), est(g, e);
  CHECK(snr_db(est, truth) == doctest::Approx(20.0));
  CHECK(std::isinf(snr_db(truth, truth)));
  CHECK(snr_db(ScatteringPotential(g), truth) == doctest::Approx(0.0));
  CHECK_THROWS(snr_db(truth, ScatteringPotential(g)));

  const ScatteringPotential est3(g, -3.0 * e), truth3(g, -3.0 * t);
  CHECK(snr_db(est3, truth3) == doctest::Approx(20.0));
  const ScatteringPotential est_s(g, e + 1.0), truth_s(g, t + 1.0);
  CHECK(snr_db(est_s, truth_s) != doctest::Approx(20.0));
}
