#include "odt/errors.hpp"
#include "odt/greens.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace odt;
using testutil::rel;

namespace {
const PhysicsParams kPhys(1.333);
}

TEST_CASE("green function uses the i/4 normalisation") {
  const double k = kPhys.k_bg();
  CHECK(std::abs(green_function(1.0, k) - cplx(0.0, 0.25) * testutil::hankel0_std(k)) < 1e-12);
  CHECK(k == doctest::Approx(8.37548).epsilon(1e-6));
}

TEST_CASE("self cell average matches quadrature over the disc") {
  for (double h : {0.02, 0.0625, 0.125, 0.2}) {
    const double k = kPhys.k_bg();
    const cplx closed = green_self_average(h, k);
    const cplx quad = testutil::self_average_quadrature(h, k);
    CHECK(std::abs(closed - quad) / std::abs(quad) < 1e-4);
  }
}

TEST_CASE("kernel samples and symmetry") {
  const Grid2D g(16, 2.0);
  const GreenKernel kernel(g, kPhys);
  CHECK(kernel.padded_n() == 32);
  CHECK(kernel.padded_spectrum().size() == 32 * 32);
  CHECK(kernel.padded_spectrum().allFinite());
  const double r = g.pixel() * std::hypot(3.0, 4.0);
  CHECK(std::abs(kernel.sample(3, 4) - g.pixel_area() * testutil::green_std(r, kPhys.k_bg())) < 1e-12);
  for (Index di = -5; di <= 5; ++di)
    for (Index dj = -5; dj <= 5; ++dj) {
      CHECK(kernel.sample(di, dj) == kernel.sample(-di, -dj));
      CHECK(kernel.sample(di, dj) == kernel.sample(dj, di));
    }
  CHECK(kernel.sample(0, 0) == g.pixel_area() * green_self_average(g.pixel(), kPhys.k_bg()));
  CHECK_FALSE(kernel.undersampled());
  CHECK(GreenKernel(Grid2D(8, 8.0), kPhys).undersampled());
}

TEST_CASE("convolution equals the dense matrix") {
  for (Index n : {8, 16}) {
    const Grid2D g(n, 0.15 * static_cast<double>(n));
    const GreenKernel kernel(g, kPhys);
    const Eigen::MatrixXcd dense = testutil::dense_green(g, kPhys.k_bg());
    const ComplexField v(g, testutil::random_complex(g.size(), 11));
    const Eigen::ArrayXcd ref = (dense * v.values.matrix()).array();
    CHECK(rel(apply_G(kernel, v).values, ref) < 1e-10);
    const Eigen::ArrayXcd ref_adj = (dense.adjoint() * v.values.matrix()).array();
    CHECK(rel(apply_G_adjoint(kernel, v).values, ref_adj) < 1e-10);
  }
}

TEST_CASE("impulse response is the recentred kernel") {
  const Grid2D g(8, 1.0);
  const GreenKernel kernel(g, kPhys);
  ComplexField delta(g);
  delta(3, 5) = 1.0;
  const ComplexField out = kernel.apply(delta);
  for (Index r = 0; r < 8; ++r)
    for (Index c = 0; c < 8; ++c) CHECK(std::abs(out(r, c) - kernel.sample(r - 3, c - 5)) < 1e-13);
  CHECK(kernel.apply(ComplexField(g)).values.abs().maxCoeff() == 0.0);
}

TEST_CASE("linearity and adjoint identity") {
  const Grid2D g(16, 2.0);
  const GreenKernel kernel(g, kPhys);
  const ComplexField a(g, testutil::random_complex(g.size(), 1));
  const ComplexField b(g, testutil::random_complex(g.size(), 2));
  const cplx alpha(0.3, -1.7);
  const ComplexField combo(g, alpha * a.values + b.values);
  const Eigen::ArrayXcd lhs = kernel.apply(combo).values;
  const Eigen::ArrayXcd rhs = alpha * kernel.apply(a).values + kernel.apply(b).values;
  CHECK(rel(lhs, rhs) < 1e-12);

  const cplx ga_b = kernel.apply(a).values.matrix().dot(b.values.matrix());
  const cplx a_gb = a.values.matrix().dot(kernel.apply_adjoint(b).values.matrix());
  CHECK(std::abs(ga_b - a_gb) / std::abs(ga_b) < 1e-10);
}

TEST_CASE("equal inputs give bitwise equal outputs") {
  const Grid2D g(16, 2.0);
  const GreenKernel k1(g, kPhys), k2(g, kPhys);
  const ComplexField v(g, testutil::random_complex(g.size(), 4));
  CHECK((k1.apply(v).values == k2.apply(v).values).all());
  CHECK((k1.apply(v).values == k1.apply(v).values).all());
}

TEST_CASE("grid mismatch is rejected") {
  const GreenKernel kernel(Grid2D(8, 1.0), kPhys);
  CHECK_THROWS(kernel.apply(ComplexField(Grid2D(8, 2.0))));
  CHECK_THROWS(kernel.apply_adjoint(ComplexField(Grid2D(4, 1.0))));
}

TEST_CASE("detector operator entries") {
  const Grid2D one(2, 1.0);
  const Vec2 det = one.position(0, 0) + Vec2(0.0, -1.0);
  const DetectorOperator op = build_detector_operator({{det}, one}, kPhys);
  CHECK(op.rows() == 1);
  CHECK(op.cols() == 4);
  const cplx expected = one.pixel_area() * cplx(0.0, 0.25) * testutil::hankel0_std(2.0 * std::numbers::pi * 1.333);
  CHECK(std::abs(op.entries()(0, 0) - expected) < 1e-12);

  // doubling the pixel area at fixed geometry doubles the entries
  const Grid2D small(4, 2.0);
  const Grid2D big(4, 2.0 * std::sqrt(2.0));
  const Vec2 far(0.3, 40.0);
  const DetectorOperator b = build_detector_operator({{far}, big}, kPhys);
  for (Index n = 0; n < big.size(); ++n) {
    const double d = (far - big.position(n / 4, n % 4)).norm();
    CHECK(std::abs(b.entries()(0, n) - 2.0 * small.pixel_area() * testutil::green_std(d, kPhys.k_bg())) < 1e-12);
  }

  const DetectorOperator line = build_detector_operator({{Vec2(-1.0, 3.0), Vec2(0.5, -3.0), Vec2(2.0, 4.0)}, small},
                                                        kPhys);
  const Eigen::VectorXcd x = testutil::random_complex(small.size(), 8).matrix();
  const Eigen::VectorXcd y = testutil::random_complex(3, 9).matrix();
  CHECK(std::abs(line.apply(x).dot(y) - x.dot(line.apply_adjoint(y))) < 1e-12 * std::abs(line.apply(x).dot(y)));

  CHECK_THROWS_AS(build_detector_operator({{small.position(1, 2)}, small}, kPhys), DataError);
  CHECK_THROWS_AS(build_detector_operator({{}, small}, kPhys), DataError);
}
