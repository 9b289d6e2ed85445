#include "odt/greens.hpp"

#include "odt/errors.hpp"
#include "odt/special_functions.hpp"

#include <cmath>
#include <numbers>

namespace odt {

cplx green_function(double r, double k) {
  return cplx(0.0, 0.25) * hankel0(k * r);
}

cplx green_self_average(double h, double k) {
  constexpr double pi = std::numbers::pi;
  const double a = h / std::sqrt(pi);
  const cplx integral = (a / k) * hankel1(k * a) + cplx(0.0, 2.0 / (pi * k * k));
  return cplx(0.0, pi / (2.0 * h * h)) * integral;
}

GreenKernel::GreenKernel(const Grid2D& grid, const PhysicsParams& phys)
    : grid_(grid), k_bg_(phys.k_bg()), n_b_(phys.n_b()) {
  const Index n = grid.n_side();
  const Index np = 2 * n;
  const double h = grid.pixel();
  const double area = grid.pixel_area();

  padded_kernel_ = Eigen::ArrayXcd::Zero(np * np);
  for (Index di = -(n - 1); di <= n - 1; ++di) {
    const Index row = (di + np) % np;
    for (Index dj = -(n - 1); dj <= n - 1; ++dj) {
      const Index col = (dj + np) % np;
      cplx value;
      if (di == 0 && dj == 0) {
        value = green_self_average(h, k_bg_);
      } else {
        const double r = h * std::hypot(static_cast<double>(di), static_cast<double>(dj));
        value = green_function(r, k_bg_);
      }
      padded_kernel_(row * np + col) = area * value;
    }
  }

  fft_ = Fft2d::get(np);
  spectrum_ = padded_kernel_;
  fft_->forward({spectrum_.data(), static_cast<size_t>(spectrum_.size())});
  spectrum_ /= static_cast<double>(np * np);
}

cplx GreenKernel::sample(Index di, Index dj) const {
  const Index n = grid_.n_side();
  if (std::abs(di) >= n || std::abs(dj) >= n) throw std::out_of_range("kernel offset outside grid");
  const Index np = 2 * n;
  return padded_kernel_(((di + np) % np) * np + (dj + np) % np);
}

void GreenKernel::convolve(const cplx* in, cplx* out) const {
  const Index n = grid_.n_side();
  const Index np = 2 * n;
  Eigen::ArrayXcd buf = Eigen::ArrayXcd::Zero(np * np);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) buf(r * np + c) = in[r * n + c];

  const std::span<cplx> view(buf.data(), static_cast<size_t>(buf.size()));
  fft_->forward(view);
  buf *= spectrum_;
  fft_->inverse(view);

  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) out[r * n + c] = buf(r * np + c);
}

ComplexField GreenKernel::apply(const ComplexField& v) const {
  if (!(v.grid == grid_)) throw std::invalid_argument("apply_G: grid mismatch");
  ComplexField out(grid_);
  convolve(v.values.data(), out.values.data());
  return out;
}

// The sampled kernel is radially symmetric, so G is complex symmetric and
// G^H v = conj(G conj(v)).
ComplexField GreenKernel::apply_adjoint(const ComplexField& v) const {
  if (!(v.grid == grid_)) throw std::invalid_argument("apply_G_adjoint: grid mismatch");
  const Eigen::ArrayXcd conj_in = v.values.conjugate();
  ComplexField out(grid_);
  convolve(conj_in.data(), out.values.data());
  out.values = out.values.conjugate();
  return out;
}

GreenKernel build_green_kernel(const Grid2D& grid, const PhysicsParams& phys) {
  return GreenKernel(grid, phys);
}

Eigen::MatrixXcd assemble_green_matrix(const GreenKernel& kernel) {
  const Grid2D& g = kernel.grid();
  const Index n = g.n_side();
  Eigen::MatrixXcd m(g.size(), g.size());
  for (Index r1 = 0; r1 < n; ++r1)
    for (Index c1 = 0; c1 < n; ++c1)
      for (Index r2 = 0; r2 < n; ++r2)
        for (Index c2 = 0; c2 < n; ++c2) m(g.index(r1, c1), g.index(r2, c2)) = kernel.sample(r1 - r2, c1 - c2);
  return m;
}

DetectorOperator build_detector_operator(const DetectorGeometry& geom, const PhysicsParams& phys) {
  if (geom.positions.empty()) throw DataError("detector geometry has no positions");
  const Grid2D& g = geom.grid;
  const Index n = g.n_side();
  const double k = phys.k_bg();
  const double area = g.pixel_area();
  const double min_dist = 1e-9 * g.pixel();

  Eigen::MatrixXcd entries(static_cast<Index>(geom.positions.size()), g.size());
  for (Index m = 0; m < entries.rows(); ++m) {
    const Vec2& y = geom.positions[static_cast<size_t>(m)];
    for (Index r = 0; r < n; ++r) {
      for (Index c = 0; c < n; ++c) {
        const double dist = (y - g.position(r, c)).norm();
        if (!(dist > min_dist)) throw DataError("detector coincides with a pixel center");
        entries(m, g.index(r, c)) = area * green_function(dist, k);
      }
    }
  }
  return DetectorOperator(geom, std::move(entries));
}

}  // namespace odt
