#pragma once

#include <Eigen/Core>

#include <complex>
#include <numbers>
#include <stdexcept>

namespace odt {

using Index = Eigen::Index;
using cplx = std::complex<double>;
using Vec2 = Eigen::Vector2d;

/// Square sampling lattice of side `side_len` (wavelength units) with
/// `n_side` samples per axis. Samples sit at pixel centers; row index maps
/// to y (row 0 at the bottom), column index to x. Storage is row-major.
class Grid2D {
 public:
  Grid2D(Index n_side, double side_len);

  Index n_side() const { return n_; }
  double side_len() const { return side_; }
  double pixel() const { return side_ / static_cast<double>(n_); }
  double pixel_area() const { return pixel() * pixel(); }
  Index size() const { return n_ * n_; }

  Index index(Index row, Index col) const { return row * n_ + col; }
  double x(Index col) const { return (static_cast<double>(col) + 0.5) * pixel() - 0.5 * side_; }
  double y(Index row) const { return (static_cast<double>(row) + 0.5) * pixel() - 0.5 * side_; }
  Vec2 position(Index row, Index col) const { return {x(col), y(row)}; }

  bool operator==(const Grid2D&) const = default;

 private:
  Index n_;
  double side_;
};

/// Wavelength is 1 for every internal computation; physical units live at
/// the I/O boundary only.
class PhysicsParams {
 public:
  explicit PhysicsParams(double n_b = 1.333, double wavelength = 1.0);

  double wavelength() const { return wavelength_; }
  double n_b() const { return n_b_; }
  double k0() const { return 2.0 * std::numbers::pi / wavelength_; }
  double k_bg() const { return k0() * n_b_; }

  bool operator==(const PhysicsParams&) const = default;

 private:
  double n_b_;
  double wavelength_;
};

struct PotentialTag {};
struct IndexTag {};
struct WaveTag {};

/// Values sampled on a grid. The tag separates quantities that share a
/// scalar type but not a meaning (potential vs. refractive index).
template <typename Scalar, typename Tag>
struct GridField {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  Grid2D grid;
  Array values;

  explicit GridField(const Grid2D& g) : grid(g), values(Array::Zero(g.size())) {}
  GridField(const Grid2D& g, Array v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size())
      throw std::invalid_argument("field size does not match grid");
  }

  Scalar& operator()(Index row, Index col) { return values(grid.index(row, col)); }
  const Scalar& operator()(Index row, Index col) const { return values(grid.index(row, col)); }
};

using ScatteringPotential = GridField<double, PotentialTag>;
using RefractiveMap = GridField<double, IndexTag>;
using ComplexField = GridField<cplx, WaveTag>;

template <typename A, typename B>
void require_same_grid(const A& a, const B& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("grid mismatch");
}

/// f = k0^2 (n^2 - n_b^2), per pixel.
ScatteringPotential potential_from_ri(const RefractiveMap& n, const PhysicsParams& phys);

/// n = sqrt(f / k0^2 + n_b^2); exact inverse of potential_from_ri.
RefractiveMap ri_from_potential(const ScatteringPotential& f, const PhysicsParams& phys);

/// max|f| / (k0^2 n_b^2)
double contrast(const ScatteringPotential& f, const PhysicsParams& phys);

/// 20 log10(||truth|| / ||estimate - truth||). Returns +inf when the two are
/// identical.
double snr_db(const ScatteringPotential& estimate, const ScatteringPotential& truth);

}  // namespace odt
