#pragma once

#include "odt/fft.hpp"
#include "odt/grid.hpp"

#include <Eigen/Dense>

#include <memory>
#include <vector>

namespace odt {

/// Outgoing 2-D Helmholtz Green's function (i/4) H0^(1)(k r), r > 0.
cplx green_function(double r, double k);

/// Mean of the Green's function over a disc of area h^2 centred on the
/// singularity: (i pi / (2 h^2)) [ (a/k) H1^(1)(k a) + 2i / (pi k^2) ],
/// a = h / sqrt(pi).
cplx green_self_average(double h, double k);

/// Discrete convolution G on a grid: the kernel sampled at every pixel
/// offset (self cell disc-averaged), area-weighted, stored on a grid
/// zero-padded to twice the size so that circular convolution equals the
/// aperiodic one. The spectrum is computed once at construction.
class GreenKernel {
 public:
  GreenKernel(const Grid2D& grid, const PhysicsParams& phys);

  const Grid2D& grid() const { return grid_; }
  double k_bg() const { return k_bg_; }
  Index padded_n() const { return 2 * grid_.n_side(); }

  /// Area-weighted kernel entry for a pixel offset (|di|, |dj| < n_side).
  cplx sample(Index di, Index dj) const;
  /// Spectrum of the padded kernel, already divided by padded_n()^2.
  const Eigen::ArrayXcd& padded_spectrum() const { return spectrum_; }
  /// True when the pixel exceeds a quarter of the background wavelength.
  bool undersampled() const { return grid_.pixel() > 1.0 / (4.0 * n_b_); }

  ComplexField apply(const ComplexField& v) const;
  ComplexField apply_adjoint(const ComplexField& v) const;

 private:
  void convolve(const cplx* in, cplx* out) const;

  Grid2D grid_;
  double k_bg_;
  double n_b_;
  Eigen::ArrayXcd padded_kernel_;
  Eigen::ArrayXcd spectrum_;
  std::shared_ptr<const Fft2d> fft_;
};

GreenKernel build_green_kernel(const Grid2D& grid, const PhysicsParams& phys);

inline ComplexField apply_G(const GreenKernel& kernel, const ComplexField& v) { return kernel.apply(v); }
inline ComplexField apply_G_adjoint(const GreenKernel& kernel, const ComplexField& v) {
  return kernel.apply_adjoint(v);
}

/// Explicit N x N matrix of G, for verification on small grids.
Eigen::MatrixXcd assemble_green_matrix(const GreenKernel& kernel);

struct DetectorGeometry {
  std::vector<Vec2> positions;
  Grid2D grid;
};

/// Dense map from grid sources to detector samples:
/// entry (m, n) = pixel_area * g(y_m - x_n).
class DetectorOperator {
 public:
  DetectorOperator(DetectorGeometry geometry, Eigen::MatrixXcd entries)
      : geometry_(std::move(geometry)), entries_(std::move(entries)) {}

  const DetectorGeometry& geometry() const { return geometry_; }
  const Eigen::MatrixXcd& entries() const { return entries_; }
  Index rows() const { return entries_.rows(); }
  Index cols() const { return entries_.cols(); }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& source) const { return entries_ * source; }
  Eigen::VectorXcd apply_adjoint(const Eigen::VectorXcd& r) const { return entries_.adjoint() * r; }

 private:
  DetectorGeometry geometry_;
  Eigen::MatrixXcd entries_;
};

DetectorOperator build_detector_operator(const DetectorGeometry& geom, const PhysicsParams& phys);

}  // namespace odt
