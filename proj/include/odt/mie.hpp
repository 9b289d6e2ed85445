#pragma once

#include "odt/grid.hpp"

#include <vector>

namespace odt {

struct BeadSpec {
  double radius = 3.0;
  double n_bead = 1.88;
  Vec2 center = Vec2::Zero();
};

struct MieSolution {
  ComplexField field;
  int truncation_order = 0;
  double coeff_residual = 0.0;  // max |u_out - u_in| on the rim, relative to max |u|
};

/// Partial-wave coefficients of a dielectric cylinder under a unit plane
/// wave, orders 0..order. Outside: u = sum_m i^m (J_m(k_b r) + b_m H_m(k_b r)) e^{i m t},
/// inside: u = sum_m i^m a_m J_m(k_in r) e^{i m t}, t measured from the
/// incidence direction. Coefficients are even in m.
struct MieCoefficients {
  double k_b = 0.0;
  double k_in = 0.0;
  double radius = 0.0;
  std::vector<cplx> a;
  std::vector<cplx> b;

  int order() const { return static_cast<int>(b.size()) - 1; }
};

/// Starts at ceil(k_b radius) + 12 and doubles (at most 3 times) until the
/// last retained terms fall below 1e-12. Throws ValidationError otherwise.
MieCoefficients mie_coefficients(const BeadSpec& bead, const PhysicsParams& phys);
MieCoefficients mie_coefficients(const BeadSpec& bead, const PhysicsParams& phys, int order);

/// Total field at arbitrary points (inside or outside the bead).
std::vector<cplx> mie_total_at(const std::vector<Vec2>& points, const MieCoefficients& coeffs, const BeadSpec& bead,
                               const PhysicsParams& phys, double angle, double source_offset);

/// Largest |exterior - interior| series mismatch on `samples` rim points,
/// divided by the largest |u| seen there.
double mie_boundary_residual(const MieCoefficients& coeffs, int samples = 64);

/// Total field on every pixel centre. The incident phase convention matches
/// plane_wave(grid, phys, angle, source_offset).
MieSolution mie_total_field(const BeadSpec& bead, const PhysicsParams& phys, const Grid2D& grid, double angle,
                            double source_offset);

/// Scattered field sum_m i^m b_m H_m(k_b r) e^{i m t} at points outside the
/// bead; throws DataError for a point inside.
Eigen::VectorXcd mie_scattered_at(const std::vector<Vec2>& points, const BeadSpec& bead, const PhysicsParams& phys,
                                  double angle, double source_offset);

}  // namespace odt
