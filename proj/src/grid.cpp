#include "odt/grid.hpp"

#include <cmath>
#include <limits>

namespace odt {

Grid2D::Grid2D(Index n_side, double side_len) : n_(n_side), side_(side_len) {
  if (n_side < 2) throw std::invalid_argument("grid needs at least 2 samples per side");
  if (!(side_len > 0.0) || !std::isfinite(side_len))
    throw std::invalid_argument("grid side length must be positive");
}

PhysicsParams::PhysicsParams(double n_b, double wavelength) : n_b_(n_b), wavelength_(wavelength) {
  if (!(wavelength > 0.0) || !std::isfinite(wavelength))
    throw std::invalid_argument("wavelength must be positive");
  if (!(n_b >= 1.0) || !std::isfinite(n_b))
    throw std::invalid_argument("background index must be >= 1");
}

ScatteringPotential potential_from_ri(const RefractiveMap& n, const PhysicsParams& phys) {
  if (!n.values.allFinite()) throw std::invalid_argument("refractive map has non-finite values");
  const double k0sq = phys.k0() * phys.k0();
  const double nb2 = phys.n_b() * phys.n_b();
  return ScatteringPotential(n.grid, k0sq * (n.values.square() - nb2));
}

RefractiveMap ri_from_potential(const ScatteringPotential& f, const PhysicsParams& phys) {
  if (!f.values.allFinite()) throw std::invalid_argument("potential has non-finite values");
  const double k0sq = phys.k0() * phys.k0();
  const double nb2 = phys.n_b() * phys.n_b();
  return RefractiveMap(f.grid, (f.values / k0sq + nb2).max(0.0).sqrt());
}

double contrast(const ScatteringPotential& f, const PhysicsParams& phys) {
  if (f.values.size() == 0) return 0.0;
  const double k0sq = phys.k0() * phys.k0();
  return f.values.abs().maxCoeff() / (k0sq * phys.n_b() * phys.n_b());
}

double snr_db(const ScatteringPotential& estimate, const ScatteringPotential& truth) {
  require_same_grid(estimate, truth);
  const double ref = truth.values.matrix().norm();
  if (ref == 0.0) throw std::invalid_argument("snr_db: reference is identically zero");
  const double err = (estimate.values - truth.values).matrix().norm();
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(ref / err);
}

}  // namespace odt
