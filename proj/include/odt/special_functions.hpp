#pragma once

#include "odt/grid.hpp"

#include <span>

namespace odt {

struct BesselJY01 {
  double j0;
  double y0;
  double j1;
  double y1;
};

/// J0, Y0, J1, Y1 at x > 0. Ascending series for x <= 12, Hankel asymptotic
/// expansion above; absolute error stays below ~1e-10 across the range.
BesselJY01 bessel_j0y0j1y1(double x);

/// H0^(1)(x) = J0(x) + i Y0(x), x > 0.
cplx hankel0(double x);

/// H1^(1)(x) = J1(x) + i Y1(x), x > 0.
cplx hankel1(double x);

/// J_0..J_{j.size()-1} at x >= 0 by Miller's downward recurrence, scaled
/// with the Wronskian J1 Y0 - J0 Y1 = 2 / (pi x).
void bessel_j_orders(double x, std::span<double> j);

/// J_m and Y_m for m = 0..j.size()-1 at x > 0. Y comes from upward
/// recurrence starting at Y0, Y1.
void bessel_jy_orders(double x, std::span<double> j, std::span<double> y);

}  // namespace odt
