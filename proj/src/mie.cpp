#include "odt/mie.hpp"

#include "odt/errors.hpp"
#include "odt/forward.hpp"
#include "odt/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace odt {

namespace {

constexpr cplx kI{0.0, 1.0};

cplx i_pow(int m) {
  switch (m % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

double deriv(const std::vector<double>& z, int m) { return m == 0 ? -z[1] : 0.5 * (z[m - 1] - z[m + 1]); }

void check_bead(const BeadSpec& bead) {
  if (!(bead.radius > 0.0)) throw ConfigError("bead radius must be positive");
  if (!(bead.n_bead >= 1.0)) throw ConfigError("bead index must be >= 1");
}

// Polar coordinates relative to the bead centre, angle measured from khat.
struct Polar {
  double r;
  double t;
};

Polar polar(const Vec2& p, const Vec2& center, double angle) {
  const Vec2 d = p - center;
  const Vec2 khat(std::sin(angle), std::cos(angle));
  const double along = khat.dot(d);
  const double across = khat.x() * d.y() - khat.y() * d.x();
  return {d.norm(), std::atan2(across, along)};
}

// Series at one point. Outside the bead the incident wave is added in closed
// form: its Bessel expansion would need orders beyond k_b r.
cplx series_at(const MieCoefficients& c, double r, double t, bool scattered_only, std::vector<double>& jb,
               std::vector<double>& yb) {
  const int order = c.order();
  cplx sum = 0.0;
  if (r < c.radius) {
    if (scattered_only) throw DataError("point lies inside the bead");
    bessel_j_orders(c.k_in * r, std::span<double>(jb.data(), static_cast<size_t>(order + 1)));
    for (int m = 0; m <= order; ++m) {
      const double eps = m == 0 ? 1.0 : 2.0;
      sum += eps * i_pow(m) * c.a[static_cast<size_t>(m)] * jb[static_cast<size_t>(m)] * std::cos(m * t);
    }
    return sum;
  }
  bessel_jy_orders(c.k_b * r, std::span<double>(jb.data(), static_cast<size_t>(order + 1)),
                   std::span<double>(yb.data(), static_cast<size_t>(order + 1)));
  for (int m = 0; m <= order; ++m) {
    const auto mu = static_cast<size_t>(m);
    if (!std::isfinite(yb[mu])) break;  // remaining b_m H_m are below round-off
    const double eps = m == 0 ? 1.0 : 2.0;
    const cplx h(jb[mu], yb[mu]);
    sum += eps * i_pow(m) * c.b[mu] * h * std::cos(m * t);
  }
  if (!scattered_only) sum += std::exp(kI * (c.k_b * r * std::cos(t)));
  return sum;
}

cplx incident_phase(const BeadSpec& bead, const PhysicsParams& phys, double angle, double source_offset) {
  return plane_wave_at(bead.center, phys, angle, source_offset);
}

}  // namespace

MieCoefficients mie_coefficients(const BeadSpec& bead, const PhysicsParams& phys, int order) {
  check_bead(bead);
  if (order < 1) throw ConfigError("Mie truncation order must be >= 1");
  MieCoefficients c;
  c.k_b = phys.k_bg();
  c.k_in = phys.k0() * bead.n_bead;
  c.radius = bead.radius;
  const double x = c.k_b * bead.radius;
  const double y = c.k_in * bead.radius;
  const auto n = static_cast<size_t>(order + 2);
  std::vector<double> jx(n), yx(n), jy(n);
  bessel_jy_orders(x, jx, yx);
  bessel_j_orders(y, jy);

  c.a.assign(static_cast<size_t>(order + 1), 0.0);
  c.b.assign(static_cast<size_t>(order + 1), 0.0);
  for (int m = 0; m <= order; ++m) {
    const auto mu = static_cast<size_t>(m);
    if (!std::isfinite(yx[mu + 1])) break;
    const cplx h(jx[mu], yx[mu]);
    const cplx dh(deriv(jx, m), deriv(yx, m));
    const double djy = deriv(jy, m);
    const cplx den = c.k_b * dh * jy[mu] - c.k_in * h * djy;
    c.b[mu] = (c.k_in * jx[mu] * djy - c.k_b * deriv(jx, m) * jy[mu]) / den;
    // Value continuity when J_m(k_in a) is not small (exact a_m = 1 without
    // contrast), otherwise Cramer's rule with J H' - J' H = 2i / (pi x).
    if (std::abs(jy[mu]) >= 1e-2)
      c.a[mu] = (jx[mu] + c.b[mu] * h) / jy[mu];
    else
      c.a[mu] = 2.0 * kI / (std::numbers::pi * bead.radius * den);
  }
  return c;
}

MieCoefficients mie_coefficients(const BeadSpec& bead, const PhysicsParams& phys) {
  check_bead(bead);
  int order = static_cast<int>(std::ceil(phys.k_bg() * bead.radius)) + 12;
  const double x = phys.k_bg() * bead.radius;
  const double y = phys.k0() * bead.n_bead * bead.radius;
  for (int attempt = 0; attempt <= 3; ++attempt, order *= 2) {
    MieCoefficients c = mie_coefficients(bead, phys, order);
    // Size of the last retained terms on the rim bounds the truncation error.
    const auto n = static_cast<size_t>(order + 1);
    std::vector<double> jx(n), yx(n), jy(n);
    bessel_jy_orders(x, jx, yx);
    bessel_j_orders(y, jy);
    const auto last = static_cast<size_t>(order);
    const double h_last = std::isfinite(yx[last]) ? std::hypot(jx[last], yx[last]) : 0.0;
    const double tail = std::abs(c.a[last] * jy[last]) + std::abs(c.b[last]) * h_last;
    if (tail < 1e-12) return c;
  }
  throw ValidationError("Mie series did not converge after 3 order doublings");
}

std::vector<cplx> mie_total_at(const std::vector<Vec2>& points, const MieCoefficients& coeffs, const BeadSpec& bead,
                               const PhysicsParams& phys, double angle, double source_offset) {
  const cplx phase = incident_phase(bead, phys, angle, source_offset);
  std::vector<double> jb(static_cast<size_t>(coeffs.order() + 1)), yb(jb.size());
  std::vector<cplx> out;
  out.reserve(points.size());
  for (const Vec2& p : points) {
    const Polar q = polar(p, bead.center, angle);
    out.push_back(phase * series_at(coeffs, q.r, q.t, false, jb, yb));
  }
  return out;
}

double mie_boundary_residual(const MieCoefficients& c, int samples) {
  const int order = c.order();
  const auto n = static_cast<size_t>(order + 1);
  std::vector<double> jx(n), yx(n), jy(n);
  bessel_jy_orders(c.k_b * c.radius, jx, yx);
  bessel_j_orders(c.k_in * c.radius, jy);
  double worst = 0.0;
  double peak = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double t = 2.0 * std::numbers::pi * s / samples;
    cplx out = 0.0, in = 0.0;
    for (int m = 0; m <= order; ++m) {
      const auto mu = static_cast<size_t>(m);
      if (!std::isfinite(yx[mu])) break;
      const cplx w = (m == 0 ? 1.0 : 2.0) * i_pow(m) * std::cos(m * t);
      out += w * (jx[mu] + c.b[mu] * cplx(jx[mu], yx[mu]));
      in += w * c.a[mu] * jy[mu];
    }
    worst = std::max(worst, std::abs(out - in));
    peak = std::max({peak, std::abs(out), std::abs(in)});
  }
  return peak > 0.0 ? worst / peak : worst;
}

MieSolution mie_total_field(const BeadSpec& bead, const PhysicsParams& phys, const Grid2D& grid, double angle,
                            double source_offset) {
  const MieCoefficients c = mie_coefficients(bead, phys);
  const double residual = mie_boundary_residual(c);
  if (!(residual <= 1e-8)) throw ValidationError("Mie boundary residual too large");

  const cplx phase = incident_phase(bead, phys, angle, source_offset);
  std::vector<double> jb(static_cast<size_t>(c.order() + 1)), yb(jb.size());
  ComplexField u(grid);
  for (Index r = 0; r < grid.n_side(); ++r)
    for (Index col = 0; col < grid.n_side(); ++col) {
      const Polar q = polar(grid.position(r, col), bead.center, angle);
      u(r, col) = phase * series_at(c, q.r, q.t, false, jb, yb);
    }
  return MieSolution{std::move(u), c.order(), residual};
}

Eigen::VectorXcd mie_scattered_at(const std::vector<Vec2>& points, const BeadSpec& bead, const PhysicsParams& phys,
                                  double angle, double source_offset) {
  const MieCoefficients c = mie_coefficients(bead, phys);
  const cplx phase = incident_phase(bead, phys, angle, source_offset);
  std::vector<double> jb(static_cast<size_t>(c.order() + 1)), yb(jb.size());
  Eigen::VectorXcd out(static_cast<Index>(points.size()));
  for (size_t i = 0; i < points.size(); ++i) {
    const Polar q = polar(points[i], bead.center, angle);
    out(static_cast<Index>(i)) = phase * series_at(c, q.r, q.t, true, jb, yb);
  }
  return out;
}

}  // namespace odt
