#pragma once

#include "odt/grid.hpp"
#include "odt/prox_tv.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

namespace testutil {

using odt::cplx;
using odt::Index;

inline Eigen::ArrayXcd random_complex(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::ArrayXcd v(n);
  for (Index i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
  return v;
}

inline Eigen::ArrayXd random_real(Index n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::ArrayXd v(n);
  for (Index i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

// Hankel H0^(1) from the standard library, independent of the project's series.
inline cplx hankel0_std(double x) { return {std::cyl_bessel_j(0.0, x), std::cyl_neumann(0.0, x)}; }

inline cplx green_std(double r, double k) { return cplx(0.0, 0.25) * hankel0_std(k * r); }

// Mean of g over a disc of area h^2 by composite Simpson in t, r = a t^2.
inline cplx self_average_quadrature(double h, double k, int intervals = 20000) {
  const double a = h / std::sqrt(std::numbers::pi);
  auto integrand = [&](double t) -> cplx {
    if (t == 0.0) return 0.0;
    const double r = a * t * t;
    return green_std(r, k) * 2.0 * std::numbers::pi * r * 2.0 * a * t;
  };
  const double dt = 1.0 / intervals;
  cplx sum = integrand(0.0) + integrand(1.0);
  for (int i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * integrand(i * dt);
  return sum * dt / 3.0 / (h * h);
}

// Dense N x N convolution matrix built entry by entry.
inline Eigen::MatrixXcd dense_green(const odt::Grid2D& grid, double k) {
  const Index n = grid.size();
  const cplx self = self_average_quadrature(grid.pixel(), k);
  Eigen::MatrixXcd m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const odt::Vec2 xi = grid.position(i / grid.n_side(), i % grid.n_side());
      const odt::Vec2 xj = grid.position(j / grid.n_side(), j % grid.n_side());
      m(i, j) = grid.pixel_area() * (i == j ? self : green_std((xi - xj).norm(), k));
    }
  return m;
}

inline double rel(const Eigen::ArrayXcd& a, const Eigen::ArrayXcd& b) {
  return (a - b).matrix().norm() / b.matrix().norm();
}

// Projected subgradient descent on 0.5||f - v||^2 + mu TV(f) over f >= 0,
// step 1/(k+1); keeps the best objective seen.
inline double subgradient_oracle(const Eigen::ArrayXd& v, double mu, const odt::Grid2D& g, int steps) {
  const Index n = g.n_side();
  Eigen::ArrayXd f = v.max(0.0);
  double best = odt::prox_objective(f, v, mu, g);
  for (int k = 0; k < steps; ++k) {
    Eigen::ArrayXd sub = f - v;
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < n; ++c) {
        const Index i = r * n + c;
        const double dx = f(r * n + (c + 1) % n) - f(i);
        const double dy = f(((r + 1) % n) * n + c) - f(i);
        const double norm = std::hypot(dx, dy);
        if (norm == 0.0) continue;
        sub(i) -= mu * (dx + dy) / norm;
        sub(r * n + (c + 1) % n) += mu * dx / norm;
        sub(((r + 1) % n) * n + c) += mu * dy / norm;
      }
    f = (f - sub / (k + 1.0)).max(0.0);
    best = std::min(best, odt::prox_objective(f, v, mu, g));
  }
  return best;
}

}  // namespace testutil
