#include "odt/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace odt {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = std::numbers::egamma;
constexpr double kSeriesLimit = 25.0;

// Miller's backward recurrence for J_0 .. J_{count-1}, normalised with
// J_0 + 2 sum J_2k = 1. Every term is bounded by 1, so nothing cancels.
std::vector<double> miller(double x, int count) {
  int start = static_cast<int>(std::max(static_cast<double>(count), x) + 20.0 + std::sqrt(40.0 * std::max(1.0, x)));
  start += start % 2;
  std::vector<double> j(static_cast<size_t>(start) + 1, 0.0);
  j[static_cast<size_t>(start)] = 1e-30;
  for (int m = start; m >= 1; --m) {
    const auto mu = static_cast<size_t>(m);
    j[mu - 1] = (2.0 * m / x) * j[mu] - (mu + 1 < j.size() ? j[mu + 1] : 0.0);
    if (std::abs(j[mu - 1]) > 1e200)
      for (size_t i = mu - 1; i < j.size(); ++i) j[i] *= 1e-200;
  }
  double norm = j[0];
  for (int m = 2; m <= start; m += 2) norm += 2.0 * j[static_cast<size_t>(m)];
  for (auto& v : j) v /= norm;
  return j;
}

// Neumann series on top of the Miller values:
//   Y0 = (2/pi)(ln(x/2) + gamma) J0 - (4/pi) sum_k (-1)^k J_2k / k
//   Y1 = -Y0' = -(2/(pi x)) J0 + (2/pi)(ln(x/2) + gamma) J1
//        + (2/pi) sum_k (-1)^k (J_{2k-1} - J_{2k+1}) / k
BesselJY01 small_argument(double x) {
  const std::vector<double> j = miller(x, 2);
  const double ell = std::log(0.5 * x) + kEulerGamma;
  double s0 = 0.0;
  double s1 = 0.0;
  for (size_t k = 1; 2 * k + 1 < j.size(); ++k) {
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    s0 += sign * j[2 * k] / static_cast<double>(k);
    s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / static_cast<double>(k);
  }
  BesselJY01 r{};
  r.j0 = j[0];
  r.j1 = j[1];
  r.y0 = (2.0 / kPi) * ell * j[0] - (4.0 / kPi) * s0;
  r.y1 = -(2.0 / (kPi * x)) * j[0] + (2.0 / kPi) * ell * j[1] + (2.0 / kPi) * s1;
  return r;
}

// Hankel's large-argument expansion for integer order nu.
void asymptotic(double x, int nu, double& j, double& y) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double p = 1.0;
  double q = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 80; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * (mu - odd * odd) / (k * 8.0 * x);
    if (std::abs(next) >= prev && k > 2) break;
    prev = std::abs(next);
    term = next;
    // k even -> P with sign (-1)^(k/2); k odd -> Q with sign (-1)^((k-1)/2)
    if (k % 2 == 0)
      p += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    else
      q += (((k - 1) / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    if (std::abs(term) < 1e-17) break;
  }
  const double chi = x - (0.5 * nu + 0.25) * kPi;
  const double amp = std::sqrt(2.0 / (kPi * x));
  const double c = std::cos(chi);
  const double s = std::sin(chi);
  j = amp * (p * c - q * s);
  y = amp * (p * s + q * c);
}

}  // namespace

BesselJY01 bessel_j0y0j1y1(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::domain_error("bessel_j0y0j1y1: argument must be positive and finite");
  if (x <= kSeriesLimit) return small_argument(x);
  BesselJY01 r{};
  asymptotic(x, 0, r.j0, r.y0);
  asymptotic(x, 1, r.j1, r.y1);
  return r;
}

cplx hankel0(double x) {
  const auto b = bessel_j0y0j1y1(x);
  return {b.j0, b.y0};
}

cplx hankel1(double x) {
  const auto b = bessel_j0y0j1y1(x);
  return {b.j1, b.y1};
}

void bessel_j_orders(double x, std::span<double> j) {
  const auto n = static_cast<int>(j.size());
  if (n == 0) return;
  if (x < 0.0 || !std::isfinite(x)) throw std::domain_error("bessel_j_orders: x must be >= 0");
  if (x == 0.0) {
    std::fill(j.begin(), j.end(), 0.0);
    j[0] = 1.0;
    return;
  }

  const std::vector<double> all = miller(x, n);
  std::copy_n(all.begin(), n, j.begin());
}

void bessel_jy_orders(double x, std::span<double> j, std::span<double> y) {
  if (!(x > 0.0)) throw std::domain_error("bessel_jy_orders: x must be positive");
  bessel_j_orders(x, j);
  const auto n = y.size();
  if (n == 0) return;
  const auto b = bessel_j0y0j1y1(x);
  y[0] = b.y0;
  if (n > 1) y[1] = b.y1;
  for (std::size_t m = 1; m + 1 < n; ++m) y[m + 1] = (2.0 * static_cast<double>(m) / x) * y[m] - y[m - 1];
}

}  // namespace odt
