#include "odt/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace odt {
namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::shared_ptr<const Fft2d> Fft2d::get(Index n) {
  static std::mutex cache_mutex;
  static std::map<Index, std::shared_ptr<const Fft2d>> cache;
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const Fft2d>(n);
  return slot;
}

Fft2d::Fft2d(Index n) : n_(n) {
  if (n < 1) throw std::invalid_argument("Fft2d: size must be positive");
  std::lock_guard lock(planner_mutex());
  auto* buf = fftw_alloc_complex(static_cast<size_t>(n * n));
  const int ni = static_cast<int>(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fwd_ = fftw_plan_dft_2d(ni, ni, buf, buf, FFTW_FORWARD, flags);
  inv_ = fftw_plan_dft_2d(ni, ni, buf, buf, FFTW_BACKWARD, flags);
  fftw_free(buf);
  if (!fwd_ || !inv_) throw std::runtime_error("Fft2d: FFTW planning failed");
}

Fft2d::~Fft2d() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(inv_));
}

void Fft2d::forward(std::span<cplx> data) const {
  if (static_cast<Index>(data.size()) != n_ * n_) throw std::invalid_argument("Fft2d: buffer size");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), p, p);
}

void Fft2d::inverse(std::span<cplx> data) const {
  if (static_cast<Index>(data.size()) != n_ * n_) throw std::invalid_argument("Fft2d: buffer size");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(inv_), p, p);
}

}  // namespace odt
