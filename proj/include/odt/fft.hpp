#pragma once

#include "odt/grid.hpp"

#include <memory>
#include <span>

namespace odt {

/// In-place square 2-D complex DFT backed by FFTW. Plans are created once per
/// size (FFTW_ESTIMATE, so results are bitwise deterministic) and executed
/// on caller-owned buffers, which makes concurrent use safe.
class Fft2d {
 public:
  static std::shared_ptr<const Fft2d> get(Index n);

  explicit Fft2d(Index n);
  ~Fft2d();
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  Index n() const { return n_; }
  void forward(std::span<cplx> data) const;
  /// Unnormalized inverse transform.
  void inverse(std::span<cplx> data) const;

 private:
  Index n_;
  void* fwd_;
  void* inv_;
};

}  // namespace odt
