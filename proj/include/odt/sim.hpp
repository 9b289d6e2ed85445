#pragma once

#include "odt/forward.hpp"
#include "odt/measurement.hpp"
#include "odt/mie.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace odt {

/// Detector placement. grid_rows reads the first and last rows of the
/// simulation grid; lines puts detectors on horizontal lines outside it and
/// evaluates them through the dense detector operator.
enum class DetectorMode { grid_rows, lines };

struct SimProtocol {
  std::vector<double> angles = default_angles();  // radians
  Grid2D fine_grid{512, 16.0};
  double source_distance = 16.5;
  bool detector_top = true;
  bool detector_bottom = true;
  DetectorMode detector_mode = DetectorMode::grid_rows;
  int detector_samples = 512;  // per side; grid_rows mode requires fine_grid.n_side()
  double line_offset = 16.0;   // lines mode: detectors at y = +-line_offset
  double line_length = 32.0;   // lines mode: centred span along x
  int downsample_to = 512;     // samples per side after block averaging
  double noise_sigma = 0.0;    // additive complex Gaussian, per component
  std::uint64_t noise_seed = 0;

  /// n angles uniform in [-60, 60] degrees.
  static std::vector<double> default_angles(int n = 31);
};

/// Standard 10-ellipse Shepp-Logan head. At contrast 0.2 the regions take
/// the indices 1.457 (skull), 1.39 (brain), 1.437 (two large ellipses) and
/// 1.407 (small ones); other contrasts scale n^2 - n_b^2 linearly.
/// half_extent <= 0 selects 0.95 * side_len / 2.
RefractiveMap shepp_logan(const Grid2D& grid, double contrast, const PhysicsParams& phys, double half_extent = 0.0);

/// n_bead on pixel centres within the radius, n_b elsewhere.
RefractiveMap bead_phantom(const Grid2D& grid, const BeadSpec& bead, const PhysicsParams& phys);

/// Detector positions of a protocol before any averaging: bottom side then
/// top side, each ordered by increasing x.
std::vector<Vec2> raw_detector_positions(const SimProtocol& protocol);

/// Means of consecutive blocks, out.size() = in.size() / factor.
Eigen::VectorXcd block_average(const Eigen::VectorXcd& in, int factor);

/// Forward-solves every angle on the phantom's grid and records the total
/// field at the detectors, averaged down per side. Angles whose forward
/// solve stopped on the budget are listed in metadata["unconverged_angles"].
MeasurementSet simulate(const RefractiveMap& phantom, const SimProtocol& protocol, const PhysicsParams& phys,
                        const SolverBudget& budget, int threads = 1);

/// N * K * threads * 16 bytes.
std::uint64_t predict_memory_delta(std::uint64_t n_pixels, std::uint64_t k_nagd, std::uint64_t n_threads);

/// Decimal units with one decimal: "16 B", "31.5 MB", "53.7 GB".
std::string format_bytes(std::uint64_t bytes);

}  // namespace odt
