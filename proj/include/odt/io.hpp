#pragma once

#include "odt/measurement.hpp"
#include "odt/recon.hpp"
#include "odt/sim.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace odt {

// Binary field container: "ODTF", u32 version, u8 kind, u64 nx, u64 ny,
// then nx*ny little-endian doubles (kind 0) or re/im pairs (kind 1), row-major.
enum class FieldKind : std::uint8_t { real64 = 0, complex128 = 1 };

struct RawField {
  FieldKind kind = FieldKind::real64;
  std::uint64_t nx = 0;
  std::uint64_t ny = 0;
  std::vector<double> payload;  // interleaved re/im for complex128
};

void write_field(const std::filesystem::path& path, const ScatteringPotential& f);
void write_field(const std::filesystem::path& path, const RefractiveMap& n);
void write_field(const std::filesystem::path& path, const ComplexField& u);
RawField read_raw_field(const std::filesystem::path& path);
/// The file does not carry the physical side length; the caller supplies it.
ScatteringPotential read_potential(const std::filesystem::path& path, double side_len);
ComplexField read_complex_field(const std::filesystem::path& path, double side_len);

// Measurement container: "ODTM", u32 version, u32 P, u32 M, per angle f64
// angle, complex128[M] y, complex128[M] u_in, then u64 length and a UTF-8
// key=value block. Detector positions and the source distance travel in
// that block under the reserved keys "detectors" and "source_distance".
void write_measurements(const std::filesystem::path& path, const MeasurementSet& data);
MeasurementSet read_measurements(const std::filesystem::path& path);

/// Every tunable of the command-line tool. Angles are kept in degrees so that
/// the text form round-trips exactly.
struct AppConfig {
  // physics
  double n_b = 1.333;
  double wavelength = 1.0;
  // phantom
  std::string phantom = "shepp_logan";  // or "bead"
  double contrast = 0.2;
  double phantom_half_extent = 0.0;
  double bead_radius = 3.0;
  double bead_index = 1.88;
  double bead_cx = 0.0;
  double bead_cy = 0.0;
  // simulation
  std::vector<double> angles_deg = degrees(SimProtocol::default_angles());
  int fine_n = 512;
  double fine_side = 16.0;
  double source_distance = 16.5;
  bool detector_top = true;
  bool detector_bottom = true;
  std::string detector_mode = "grid_rows";  // or "lines"
  int detector_samples = 512;
  double line_offset = 16.0;
  double line_length = 32.0;
  int downsample_to = 128;
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 0;
  int sim_max_iters = 1000;
  double sim_tol = 1e-8;
  // reconstruction
  int recon_n = 128;
  double recon_side = 16.0;
  double gamma = 5e-3;
  double mu = 3.3e-2;
  int outer_iters = 200;
  int subset_size = 8;
  int forward_max_iters = 120;
  double forward_tol = 1e-4;
  int jac_max_iters = 120;
  double jac_tol = 1e-4;
  double prox_rho1 = 1.0;
  double prox_rho2 = 1.0;
  int prox_max_iters = 200;
  double prox_rel_tol = 1e-5;
  std::string momentum = "fista";  // fista | constant | none
  double momentum_parameter = 0.0;
  bool restart = false;
  std::uint64_t seed = 0;
  int snapshot_every = 0;
  // Mie validation
  std::vector<double> mie_contrasts{0.1, 0.3, 0.5, 0.7, 0.9893};  // the last is the n = 1.88 bead
  int mie_n = 256;
  double mie_side = 16.0;
  double mie_radius = 3.0;
  double mie_angle_deg = 0.0;
  int mie_max_iters = 400;
  double mie_eps0 = 1e-2;

  bool operator==(const AppConfig&) const = default;

  static std::vector<double> degrees(const std::vector<double>& radians);
};

/// Flat key=value text; '#' starts a comment. Unknown keys and malformed
/// values throw ConfigError naming the key.
AppConfig parse_config(const std::string& text);
std::string serialize_config(const AppConfig& config);
AppConfig load_config(const std::filesystem::path& path);
std::vector<std::string> config_keys();

PhysicsParams physics_of(const AppConfig& c);
SimProtocol protocol_of(const AppConfig& c);
ReconConfig recon_config_of(const AppConfig& c);
RefractiveMap phantom_of(const AppConfig& c, const Grid2D& grid);

/// 8-bit binary PGM, min-max normalised, top row of the image = largest y.
void write_pgm(const std::filesystem::path& path, const Eigen::ArrayXd& values, const Grid2D& grid);

/// iteration,fidelity,tv,grad_norm,gamma,alpha,subset (subset space-separated).
void write_trace_csv(const std::filesystem::path& path, const ReconTrace& trace);

}  // namespace odt
