#include "odt/sim.hpp"

#include "odt/errors.hpp"
#include "odt/parallel.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <random>

namespace odt {

namespace {

struct Ellipse {
  double x0, y0, a, b, phi_deg;
  double n_label;  // index at contrast 0.2 with n_b = 1.333
};

constexpr double kLabelBackground = 1.333;

// Painted in order; later ellipses overwrite earlier ones.
constexpr std::array<Ellipse, 10> kHead{{
    {0.0, 0.0, 0.69, 0.92, 0.0, 1.457},
    {0.0, -0.0184, 0.6624, 0.874, 0.0, 1.39},
    {0.22, 0.0, 0.11, 0.31, -18.0, 1.437},
    {-0.22, 0.0, 0.16, 0.41, 18.0, 1.437},
    {0.0, 0.35, 0.21, 0.25, 0.0, 1.407},
    {0.0, 0.1, 0.046, 0.046, 0.0, 1.407},
    {0.0, -0.1, 0.046, 0.046, 0.0, 1.407},
    {-0.08, -0.605, 0.046, 0.023, 0.0, 1.407},
    {0.0, -0.606, 0.023, 0.023, 0.0, 1.407},
    {0.06, -0.605, 0.023, 0.046, 0.0, 1.407},
}};

bool inside(const Ellipse& e, double x, double y) {
  const double phi = e.phi_deg * std::numbers::pi / 180.0;
  const double dx = x - e.x0;
  const double dy = y - e.y0;
  const double u = dx * std::cos(phi) + dy * std::sin(phi);
  const double v = -dx * std::sin(phi) + dy * std::cos(phi);
  return (u * u) / (e.a * e.a) + (v * v) / (e.b * e.b) <= 1.0;
}

std::vector<Vec2> side_positions(const SimProtocol& p, double y) {
  std::vector<Vec2> out;
  if (p.detector_mode == DetectorMode::grid_rows) {
    for (Index c = 0; c < p.fine_grid.n_side(); ++c) out.emplace_back(p.fine_grid.x(c), y);
  } else {
    const double step = p.line_length / p.detector_samples;
    for (int i = 0; i < p.detector_samples; ++i) out.emplace_back((i + 0.5) * step - 0.5 * p.line_length, y);
  }
  return out;
}

void check_protocol(const SimProtocol& p) {
  if (p.angles.empty()) throw ConfigError("protocol has no angles");
  for (double a : p.angles)
    if (!(std::abs(a) < 0.5 * std::numbers::pi)) throw ConfigError("angles must lie in (-90, 90) degrees");
  if (!p.detector_top && !p.detector_bottom) throw ConfigError("at least one detector side is required");
  if (p.detector_mode == DetectorMode::grid_rows && p.detector_samples != p.fine_grid.n_side())
    throw ConfigError("detector_samples must equal the fine grid size when detectors are grid rows");
  if (p.detector_samples < 1 || p.downsample_to < 1 || p.detector_samples % p.downsample_to != 0)
    throw ConfigError("downsample_to must divide detector_samples");
  if (p.detector_mode == DetectorMode::lines && !(p.line_length > 0.0))
    throw ConfigError("line_length must be positive");
  if (!(p.noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be nonnegative");
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<double> SimProtocol::default_angles(int n) {
  std::vector<double> out;
  const double lim = std::numbers::pi / 3.0;
  if (n == 1) return {0.0};
  for (int i = 0; i < n; ++i) out.push_back(-lim + 2.0 * lim * i / (n - 1));
  return out;
}

RefractiveMap shepp_logan(const Grid2D& grid, double contrast, const PhysicsParams& phys, double half_extent) {
  if (!(contrast >= 0.0)) throw ConfigError("contrast must be nonnegative");
  const double e = half_extent > 0.0 ? half_extent : 0.95 * grid.side_len() / 2.0;
  const double scale = contrast / 0.2;
  const double nb2 = phys.n_b() * phys.n_b();
  RefractiveMap n(grid);
  for (Index r = 0; r < grid.n_side(); ++r)
    for (Index c = 0; c < grid.n_side(); ++c) {
      const double x = grid.x(c) / e;
      const double y = grid.y(r) / e;
      double label = kLabelBackground;
      for (const Ellipse& el : kHead)
        if (inside(el, x, y)) label = el.n_label;
      n(r, c) = std::sqrt(nb2 + scale * (label * label - kLabelBackground * kLabelBackground));
    }
  return n;
}

RefractiveMap bead_phantom(const Grid2D& grid, const BeadSpec& bead, const PhysicsParams& phys) {
  RefractiveMap n(grid);
  n.values.setConstant(phys.n_b());
  for (Index r = 0; r < grid.n_side(); ++r)
    for (Index c = 0; c < grid.n_side(); ++c)
      if ((grid.position(r, c) - bead.center).norm() <= bead.radius) n(r, c) = bead.n_bead;
  return n;
}

std::vector<Vec2> raw_detector_positions(const SimProtocol& p) {
  std::vector<Vec2> out;
  const Grid2D& g = p.fine_grid;
  const bool rows = p.detector_mode == DetectorMode::grid_rows;
  if (p.detector_bottom) {
    const auto side = side_positions(p, rows ? g.y(0) : -p.line_offset);
    out.insert(out.end(), side.begin(), side.end());
  }
  if (p.detector_top) {
    const auto side = side_positions(p, rows ? g.y(g.n_side() - 1) : p.line_offset);
    out.insert(out.end(), side.begin(), side.end());
  }
  return out;
}

Eigen::VectorXcd block_average(const Eigen::VectorXcd& in, int factor) {
  if (factor < 1 || in.size() % factor != 0) throw ConfigError("block size must divide the record length");
  Eigen::VectorXcd out(in.size() / factor);
  for (Index i = 0; i < out.size(); ++i) out(i) = in.segment(i * factor, factor).mean();
  return out;
}

MeasurementSet simulate(const RefractiveMap& phantom, const SimProtocol& protocol, const PhysicsParams& phys,
                        const SolverBudget& budget, int threads) {
  check_protocol(protocol);
  if (!(phantom.grid == protocol.fine_grid)) throw ConfigError("phantom grid differs from the protocol fine grid");
  const Grid2D& grid = protocol.fine_grid;
  const ScatteringPotential f = potential_from_ri(phantom, phys);
  const GreenKernel kernel(grid, phys);

  const std::vector<Vec2> raw = raw_detector_positions(protocol);
  const int sides = (protocol.detector_top ? 1 : 0) + (protocol.detector_bottom ? 1 : 0);
  const int factor = protocol.detector_samples / protocol.downsample_to;
  const bool rows = protocol.detector_mode == DetectorMode::grid_rows;

  std::optional<DetectorOperator> detector;
  if (!rows) detector.emplace(build_detector_operator(DetectorGeometry{raw, grid}, phys));

  // Averaging works side by side so blocks never straddle the two lines.
  auto average = [&](const Eigen::VectorXcd& v) {
    const Index per = protocol.detector_samples;
    Eigen::VectorXcd out(sides * protocol.downsample_to);
    for (int s = 0; s < sides; ++s)
      out.segment(s * protocol.downsample_to, protocol.downsample_to) = block_average(v.segment(s * per, per), factor);
    return out;
  };

  const auto count = static_cast<int>(protocol.angles.size());
  std::vector<AngleRecord> records(static_cast<size_t>(count));
  std::vector<char> converged(static_cast<size_t>(count), 1);
  parallel_for(count, threads, [&](int p) {
    const double angle = protocol.angles[static_cast<size_t>(p)];
    const ComplexField u_in = plane_wave(grid, phys, angle, protocol.source_distance);
    const ForwardSolveReport rep = solve_forward_cg(kernel, f, u_in, budget);
    converged[static_cast<size_t>(p)] = rep.converged ? 1 : 0;

    Eigen::VectorXcd inc(static_cast<Index>(raw.size()));
    for (size_t m = 0; m < raw.size(); ++m)
      inc(static_cast<Index>(m)) = plane_wave_at(raw[m], phys, angle, protocol.source_distance);
    Eigen::VectorXcd y;
    if (rows) {
      y.resize(static_cast<Index>(raw.size()));
      const Index n = grid.n_side();
      Index k = 0;
      if (protocol.detector_bottom)
        for (Index c = 0; c < n; ++c) y(k++) = rep.field(0, c);
      if (protocol.detector_top)
        for (Index c = 0; c < n; ++c) y(k++) = rep.field(n - 1, c);
    } else {
      y = measure(*detector, f, rep.field, inc);
    }
    records[static_cast<size_t>(p)] = AngleRecord{angle, average(y), average(inc)};
  });

  MeasurementSet out;
  out.source_distance = protocol.source_distance;
  {
    Eigen::VectorXcd xs(static_cast<Index>(raw.size())), ys(xs.size());
    for (size_t m = 0; m < raw.size(); ++m) {
      xs(static_cast<Index>(m)) = raw[m].x();
      ys(static_cast<Index>(m)) = raw[m].y();
    }
    const Eigen::VectorXcd ax = average(xs), ay = average(ys);
    for (Index m = 0; m < ax.size(); ++m) out.detector_positions.emplace_back(ax(m).real(), ay(m).real());
  }

  if (protocol.noise_sigma > 0.0) {
    std::mt19937_64 rng(protocol.noise_seed);
    std::normal_distribution<double> gauss(0.0, protocol.noise_sigma);
    for (AngleRecord& r : records)
      for (Index m = 0; m < r.y.size(); ++m) {
        const double re = gauss(rng);
        r.y(m) += cplx(re, gauss(rng));
      }
  }
  out.records = std::move(records);

  std::string unconverged;
  for (int p = 0; p < count; ++p)
    if (!converged[static_cast<size_t>(p)]) unconverged += (unconverged.empty() ? "" : ",") + std::to_string(p);
  out.metadata["fine_grid_n"] = std::to_string(grid.n_side());
  out.metadata["fine_grid_side"] = fmt_double(grid.side_len());
  out.metadata["n_b"] = fmt_double(phys.n_b());
  out.metadata["wavelength"] = fmt_double(phys.wavelength());
  out.metadata["forward_max_iters"] = std::to_string(budget.max_iters);
  out.metadata["forward_rel_change_tol"] = fmt_double(budget.rel_change_tol);
  out.metadata["detector_mode"] = rows ? "grid_rows" : "lines";
  out.metadata["noise_sigma"] = fmt_double(protocol.noise_sigma);
  out.metadata["noise_seed"] = std::to_string(protocol.noise_seed);
  out.metadata["unconverged_angles"] = unconverged;
  return out;
}

std::uint64_t predict_memory_delta(std::uint64_t n_pixels, std::uint64_t k_nagd, std::uint64_t n_threads) {
  if (n_pixels < 1 || k_nagd < 1 || n_threads < 1) throw ConfigError("memory model inputs must be >= 1");
  return n_pixels * k_nagd * n_threads * 16u;
}

std::string format_bytes(std::uint64_t bytes) {
  static constexpr std::array<const char*, 6> units{"B", "kB", "MB", "GB", "TB", "PB"};
  if (bytes < 1000) return std::to_string(bytes) + " B";
  double v = static_cast<double>(bytes);
  size_t u = 0;
  while (v >= 1000.0 && u + 1 < units.size()) {
    v /= 1000.0;
    ++u;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f %s", v, units[u]);
  return buf;
}

}  // namespace odt
