#include "odt/io.hpp"

#include "odt/errors.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace odt {

namespace {

constexpr std::uint32_t kFieldVersion = 1;
constexpr std::uint32_t kMeasurementVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
  std::array<char, sizeof(T)> b;
  std::memcpy(b.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  os.write(b.data(), sizeof(T));
}

template <typename T>
T get(std::istream& is, const std::string& what) {
  std::array<char, sizeof(T)> b;
  if (!is.read(b.data(), sizeof(T))) throw DataError("truncated file while reading " + what);
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  T v;
  std::memcpy(&v, b.data(), sizeof(T));
  return v;
}

void put_complex(std::ostream& os, cplx z) {
  put(os, z.real());
  put(os, z.imag());
}

cplx get_complex(std::istream& is, const std::string& what) {
  const double re = get<double>(is, what);
  return {re, get<double>(is, what)};
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open " + path.string() + " for writing");
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open " + path.string());
  return is;
}

void expect_magic(std::istream& is, const char* magic, const std::filesystem::path& path) {
  char m[4];
  if (!is.read(m, 4) || std::memcmp(m, magic, 4) != 0)
    throw DataError(path.string() + " is not a " + std::string(magic, 4) + " file");
}

template <typename Field>
void write_real(const std::filesystem::path& path, const Field& f) {
  auto os = open_out(path);
  os.write("ODTF", 4);
  put(os, kFieldVersion);
  put(os, static_cast<std::uint8_t>(FieldKind::real64));
  put(os, static_cast<std::uint64_t>(f.grid.n_side()));
  put(os, static_cast<std::uint64_t>(f.grid.n_side()));
  for (Index i = 0; i < f.values.size(); ++i) put(os, f.values(i));
  if (!os) throw DataError("write failed: " + path.string());
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view s, const std::string& what) {
  double v = 0.0;
  if (!parse_number(trim(s), v)) throw DataError("bad number in " + what);
  return v;
}

}  // namespace

void write_field(const std::filesystem::path& path, const ScatteringPotential& f) { write_real(path, f); }
void write_field(const std::filesystem::path& path, const RefractiveMap& n) { write_real(path, n); }

void write_field(const std::filesystem::path& path, const ComplexField& u) {
  auto os = open_out(path);
  os.write("ODTF", 4);
  put(os, kFieldVersion);
  put(os, static_cast<std::uint8_t>(FieldKind::complex128));
  put(os, static_cast<std::uint64_t>(u.grid.n_side()));
  put(os, static_cast<std::uint64_t>(u.grid.n_side()));
  for (Index i = 0; i < u.values.size(); ++i) put_complex(os, u.values(i));
  if (!os) throw DataError("write failed: " + path.string());
}

RawField read_raw_field(const std::filesystem::path& path) {
  auto is = open_in(path);
  expect_magic(is, "ODTF", path);
  const auto version = get<std::uint32_t>(is, "version");
  if (version != kFieldVersion) throw DataError("unsupported field version " + std::to_string(version));
  RawField f;
  const auto kind = get<std::uint8_t>(is, "kind");
  if (kind > 1) throw DataError("unknown field kind " + std::to_string(kind));
  f.kind = static_cast<FieldKind>(kind);
  f.nx = get<std::uint64_t>(is, "nx");
  f.ny = get<std::uint64_t>(is, "ny");
  if (f.nx == 0 || f.ny == 0 || f.nx > (1u << 20) || f.ny > (1u << 20)) throw DataError("implausible field size");
  const std::uint64_t count = f.nx * f.ny * (f.kind == FieldKind::complex128 ? 2 : 1);
  f.payload.resize(count);
  for (auto& v : f.payload) v = get<double>(is, "payload");
  if (is.peek() != std::char_traits<char>::eof()) throw DataError("trailing bytes in " + path.string());
  return f;
}

ScatteringPotential read_potential(const std::filesystem::path& path, double side_len) {
  const RawField raw = read_raw_field(path);
  if (raw.kind != FieldKind::real64 || raw.nx != raw.ny) throw DataError("expected a square real field");
  const Grid2D grid(static_cast<Index>(raw.nx), side_len);
  return ScatteringPotential(grid, Eigen::Map<const Eigen::ArrayXd>(raw.payload.data(), grid.size()));
}

ComplexField read_complex_field(const std::filesystem::path& path, double side_len) {
  const RawField raw = read_raw_field(path);
  if (raw.kind != FieldKind::complex128 || raw.nx != raw.ny) throw DataError("expected a square complex field");
  const Grid2D grid(static_cast<Index>(raw.nx), side_len);
  Eigen::ArrayXcd v(grid.size());
  for (Index i = 0; i < v.size(); ++i) v(i) = cplx(raw.payload[2 * i], raw.payload[2 * i + 1]);
  return ComplexField(grid, std::move(v));
}

void write_measurements(const std::filesystem::path& path, const MeasurementSet& data) {
  validate(data);
  auto os = open_out(path);
  os.write("ODTM", 4);
  put(os, kMeasurementVersion);
  put(os, static_cast<std::uint32_t>(data.records.size()));
  put(os, static_cast<std::uint32_t>(data.detector_count()));
  for (const AngleRecord& r : data.records) {
    put(os, r.angle);
    for (Index m = 0; m < r.y.size(); ++m) put_complex(os, r.y(m));
    for (Index m = 0; m < r.u_in_on_gamma.size(); ++m) put_complex(os, r.u_in_on_gamma(m));
  }

  std::map<std::string, std::string> meta = data.metadata;
  std::string det;
  for (const Vec2& p : data.detector_positions) det += (det.empty() ? "" : ";") + fmt(p.x()) + ":" + fmt(p.y());
  meta["detectors"] = det;
  meta["source_distance"] = fmt(data.source_distance);
  std::string block;
  for (const auto& [k, v] : meta) {
    if (k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos)
      throw DataError("metadata entry '" + k + "' cannot be stored");
    block += k + "=" + v + "\n";
  }
  put(os, static_cast<std::uint64_t>(block.size()));
  os.write(block.data(), static_cast<std::streamsize>(block.size()));
  if (!os) throw DataError("write failed: " + path.string());
}

MeasurementSet read_measurements(const std::filesystem::path& path) {
  auto is = open_in(path);
  expect_magic(is, "ODTM", path);
  const auto version = get<std::uint32_t>(is, "version");
  if (version != kMeasurementVersion) throw DataError("unsupported measurement version " + std::to_string(version));
  const auto p_count = get<std::uint32_t>(is, "angle count");
  const auto m_count = get<std::uint32_t>(is, "detector count");
  MeasurementSet data;
  data.records.resize(p_count);
  for (AngleRecord& r : data.records) {
    r.angle = get<double>(is, "angle");
    r.y.resize(m_count);
    r.u_in_on_gamma.resize(m_count);
    for (Index m = 0; m < r.y.size(); ++m) r.y(m) = get_complex(is, "y");
    for (Index m = 0; m < r.u_in_on_gamma.size(); ++m) r.u_in_on_gamma(m) = get_complex(is, "u_in");
  }
  const auto len = get<std::uint64_t>(is, "metadata length");
  if (len > (1u << 30)) throw DataError("implausible metadata length");
  std::string block(len, '\0');
  if (!is.read(block.data(), static_cast<std::streamsize>(len))) throw DataError("truncated metadata block");
  if (is.peek() != std::char_traits<char>::eof()) throw DataError("trailing bytes in " + path.string());

  bool have_detectors = false;
  for (std::string_view line : split(block, '\n')) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw DataError("metadata line without '='");
    const std::string key(line.substr(0, eq));
    const std::string_view value = line.substr(eq + 1);
    if (key == "detectors") {
      have_detectors = true;
      if (value.empty()) continue;
      for (std::string_view item : split(value, ';')) {
        const auto colon = item.find(':');
        if (colon == std::string_view::npos) throw DataError("bad detector entry");
        data.detector_positions.emplace_back(parse_double(item.substr(0, colon), "detectors"),
                                             parse_double(item.substr(colon + 1), "detectors"));
      }
    } else if (key == "source_distance") {
      data.source_distance = parse_double(value, "source_distance");
    } else {
      data.metadata[key] = std::string(value);
    }
  }
  if (!have_detectors) throw DataError("measurement file has no detector positions");
  validate(data);
  return data;
}

// ---- configuration ----

std::vector<double> AppConfig::degrees(const std::vector<double>& radians) {
  std::vector<double> out;
  for (double r : radians) out.push_back(r * 180.0 / std::numbers::pi);
  return out;
}

namespace {

struct Key {
  const char* name;
  std::function<std::string(const AppConfig&)> get;
  std::function<void(AppConfig&, std::string_view)> set;
};

template <typename T>
Key number_key(const char* name, T AppConfig::*member) {
  return {name,
          [member](const AppConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return fmt(c.*member);
            else return std::to_string(c.*member);
          },
          [member, name](AppConfig& c, std::string_view v) {
            T out{};
            if (!parse_number(v, out)) throw ConfigError("invalid value for key '" + std::string(name) + "'");
            c.*member = out;
          }};
}

Key bool_key(const char* name, bool AppConfig::*member) {
  return {name, [member](const AppConfig& c) { return std::string(c.*member ? "true" : "false"); },
          [member, name](AppConfig& c, std::string_view v) {
            if (v == "true" || v == "1") c.*member = true;
            else if (v == "false" || v == "0") c.*member = false;
            else throw ConfigError("invalid value for key '" + std::string(name) + "'");
          }};
}

Key string_key(const char* name, std::string AppConfig::*member, std::vector<std::string> allowed) {
  return {name, [member](const AppConfig& c) { return c.*member; },
          [member, name, allowed](AppConfig& c, std::string_view v) {
            if (std::find(allowed.begin(), allowed.end(), v) == allowed.end())
              throw ConfigError("invalid value for key '" + std::string(name) + "'");
            c.*member = std::string(v);
          }};
}

Key list_key(const char* name, std::vector<double> AppConfig::*member) {
  return {name,
          [member](const AppConfig& c) {
            std::string s;
            for (double d : c.*member) s += (s.empty() ? "" : ",") + fmt(d);
            return s;
          },
          [member, name](AppConfig& c, std::string_view v) {
            std::vector<double> out;
            if (!v.empty())
              for (std::string_view item : split(v, ',')) {
                double d = 0.0;
                if (!parse_number(trim(item), d))
                  throw ConfigError("invalid value for key '" + std::string(name) + "'");
                out.push_back(d);
              }
            c.*member = std::move(out);
          }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table{
      number_key("n_b", &AppConfig::n_b),
      number_key("wavelength", &AppConfig::wavelength),
      string_key("phantom", &AppConfig::phantom, {"shepp_logan", "bead"}),
      number_key("contrast", &AppConfig::contrast),
      number_key("phantom_half_extent", &AppConfig::phantom_half_extent),
      number_key("bead_radius", &AppConfig::bead_radius),
      number_key("bead_index", &AppConfig::bead_index),
      number_key("bead_cx", &AppConfig::bead_cx),
      number_key("bead_cy", &AppConfig::bead_cy),
      list_key("angles_deg", &AppConfig::angles_deg),
      number_key("fine_n", &AppConfig::fine_n),
      number_key("fine_side", &AppConfig::fine_side),
      number_key("source_distance", &AppConfig::source_distance),
      bool_key("detector_top", &AppConfig::detector_top),
      bool_key("detector_bottom", &AppConfig::detector_bottom),
      string_key("detector_mode", &AppConfig::detector_mode, {"grid_rows", "lines"}),
      number_key("detector_samples", &AppConfig::detector_samples),
      number_key("line_offset", &AppConfig::line_offset),
      number_key("line_length", &AppConfig::line_length),
      number_key("downsample_to", &AppConfig::downsample_to),
      number_key("noise_sigma", &AppConfig::noise_sigma),
      number_key("noise_seed", &AppConfig::noise_seed),
      number_key("sim_max_iters", &AppConfig::sim_max_iters),
      number_key("sim_tol", &AppConfig::sim_tol),
      number_key("recon_n", &AppConfig::recon_n),
      number_key("recon_side", &AppConfig::recon_side),
      number_key("gamma", &AppConfig::gamma),
      number_key("mu", &AppConfig::mu),
      number_key("outer_iters", &AppConfig::outer_iters),
      number_key("subset_size", &AppConfig::subset_size),
      number_key("forward_max_iters", &AppConfig::forward_max_iters),
      number_key("forward_tol", &AppConfig::forward_tol),
      number_key("jac_max_iters", &AppConfig::jac_max_iters),
      number_key("jac_tol", &AppConfig::jac_tol),
      number_key("prox_rho1", &AppConfig::prox_rho1),
      number_key("prox_rho2", &AppConfig::prox_rho2),
      number_key("prox_max_iters", &AppConfig::prox_max_iters),
      number_key("prox_rel_tol", &AppConfig::prox_rel_tol),
      string_key("momentum", &AppConfig::momentum, {"fista", "constant", "none"}),
      number_key("momentum_parameter", &AppConfig::momentum_parameter),
      bool_key("restart", &AppConfig::restart),
      number_key("seed", &AppConfig::seed),
      number_key("snapshot_every", &AppConfig::snapshot_every),
      list_key("mie_contrasts", &AppConfig::mie_contrasts),
      number_key("mie_n", &AppConfig::mie_n),
      number_key("mie_side", &AppConfig::mie_side),
      number_key("mie_radius", &AppConfig::mie_radius),
      number_key("mie_angle_deg", &AppConfig::mie_angle_deg),
      number_key("mie_max_iters", &AppConfig::mie_max_iters),
      number_key("mie_eps0", &AppConfig::mie_eps0),
  };
  return table;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const Key& k : keys()) out.emplace_back(k.name);
  return out;
}

AppConfig parse_config(const std::string& text) {
  AppConfig c;
  int line_no = 0;
  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value, got '" + std::string(line) + "'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto& table = keys();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Key& k) { return key == k.name; });
    if (it == table.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
    it->set(c, value);
  }
  return c;
}

std::string serialize_config(const AppConfig& config) {
  std::string out;
  for (const Key& k : keys()) out += std::string(k.name) + " = " + k.get(config) + "\n";
  return out;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

PhysicsParams physics_of(const AppConfig& c) {
  try {
    return PhysicsParams(c.n_b, c.wavelength);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

SimProtocol protocol_of(const AppConfig& c) {
  SimProtocol p;
  p.angles.clear();
  for (double d : c.angles_deg) p.angles.push_back(d * std::numbers::pi / 180.0);
  try {
    p.fine_grid = Grid2D(c.fine_n, c.fine_side);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  p.source_distance = c.source_distance;
  p.detector_top = c.detector_top;
  p.detector_bottom = c.detector_bottom;
  p.detector_mode = c.detector_mode == "lines" ? DetectorMode::lines : DetectorMode::grid_rows;
  p.detector_samples = c.detector_samples;
  p.line_offset = c.line_offset;
  p.line_length = c.line_length;
  p.downsample_to = c.downsample_to;
  p.noise_sigma = c.noise_sigma;
  p.noise_seed = c.noise_seed;
  return p;
}

ReconConfig recon_config_of(const AppConfig& c) {
  ReconConfig r;
  r.gamma = c.gamma;
  r.mu = c.mu;
  r.outer_iters = c.outer_iters;
  r.subset_size = c.subset_size;
  r.forward_budget = {c.forward_max_iters, c.forward_tol};
  r.jac_budget = {c.jac_max_iters, c.jac_tol};
  r.prox = ProxParams{1.0, c.prox_rho1, c.prox_rho2, c.prox_max_iters, c.prox_rel_tol};
  r.momentum.kind = c.momentum == "none"       ? MomentumKind::none
                    : c.momentum == "constant" ? MomentumKind::constant
                                               : MomentumKind::fista;
  r.momentum.parameter = c.momentum_parameter;
  r.restart = c.restart;
  r.seed = c.seed;
  r.snapshot_every = c.snapshot_every;
  if (!(r.gamma > 0.0) || !(r.mu >= 0.0) || r.outer_iters < 1 || r.subset_size < 1)
    throw ConfigError("need gamma > 0, mu >= 0, outer_iters >= 1 and subset_size >= 1");
  if (r.forward_budget.max_iters < 1 || r.jac_budget.max_iters < 1 || !(r.forward_budget.rel_change_tol > 0.0) ||
      !(r.jac_budget.rel_change_tol > 0.0))
    throw ConfigError("solver budgets need max_iters >= 1 and a positive tolerance");
  if (!(r.prox.rho1 > 0.0) || !(r.prox.rho2 > 0.0) || r.prox.max_iters < 1 || !(r.prox.rel_tol > 0.0))
    throw ConfigError("prox parameters must be positive");
  return r;
}

RefractiveMap phantom_of(const AppConfig& c, const Grid2D& grid) {
  const PhysicsParams phys = physics_of(c);
  if (c.phantom == "bead")
    return bead_phantom(grid, BeadSpec{c.bead_radius, c.bead_index, Vec2(c.bead_cx, c.bead_cy)}, phys);
  return shepp_logan(grid, c.contrast, phys, c.phantom_half_extent);
}

void write_pgm(const std::filesystem::path& path, const Eigen::ArrayXd& values, const Grid2D& grid) {
  if (values.size() != grid.size()) throw DataError("image size does not match grid");
  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;
  auto os = open_out(path);
  const Index n = grid.n_side();
  os << "P5\n" << n << " " << n << "\n255\n";
  for (Index r = n - 1; r >= 0; --r)
    for (Index c = 0; c < n; ++c) {
      const double t = (values(grid.index(r, c)) - lo) / span;
      os.put(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0))));
    }
  if (!os) throw DataError("write failed: " + path.string());
}

void write_trace_csv(const std::filesystem::path& path, const ReconTrace& trace) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open " + path.string() + " for writing");
  os << "iteration,fidelity,tv,grad_norm,gamma,alpha,subset\n";
  for (const ReconIterate& r : trace.records) {
    os << r.iteration << "," << fmt(r.fidelity) << "," << fmt(r.tv) << "," << fmt(r.grad_norm) << ","
       << fmt(r.gamma) << "," << fmt(r.alpha) << ",";
    for (size_t i = 0; i < r.subset.size(); ++i) os << (i ? " " : "") << r.subset[i];
    os << "\n";
  }
  if (!os) throw DataError("write failed: " + path.string());
}

}  // namespace odt
