#include "odt/errors.hpp"
#include "odt/io.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

using namespace odt;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "odt_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

bool same_bits(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<size_t>(a.size())) == 0;
}
}  // namespace

TEST_CASE("field files round-trip bit for bit") {
  const Grid2D g(12, 3.0);
  ScatteringPotential f(g, testutil::random_real(g.size(), 5));
  f.values(3) = -0.0;
  f.values(4) = 1e-310;
  write_field(scratch("f.odtf"), f);
  const ScatteringPotential back = read_potential(scratch("f.odtf"), 3.0);
  CHECK(back.grid == g);
  CHECK(same_bits(back.values, f.values));

  const ComplexField u(g, testutil::random_complex(g.size(), 6));
  write_field(scratch("u.odtf"), u);
  const ComplexField ub = read_complex_field(scratch("u.odtf"), 3.0);
  CHECK(same_bits(ub.values.real(), u.values.real()));
  CHECK(same_bits(ub.values.imag(), u.values.imag()));

  const RawField raw = read_raw_field(scratch("u.odtf"));
  CHECK(raw.kind == FieldKind::complex128);
  CHECK(raw.nx == 12);
  CHECK(raw.ny == 12);
  CHECK(raw.payload.size() == 288);
  CHECK(slurp(scratch("u.odtf")).substr(0, 4) == "ODTF");

  CHECK_THROWS_AS(read_complex_field(scratch("f.odtf"), 3.0), DataError);
}

TEST_CASE("corrupt field files are rejected") {
  const Grid2D g(4, 1.0);
  write_field(scratch("c.odtf"), ScatteringPotential(g));
  std::string bytes = slurp(scratch("c.odtf"));
  {
    std::ofstream(scratch("trunc.odtf"), std::ios::binary) << bytes.substr(0, bytes.size() - 3);
    std::ofstream(scratch("extra.odtf"), std::ios::binary) << bytes << 'x';
    std::string bad = bytes;
    bad[0] = 'X';
    std::ofstream(scratch("magic.odtf"), std::ios::binary) << bad;
  }
  CHECK_THROWS_AS(read_raw_field(scratch("trunc.odtf")), DataError);
  CHECK_THROWS_AS(read_raw_field(scratch("extra.odtf")), DataError);
  CHECK_THROWS_AS(read_raw_field(scratch("magic.odtf")), DataError);
  CHECK_THROWS_AS(read_raw_field(scratch("missing.odtf")), DataError);
}

TEST_CASE("measurement files round-trip bit for bit") {
  MeasurementSet m;
  m.source_distance = 16.5;
  m.detector_positions = {Vec2(-0.1, 8.0), Vec2(1.0 / 3.0, -8.0), Vec2(2.5e-7, 8.0)};
  for (int p = 0; p < 2; ++p)
    m.records.push_back({0.1 * p - 0.05, testutil::random_complex(3, 10 + p).matrix(),
                         testutil::random_complex(3, 20 + p).matrix()});
  m.metadata["n_b"] = "1.333";
  m.metadata["note"] = "a b c";
  write_measurements(scratch("m.odtm"), m);
  const MeasurementSet back = read_measurements(scratch("m.odtm"));
  REQUIRE(back.records.size() == 2);
  for (int p = 0; p < 2; ++p) {
    CHECK(back.records[p].angle == m.records[p].angle);
    CHECK(back.records[p].y == m.records[p].y);
    CHECK(back.records[p].u_in_on_gamma == m.records[p].u_in_on_gamma);
  }
  REQUIRE(back.detector_positions.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(back.detector_positions[i] == m.detector_positions[i]);
  CHECK(back.source_distance == 16.5);
  CHECK(back.metadata.at("note") == "a b c");
  CHECK(back.metadata.at("n_b") == "1.333");

  const std::string bytes = slurp(scratch("m.odtm"));
  std::ofstream(scratch("m_trunc.odtm"), std::ios::binary) << bytes.substr(0, 40);
  CHECK_THROWS_AS(read_measurements(scratch("m_trunc.odtm")), DataError);
}

TEST_CASE("config text round-trips") {
  const AppConfig defaults;
  CHECK(parse_config(serialize_config(defaults)) == defaults);
  CHECK(parse_config("") == defaults);

  AppConfig c;
  c.gamma = 0.1 + 0.2;
  c.angles_deg = {-60.0, 1.0 / 3.0, 45.0};
  c.momentum = "none";
  c.detector_mode = "lines";
  c.restart = true;
  c.seed = 18446744073709551615ull;
  c.mie_contrasts = {0.25};
  CHECK(parse_config(serialize_config(c)) == c);

  const AppConfig p = parse_config("# comment\n  gamma = 0.5  # trailing\n\nouter_iters=7\n");
  CHECK(p.gamma == 0.5);
  CHECK(p.outer_iters == 7);

  CHECK(config_keys().size() >= 50);
}

TEST_CASE("config errors name the key") {
  auto message_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message_of("gama = 1\n").find("gama") != std::string::npos);
  CHECK(message_of("outer_iters = 1.5\n").find("outer_iters") != std::string::npos);
  CHECK(message_of("momentum = heavy\n").find("momentum") != std::string::npos);
  CHECK(message_of("restart = maybe\n").find("restart") != std::string::npos);
  CHECK(message_of("no equals sign\n") != "");
  CHECK_THROWS_AS(load_config(scratch("absent.cfg")), ConfigError);

  AppConfig c;
  c.subset_size = 0;
  CHECK_THROWS_AS(recon_config_of(c), ConfigError);
}

TEST_CASE("config maps onto the library types") {
  AppConfig c;
  c.angles_deg = {-30.0, 30.0};
  c.momentum = "constant";
  c.momentum_parameter = 0.5;
  const SimProtocol p = protocol_of(c);
  CHECK(p.angles[0] == doctest::Approx(-std::numbers::pi / 6));
  CHECK(p.fine_grid == Grid2D(512, 16.0));
  const ReconConfig r = recon_config_of(c);
  CHECK(r.momentum.kind == MomentumKind::constant);
  CHECK(r.momentum.parameter == 0.5);
  CHECK(physics_of(c) == PhysicsParams(1.333, 1.0));
  c.phantom = "bead";
  c.bead_radius = 1.0;
  const RefractiveMap n = phantom_of(c, Grid2D(32, 4.0));
  CHECK(n.values.maxCoeff() == 1.88);
}

TEST_CASE("PGM output") {
  const Grid2D g(4, 1.0);
  Eigen::ArrayXd v = Eigen::ArrayXd::Zero(16);
  v(g.index(3, 0)) = 2.0;  // top-left pixel of the image
  write_pgm(scratch("a.pgm"), v, g);
  const std::string bytes = slurp(scratch("a.pgm"));
  const std::string header = "P5\n4 4\n255\n";
  REQUIRE(bytes.size() == header.size() + 16);
  CHECK(bytes.substr(0, header.size()) == header);
  CHECK(static_cast<unsigned char>(bytes[header.size()]) == 255);
  CHECK(static_cast<unsigned char>(bytes[header.size() + 1]) == 0);
  CHECK(static_cast<unsigned char>(bytes.back()) == 0);
}

TEST_CASE("trace CSV") {
  ReconTrace t;
  for (int k = 1; k <= 3; ++k) t.records.push_back({k, 1.0 / k, 0.5, 2.0, 5e-3, 0.1, {0, 2}});
  write_trace_csv(scratch("t.csv"), t);
  std::ifstream in(scratch("t.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "iteration,fidelity,tv,grad_norm,gamma,alpha,subset");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
}
