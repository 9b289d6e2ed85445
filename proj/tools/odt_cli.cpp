// odt_cli: simulate, forward, reconstruct, validate-mie, bench, predict-memory
#include "odt/errors.hpp"
#include "odt/forward.hpp"
#include "odt/gradient.hpp"
#include "odt/io.hpp"
#include "odt/mie.hpp"
#include "odt/recon.hpp"
#include "odt/sim.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <thread>

using namespace odt;

namespace {

struct Common {
  std::string config_path;
  std::string out = "odt";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

int worker_count(const Common& c) {
  if (c.threads) return std::max(1, *c.threads);
  if (const char* env = std::getenv("ODT_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      throw ConfigError("ODT_THREADS is not an integer");
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

AppConfig config_of(const Common& c) {
  AppConfig cfg = c.config_path.empty() ? AppConfig{} : load_config(c.config_path);
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

Grid2D make_grid(int n, double side) {
  try {
    return Grid2D(n, side);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run_simulate(const Common& common) {
  const AppConfig cfg = config_of(common);
  const PhysicsParams phys = physics_of(cfg);
  const SimProtocol protocol = protocol_of(cfg);
  const RefractiveMap phantom = phantom_of(cfg, protocol.fine_grid);
  const auto t0 = std::chrono::steady_clock::now();
  MeasurementSet data = simulate(phantom, protocol, phys, {cfg.sim_max_iters, cfg.sim_tol}, worker_count(common));
  data.metadata["phantom"] = cfg.phantom;
  data.metadata["contrast"] = std::to_string(cfg.contrast);
  write_measurements(common.out + ".odtm", data);
  write_field(common.out + "_phantom.odtf", potential_from_ri(phantom, phys));
  write_pgm(common.out + "_phantom.pgm", phantom.values, phantom.grid);
  std::cout << "simulated " << data.records.size() << " angles, " << data.detector_count() << " detectors in "
            << seconds_since(t0) << " s\n";
  if (!data.metadata["unconverged_angles"].empty())
    std::cerr << "warning: forward solve hit the budget for angles " << data.metadata["unconverged_angles"] << "\n";
  return 0;
}

int run_forward(const Common& common, const std::string& solver, double angle_deg) {
  const AppConfig cfg = config_of(common);
  const PhysicsParams phys = physics_of(cfg);
  const Grid2D grid = make_grid(cfg.fine_n, cfg.fine_side);
  const ScatteringPotential f = potential_from_ri(phantom_of(cfg, grid), phys);
  const GreenKernel kernel(grid, phys);
  if (kernel.undersampled()) std::cerr << "warning: pixel exceeds a quarter background wavelength\n";
  const ComplexField u_in = plane_wave(grid, phys, angle_deg * std::numbers::pi / 180.0, cfg.source_distance);
  const SolverBudget budget{cfg.sim_max_iters, cfg.sim_tol};
  const auto t0 = std::chrono::steady_clock::now();
  const ForwardSolveReport rep =
      solver == "nagd" ? solve_forward_nagd(kernel, f, u_in, budget) : solve_forward_cg(kernel, f, u_in, budget);
  write_field(common.out + "_field.odtf", rep.field);
  write_pgm(common.out + "_abs.pgm", rep.field.values.abs(), grid);
  std::cout << solver << ": " << rep.iterations << " iterations, residual " << rep.residual_norm << ", "
            << (rep.converged ? "converged" : "budget exhausted") << ", " << seconds_since(t0) << " s\n";
  return 0;
}

int run_reconstruct(const Common& common, const std::string& meas_path, const std::string& truth_path) {
  const AppConfig cfg = config_of(common);
  const PhysicsParams phys = physics_of(cfg);
  ReconConfig rc = recon_config_of(cfg);
  rc.threads = worker_count(common);
  const MeasurementSet data = read_measurements(meas_path);
  const Grid2D grid = make_grid(cfg.recon_n, cfg.recon_side);
  const ScatteringPotential f0(grid);

  auto snapshot = [&](int k, const ScatteringPotential& f) {
    write_field(common.out + "_snap_" + std::to_string(k) + ".odtf", f);
  };
  const auto t0 = std::chrono::steady_clock::now();
  const ReconResult res = reconstruct(data, phys, rc, f0, snapshot);
  write_field(common.out + "_f.odtf", res.f);
  write_trace_csv(common.out + "_trace.csv", res.trace);
  write_pgm(common.out + "_n.pgm", ri_from_potential(res.f, phys).values, grid);
  for (const std::string& line : res.trace.log) std::cerr << line << "\n";
  std::cout << "reconstructed " << res.trace.records.size() << " iterations in " << seconds_since(t0) << " s\n";
  if (!res.trace.records.empty()) std::cout << "last subset fidelity " << res.trace.records.back().fidelity << "\n";
  if (!truth_path.empty()) {
    const ScatteringPotential truth = read_potential(truth_path, cfg.recon_side);
    if (!(truth.grid == grid)) throw DataError("truth grid differs from the reconstruction grid");
    std::cout << "snr " << snr_db(res.f, truth) << " dB\n";
  }
  if (res.aborted) {
    std::cerr << "aborted: " << res.abort_reason << "\n";
    return 5;
  }
  return 0;
}

int run_validate_mie(const Common& common) {
  const AppConfig cfg = config_of(common);
  const PhysicsParams phys = physics_of(cfg);
  const Grid2D grid = make_grid(cfg.mie_n, cfg.mie_side);
  const GreenKernel kernel(grid, phys);
  const double angle = cfg.mie_angle_deg * std::numbers::pi / 180.0;
  const ComplexField u_in = plane_wave(grid, phys, angle, cfg.source_distance);
  const SolverBudget budget{cfg.mie_max_iters, 1e-14};

  std::ofstream csv(common.out + "_mie.csv");
  if (!csv) throw DataError("cannot write " + common.out + "_mie.csv");
  csv << "solver,contrast,iteration,eps\n";
  std::cout << "contrast  k_eps0(CG)  k_eps0(NAGD)\n";
  for (double c : cfg.mie_contrasts) {
    if (!(c >= 0.0)) throw ConfigError("mie contrasts must be nonnegative");
    const BeadSpec bead{cfg.mie_radius, phys.n_b() * std::sqrt(1.0 + c), Vec2::Zero()};
    const MieSolution mie = mie_total_field(bead, phys, grid, angle, cfg.source_distance);
    const ScatteringPotential f = potential_from_ri(bead_phantom(grid, bead, phys), phys);
    std::array<int, 2> k_eps{-1, -1};
    for (int s = 0; s < 2; ++s) {
      const char* name = s == 0 ? "cg" : "nagd";
      auto observer = [&](int k, const Eigen::ArrayXcd& u) {
        const double eps = relative_error(ComplexField(grid, u), mie.field);
        csv << name << "," << c << "," << k << "," << eps << "\n";
        if (eps <= cfg.mie_eps0 && k_eps[static_cast<size_t>(s)] < 0) k_eps[static_cast<size_t>(s)] = k;
        return true;
      };
      if (s == 0) solve_forward_cg(kernel, f, u_in, budget, observer);
      else solve_forward_nagd(kernel, f, u_in, budget, observer);
    }
    auto show = [](int k) { return k < 0 ? std::string("not reached") : std::to_string(k); };
    std::cout << c << "  " << show(k_eps[0]) << "  " << show(k_eps[1]) << "\n";
  }
  return 0;
}

int run_bench(const Common& common) {
  const AppConfig cfg = config_of(common);
  const PhysicsParams phys = physics_of(cfg);
  const Grid2D grid = make_grid(cfg.recon_n, cfg.recon_side);
  const ScatteringPotential f = potential_from_ri(phantom_of(cfg, grid), phys);
  auto t0 = std::chrono::steady_clock::now();
  const GreenKernel kernel(grid, phys);
  std::cout << "kernel build " << seconds_since(t0) << " s\n";
  const ComplexField u_in = plane_wave(grid, phys, 0.0, cfg.source_distance);
  t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 20; ++i) (void)kernel.apply(u_in);
  std::cout << "apply_G " << seconds_since(t0) / 20 << " s\n";
  t0 = std::chrono::steady_clock::now();
  const ForwardSolveReport rep = solve_forward_cg(kernel, f, u_in, {cfg.forward_max_iters, cfg.forward_tol});
  std::cout << "forward CG " << seconds_since(t0) << " s (" << rep.iterations << " iterations)\n";
  t0 = std::chrono::steady_clock::now();
  (void)jacobian_adjoint_apply(kernel, f, rep.field, rep.field, {cfg.jac_max_iters, cfg.jac_tol});
  std::cout << "jacobian adjoint " << seconds_since(t0) << " s\n";
  return 0;
}

int run_predict_memory(std::uint64_t n, std::uint64_t k, std::uint64_t threads) {
  const std::uint64_t bytes = predict_memory_delta(n, k, threads);
  std::cout << format_bytes(bytes) << " (" << bytes << " B)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optical diffraction tomography in 2-D"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "key=value configuration file");
    sub->add_option("--out", common.out, "output prefix");
    sub->add_option("--seed", common.seed, "overrides the config seed");
    sub->add_option("--threads", common.threads, "worker threads (default: ODT_THREADS or all cores)");
  };

  auto* sim = app.add_subcommand("simulate", "simulate multi-angle measurements");
  add_common(sim);

  std::string solver = "cg";
  double angle_deg = 0.0;
  auto* fwd = app.add_subcommand("forward", "solve the forward problem for one angle");
  add_common(fwd);
  fwd->add_option("--solver", solver)->check(CLI::IsMember({"cg", "nagd"}));
  fwd->add_option("--angle", angle_deg, "incidence angle in degrees");

  std::string meas_path, truth_path;
  auto* rec = app.add_subcommand("reconstruct", "reconstruct a potential from measurements");
  add_common(rec);
  rec->add_option("--measurements", meas_path)->required();
  rec->add_option("--truth", truth_path, "potential file for an SNR report");

  auto* mie = app.add_subcommand("validate-mie", "CG and NAGD against the Mie solution");
  add_common(mie);

  auto* bench = app.add_subcommand("bench", "time the main kernels");
  add_common(bench);

  std::uint64_t mem_n = 0, mem_k = 0, mem_t = 1;
  auto* mem = app.add_subcommand("predict-memory", "memory overhead N * K * threads * 16 bytes");
  mem->add_option("N", mem_n)->required();
  mem->add_option("K", mem_k)->required();
  mem->add_option("threads", mem_t);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*sim) return run_simulate(common);
    if (*fwd) return run_forward(common, solver, angle_deg);
    if (*rec) return run_reconstruct(common, meas_path, truth_path);
    if (*mie) return run_validate_mie(common);
    if (*bench) return run_bench(common);
    if (*mem) return run_predict_memory(mem_n, mem_k, mem_t);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "validation failed: " << e.what() << "\n";
    return 4;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
