#pragma once

#include "odt/gradient.hpp"
#include "odt/measurement.hpp"
#include "odt/prox_tv.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace odt {

enum class MomentumKind { fista, constant, none };

struct MomentumRule {
  MomentumKind kind = MomentumKind::fista;
  double parameter = 0.0;  // alpha for the constant rule
};

/// Extrapolation weights alpha^k. FISTA: t_1 = 1,
/// t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2, alpha^k = (t_k - 1) / t_{k+1}.
class MomentumSequence {
 public:
  explicit MomentumSequence(MomentumRule rule) : rule_(rule) {}
  double next();
  void restart() { t_ = 1.0; }

 private:
  MomentumRule rule_;
  double t_ = 1.0;
};

// gamma and mu refer to the dimensionless contrast f / k_bg^2, so their
// values do not depend on the wavelength scale of the grid.
struct ReconConfig {
  double gamma = 5e-3;
  double mu = 3.3e-2;
  int outer_iters = 200;
  int subset_size = 8;
  SolverBudget forward_budget{120, 1e-4};
  SolverBudget jac_budget{120, 1e-4};
  ProxParams prox{};  // mu is overwritten by gamma * mu
  MomentumRule momentum{};
  bool restart = false;  // gradient-based momentum restart
  std::uint64_t seed = 0;
  int threads = 1;
  int snapshot_every = 0;
};

struct ReconIterate {
  int iteration = 0;
  double fidelity = 0.0;  // data term over the subset, at the gradient point
  double tv = 0.0;        // TV of the new iterate
  double grad_norm = 0.0;
  double gamma = 0.0;
  double alpha = 0.0;
  std::vector<int> subset;
};

struct ReconTrace {
  std::vector<ReconIterate> records;
  std::vector<std::string> log;
};

struct ReconResult {
  ScatteringPotential f;
  ReconTrace trace;
  bool aborted = false;  // a non-finite iterate stopped the loop; f is the last finite one
  std::string abort_reason;
};

using SnapshotFn = std::function<void(int iteration, const ScatteringPotential& f)>;

/// Accelerated forward-backward splitting:
///   d^k = sum_{p in w^k} Re(J_p^H G~^H (G~ (v .* u_p(v)) - y_p^sc))
///   f^k = prox_{gamma mu R}(v^k - gamma d^k)
///   v^{k+1} = f^k + alpha^k (f^k - f^{k-1})
/// (f and d in units of k_bg^2, see ReconConfig.)
/// With momentum none and full subsets, gamma is halved (at most 3 times)
/// whenever the objective increases, and the step is redone.
ReconResult reconstruct(const MeasurementSet& data, const PhysicsParams& phys, const ReconConfig& config,
                        const ScatteringPotential& f0, const SnapshotFn& on_snapshot = {});

struct ObjectiveValue {
  double fidelity = 0.0;
  double tv = 0.0;
  bool feasible = true;
};

/// D(f) over all angles and TV(f); nonnegativity is reported as a flag.
ObjectiveValue fidelity_and_reg(const ScatteringPotential& f, const MeasurementSet& data, const PhysicsParams& phys,
                                const ReconConfig& config);

}  // namespace odt
