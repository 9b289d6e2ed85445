#include "odt/recon.hpp"

#include "odt/errors.hpp"
#include "odt/parallel.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace odt {

double MomentumSequence::next() {
  switch (rule_.kind) {
    case MomentumKind::none:
      return 0.0;
    case MomentumKind::constant:
      return rule_.parameter;
    case MomentumKind::fista: {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_ * t_));
      const double alpha = (t_ - 1.0) / t_next;
      t_ = t_next;
      return alpha;
    }
  }
  return 0.0;
}

namespace {

struct Problem {
  GreenKernel kernel;
  DetectorOperator detector;
  std::vector<IlluminationRecord> illums;

  Problem(const MeasurementSet& data, const Grid2D& grid, const PhysicsParams& phys)
      : kernel(grid, phys),
        detector(build_detector_operator(DetectorGeometry{data.detector_positions, grid}, phys)),
        illums(illuminations_for(data, grid, phys)) {}
};

void check_config(const ReconConfig& c, int angles) {
  if (!(c.gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (!(c.mu >= 0.0)) throw ConfigError("mu must be nonnegative");
  if (c.outer_iters < 1) throw ConfigError("outer_iters must be >= 1");
  if (c.subset_size < 1 || c.subset_size > angles)
    throw ConfigError("subset_size must lie in [1, number of angles]");
}

}  // namespace

ReconResult reconstruct(const MeasurementSet& data, const PhysicsParams& phys, const ReconConfig& config,
                        const ScatteringPotential& f0, const SnapshotFn& on_snapshot) {
  validate(data);
  const Grid2D& grid = f0.grid;
  const int angles = static_cast<int>(data.records.size());
  check_config(config, angles);
  const Problem prob(data, grid, phys);

  SubsetSchedule schedule(angles, config.subset_size, config.seed);
  MomentumSequence momentum(config.momentum);
  const bool safeguarded = config.momentum.kind == MomentumKind::none && config.subset_size == angles;

  // gamma and mu are given for the contrast f / k^2; in f units the step
  // is gamma k^4 and the TV weight mu / k^2.
  const double k2 = phys.k_bg() * phys.k_bg();
  const double mu_f = config.mu / k2;
  double gamma = config.gamma;
  auto prox_step = [&](const Eigen::ArrayXd& point, const Eigen::ArrayXd& grad) {
    const Eigen::ArrayXd moved = point - gamma * k2 * k2 * grad;
    if (config.mu == 0.0) return Eigen::ArrayXd(moved.max(0.0));
    ProxParams pp = config.prox;
    pp.mu = gamma * k2 * k2 * mu_f;
    return prox_R(moved, grid, pp);
  };
  auto gradient_at = [&](const Eigen::ArrayXd& point, std::vector<int> subset) {
    return grad_D_subset(prob.kernel, prob.detector, ScatteringPotential(grid, point), prob.illums,
                         std::move(subset), config.forward_budget, config.jac_budget, config.threads);
  };

  ReconResult result{f0, {}, false, {}};
  Eigen::ArrayXd f = f0.values;
  Eigen::ArrayXd f_prev = f0.values;
  Eigen::ArrayXd v = f0.values;

  // Safeguarded mode keeps the gradient and objective of the accepted iterate.
  GradientReport accepted;
  double accepted_objective = 0.0;
  int halvings = 0;

  try {
    if (safeguarded) {
      std::vector<int> all(static_cast<size_t>(angles));
      std::iota(all.begin(), all.end(), 0);
      accepted = gradient_at(f, all);
      accepted_objective = accepted.fidelity + mu_f * tv_norm(f, grid);
    }

    for (int k = 1; k <= config.outer_iters; ++k) {
      ReconIterate rec;
      rec.iteration = k;

      if (safeguarded) {
        Eigen::ArrayXd candidate = prox_step(f, accepted.grad);
        GradientReport next = gradient_at(candidate, accepted.subset);
        double objective = next.fidelity + mu_f * tv_norm(candidate, grid);
        while (objective > accepted_objective && halvings < 3) {
          gamma *= 0.5;
          ++halvings;
          std::ostringstream msg;
          msg << "iteration " << k << ": objective increased, gamma halved to " << gamma;
          result.trace.log.push_back(msg.str());
          candidate = prox_step(f, accepted.grad);
          next = gradient_at(candidate, accepted.subset);
          objective = next.fidelity + mu_f * tv_norm(candidate, grid);
        }
        rec.grad_norm = accepted.grad.matrix().norm();
        f = std::move(candidate);
        accepted = std::move(next);
        accepted_objective = objective;
        rec.fidelity = accepted.fidelity;
        rec.subset = accepted.subset;
      } else {
        const GradientReport rep = gradient_at(v, schedule.next());
        Eigen::ArrayXd f_new = prox_step(v, rep.grad);
        double alpha = momentum.next();
        if (config.restart && ((v - f_new) * (f_new - f_prev)).sum() > 0.0) {
          momentum.restart();
          alpha = 0.0;
          result.trace.log.push_back("iteration " + std::to_string(k) + ": momentum restarted");
        }
        v = f_new + alpha * (f_new - f_prev);
        f_prev = f_new;
        f = std::move(f_new);
        rec.fidelity = rep.fidelity;
        rec.grad_norm = rep.grad.matrix().norm();
        rec.subset = rep.subset;
        rec.alpha = alpha;
      }

      if (!f.allFinite()) throw NumericError("non-finite iterate at outer iteration " + std::to_string(k));
      rec.tv = tv_norm(f, grid);
      rec.gamma = gamma;
      result.f.values = f;
      result.trace.records.push_back(std::move(rec));
      if (on_snapshot && config.snapshot_every > 0 && k % config.snapshot_every == 0) on_snapshot(k, result.f);
    }
  } catch (const NumericError& e) {
    result.aborted = true;
    result.abort_reason = e.what();
  }
  return result;
}

ObjectiveValue fidelity_and_reg(const ScatteringPotential& f, const MeasurementSet& data, const PhysicsParams& phys,
                                const ReconConfig& config) {
  validate(data);
  const Problem prob(data, f.grid, phys);
  std::vector<double> parts(prob.illums.size());
  parallel_for(static_cast<int>(parts.size()), config.threads, [&](int p) {
    parts[static_cast<size_t>(p)] =
        fidelity_Dp(prob.kernel, prob.detector, f, prob.illums[static_cast<size_t>(p)], config.forward_budget);
  });
  ObjectiveValue out;
  for (double d : parts) out.fidelity += d;
  out.tv = tv_norm(f.values, f.grid);
  out.feasible = (f.values >= 0.0).all();
  return out;
}

}  // namespace odt
