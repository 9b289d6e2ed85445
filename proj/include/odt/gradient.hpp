#pragma once

#include "odt/forward.hpp"
#include "odt/greens.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace odt {

struct IlluminationRecord {
  ComplexField u_in;
  Eigen::VectorXcd u_in_on_gamma;
  Eigen::VectorXcd y_sc;  // y - u_in|Gamma
  double angle = 0.0;
};

struct InnerSolveStats {
  int iterations = 0;
  double final_step_change = 0.0;
  bool converged = false;
};

/// J v for h(f) = f .* u(f):
///   J v = u .* v + f .* (I - G diag f)^{-1} G (u .* v)
/// The inner inverse is a CG solve on the normal equations.
ComplexField jacobian_apply(const GreenKernel& kernel, const ScatteringPotential& f, const ComplexField& u_p,
                            const Eigen::ArrayXd& v, const SolverBudget& inner, InnerSolveStats* stats = nullptr);

/// J^H w = conj(u) .* (w + G^H (I - diag f G^H)^{-1} (f .* w)), complex;
/// the data-term gradient takes its real part.
ComplexField jacobian_adjoint_apply(const GreenKernel& kernel, const ScatteringPotential& f,
                                    const ComplexField& u_p, const ComplexField& w, const SolverBudget& inner,
                                    InnerSolveStats* stats = nullptr);

struct PartialGradient {
  Eigen::ArrayXd grad;
  double fidelity = 0.0;  // 0.5 ||G~ (f .* u_p) - y_sc||^2
  ForwardSolveReport forward;
  InnerSolveStats jacobian;
};

/// Gradient and value of the data term for one illumination.
PartialGradient grad_Dp(const GreenKernel& kernel, const DetectorOperator& detector, const ScatteringPotential& f,
                        const IlluminationRecord& illum, const SolverBudget& forward_budget,
                        const SolverBudget& jacobian_budget);

/// Data-term value of one illumination (forward solve only).
double fidelity_Dp(const GreenKernel& kernel, const DetectorOperator& detector, const ScatteringPotential& f,
                   const IlluminationRecord& illum, const SolverBudget& forward_budget);

struct GradientReport {
  Eigen::ArrayXd grad;
  double fidelity = 0.0;
  std::vector<int> subset;
  std::vector<ForwardSolveReport> forward_reports;
  std::vector<InnerSolveStats> jacobian_solve_reports;
};

/// Sum of per-illumination gradients over `subset`, reduced in ascending
/// index order so the result does not depend on `threads`.
GradientReport grad_D_subset(const GreenKernel& kernel, const DetectorOperator& detector,
                             const ScatteringPotential& f, const std::vector<IlluminationRecord>& illums,
                             std::vector<int> subset, const SolverBudget& forward_budget,
                             const SolverBudget& jacobian_budget, int threads = 1);

/// Random subsets of [0, P): each epoch draws a fresh permutation and hands
/// it out in blocks of `size`; a leftover block shorter than `size` is
/// dropped. Blocks are returned sorted.
class SubsetSchedule {
 public:
  SubsetSchedule(int count, int size, std::uint64_t seed);
  std::vector<int> next();

 private:
  void reshuffle();

  int count_;
  int size_;
  std::mt19937_64 rng_;
  std::vector<int> perm_;
  std::size_t cursor_ = 0;
};

}  // namespace odt
