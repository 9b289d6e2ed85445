#include "odt/gradient.hpp"

#include "odt/linear_solvers.hpp"
#include "odt/parallel.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

namespace odt {
namespace {

// (I - G diag f) and its adjoint on raw arrays.
struct LsPair {
  const GreenKernel& kernel;
  const Eigen::ArrayXcd fc;

  Eigen::ArrayXcd forward(const Eigen::ArrayXcd& u) const {
    return u - kernel.apply(ComplexField(kernel.grid(), fc * u)).values;
  }
  Eigen::ArrayXcd adjoint(const Eigen::ArrayXcd& u) const {
    return u - fc * kernel.apply_adjoint(ComplexField(kernel.grid(), u)).values;
  }
};

void fill_stats(InnerSolveStats* stats, const LinearSolveResult& res) {
  if (!stats) return;
  stats->iterations = res.iterations;
  stats->final_step_change = res.final_step_change;
  stats->converged = res.converged;
}

void check_grids(const GreenKernel& kernel, const ScatteringPotential& f, const ComplexField& u_p) {
  if (!(f.grid == kernel.grid()) || !(u_p.grid == kernel.grid()))
    throw std::invalid_argument("jacobian: grid mismatch");
}

}  // namespace

ComplexField jacobian_apply(const GreenKernel& kernel, const ScatteringPotential& f, const ComplexField& u_p,
                            const Eigen::ArrayXd& v, const SolverBudget& inner, InnerSolveStats* stats) {
  check_grids(kernel, f, u_p);
  if (v.size() != f.values.size()) throw std::invalid_argument("jacobian_apply: direction size mismatch");
  const LsPair ls{kernel, f.values.cast<cplx>()};
  const Eigen::ArrayXcd uv = u_p.values * v.cast<cplx>();
  const Eigen::ArrayXcd rhs = kernel.apply(ComplexField(kernel.grid(), uv)).values;
  auto res = cgnr([&](const Eigen::ArrayXcd& x) { return ls.forward(x); },
                  [&](const Eigen::ArrayXcd& x) { return ls.adjoint(x); }, rhs, rhs, inner);
  fill_stats(stats, res);
  return ComplexField(kernel.grid(), uv + ls.fc * res.x);
}

ComplexField jacobian_adjoint_apply(const GreenKernel& kernel, const ScatteringPotential& f,
                                    const ComplexField& u_p, const ComplexField& w, const SolverBudget& inner,
                                    InnerSolveStats* stats) {
  check_grids(kernel, f, u_p);
  require_same_grid(u_p, w);
  const LsPair ls{kernel, f.values.cast<cplx>()};
  const Eigen::ArrayXcd fw = ls.fc * w.values;
  // (I - diag f G^H) z = f .* w; the roles of forward/adjoint swap here.
  auto res = cgnr([&](const Eigen::ArrayXcd& x) { return ls.adjoint(x); },
                  [&](const Eigen::ArrayXcd& x) { return ls.forward(x); }, fw, fw, inner);
  fill_stats(stats, res);
  const Eigen::ArrayXcd back = kernel.apply_adjoint(ComplexField(kernel.grid(), res.x)).values;
  return ComplexField(kernel.grid(), u_p.values.conjugate() * (w.values + back));
}

PartialGradient grad_Dp(const GreenKernel& kernel, const DetectorOperator& detector, const ScatteringPotential& f,
                        const IlluminationRecord& illum, const SolverBudget& forward_budget,
                        const SolverBudget& jacobian_budget) {
  if (illum.y_sc.size() != detector.rows()) throw std::invalid_argument("grad_Dp: detector count mismatch");
  PartialGradient out{Eigen::ArrayXd(), 0.0, solve_forward_cg(kernel, f, illum.u_in, forward_budget), {}};
  const ComplexField& u = out.forward.field;
  const Eigen::VectorXcd source = (f.values.cast<cplx>() * u.values).matrix();
  const Eigen::VectorXcd residual = detector.apply(source) - illum.y_sc;
  out.fidelity = 0.5 * residual.squaredNorm();
  const ComplexField back(kernel.grid(), detector.apply_adjoint(residual).array());
  out.grad = jacobian_adjoint_apply(kernel, f, u, back, jacobian_budget, &out.jacobian).values.real();
  return out;
}

double fidelity_Dp(const GreenKernel& kernel, const DetectorOperator& detector, const ScatteringPotential& f,
                   const IlluminationRecord& illum, const SolverBudget& forward_budget) {
  const auto fwd = solve_forward_cg(kernel, f, illum.u_in, forward_budget);
  const Eigen::VectorXcd source = (f.values.cast<cplx>() * fwd.field.values).matrix();
  return 0.5 * (detector.apply(source) - illum.y_sc).squaredNorm();
}

GradientReport grad_D_subset(const GreenKernel& kernel, const DetectorOperator& detector,
                             const ScatteringPotential& f, const std::vector<IlluminationRecord>& illums,
                             std::vector<int> subset, const SolverBudget& forward_budget,
                             const SolverBudget& jacobian_budget, int threads) {
  if (subset.empty()) throw std::invalid_argument("grad_D_subset: empty subset");
  std::sort(subset.begin(), subset.end());
  for (int p : subset)
    if (p < 0 || p >= static_cast<int>(illums.size())) throw std::out_of_range("grad_D_subset: index out of range");

  std::vector<std::optional<PartialGradient>> parts(subset.size());
  parallel_for(static_cast<int>(subset.size()), threads, [&](int i) {
    parts[static_cast<size_t>(i)].emplace(grad_Dp(kernel, detector, f, illums[static_cast<size_t>(subset[static_cast<size_t>(i)])], forward_budget,
                jacobian_budget));
  });

  GradientReport rep;
  rep.grad = Eigen::ArrayXd::Zero(f.values.size());
  rep.subset = std::move(subset);
  for (auto& slot : parts) {
    auto& part = *slot;
    rep.grad += part.grad;
    rep.fidelity += part.fidelity;
    rep.forward_reports.push_back(std::move(part.forward));
    rep.jacobian_solve_reports.push_back(part.jacobian);
  }
  return rep;
}

SubsetSchedule::SubsetSchedule(int count, int size, std::uint64_t seed)
    : count_(count), size_(size), rng_(seed) {
  if (count < 1 || size < 1 || size > count) throw std::invalid_argument("SubsetSchedule: need 1 <= size <= count");
  reshuffle();
}

void SubsetSchedule::reshuffle() {
  perm_.resize(static_cast<size_t>(count_));
  for (int i = 0; i < count_; ++i) perm_[static_cast<size_t>(i)] = i;
  // Fisher-Yates with raw engine output: identical across standard libraries.
  for (int i = count_ - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng_() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm_[static_cast<size_t>(i)], perm_[static_cast<size_t>(j)]);
  }
  cursor_ = 0;
}

std::vector<int> SubsetSchedule::next() {
  if (cursor_ + static_cast<size_t>(size_) > perm_.size()) reshuffle();
  std::vector<int> block(perm_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                         perm_.begin() + static_cast<std::ptrdiff_t>(cursor_) + size_);
  cursor_ += static_cast<size_t>(size_);
  std::sort(block.begin(), block.end());
  return block;
}

}  // namespace odt
