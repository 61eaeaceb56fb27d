#pragma once

// Lie-Suzuki-Trotter product formulas as ordered stage lists over the
// partition groups, and their application to group spectra.

#include "lowtrot/core.hpp"
#include "lowtrot/lattice.hpp"
#include "lowtrot/operator.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace lowtrot {

/// One factor e^{-i H_group coefficient t}. `group` is 1-based.
struct Stage {
  int group = 1;
  double coefficient = 0.0;

  friend bool operator==(const Stage&, const Stage&) = default;
};

/// Stages are listed in application order: stages.front() acts on the state
/// first, so T(t) = e^{-iH_{γ_last} α_last t} ··· e^{-iH_{γ_1} α_1 t}.
struct FormulaPlan {
  int order = 1;
  int gamma_count = 1;
  int c_p = 1;
  std::vector<Stage> stages;
};

/// Stage multiplier of the Suzuki construction: c_1 = 1, c_p = 2·5^{p/2-1}.
inline int suzuki_stage_multiplier(int p) {
  if (p == 1) return 1;
  if (p < 1 || p % 2 != 0) throw Error("suzuki_stage_multiplier: p must be 1 or even");
  int c = 2;
  for (int k = 2; k <= p / 2; ++k) c *= 5;
  return c;
}

namespace detail {

inline std::vector<Stage> scaled(const std::vector<Stage>& stages, double factor) {
  std::vector<Stage> out = stages;
  for (auto& s : out) s.coefficient *= factor;
  return out;
}

inline void append(std::vector<Stage>& dst, const std::vector<Stage>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

}  // namespace detail

inline FormulaPlan suzuki_plan(int p, int gamma_count) {
  if (gamma_count < 1) throw Error("suzuki_plan: Gamma must be >= 1");
  if (p < 1) throw Error("suzuki_plan: order must be >= 1");
  if (p > 1 && p % 2 != 0) throw Error("suzuki_plan: odd orders above 1 are not supported");
  if (p > 6) throw Error("suzuki_plan: orders above 6 are not supported");

  FormulaPlan plan;
  plan.order = p;
  plan.gamma_count = gamma_count;
  plan.c_p = suzuki_stage_multiplier(p);

  std::vector<Stage> first;
  for (int g = 1; g <= gamma_count; ++g) first.push_back({g, 1.0});
  if (p == 1) {
    plan.stages = first;
    return plan;
  }
  // T_2(t) = T_1(-t/2)† T_1(t/2): H_1..H_Γ at t/2, then H_Γ..H_1 at t/2.
  std::vector<Stage> current = detail::scaled(first, 0.5);
  for (int g = gamma_count; g >= 1; --g) current.push_back({g, 0.5});

  for (int k = 2; 2 * k <= p; ++k) {
    const double u = 1.0 / (4.0 - std::pow(4.0, 1.0 / (2.0 * k - 1.0)));
    const auto outer = detail::scaled(current, u);
    const auto middle = detail::scaled(current, 1.0 - 4.0 * u);
    std::vector<Stage> next;
    detail::append(next, outer);
    detail::append(next, outer);
    detail::append(next, middle);
    detail::append(next, outer);
    detail::append(next, outer);
    current = std::move(next);
  }
  plan.stages = std::move(current);
  return plan;
}

/// Violations of the plan invariants (empty when the plan is well formed).
inline std::vector<std::string> plan_issues(const FormulaPlan& plan) {
  std::vector<std::string> issues;
  if (static_cast<int>(plan.stages.size()) != plan.c_p * plan.gamma_count) {
    issues.push_back("stage count differs from c_p * Gamma");
  }
  std::vector<double> sums(static_cast<std::size_t>(std::max(plan.gamma_count, 0)), 0.0);
  for (const auto& s : plan.stages) {
    if (s.group < 1 || s.group > plan.gamma_count) {
      issues.push_back("stage group label out of range");
      continue;
    }
    if (std::abs(s.coefficient) > 1.0 + 1e-15) issues.push_back("stage coefficient exceeds 1");
    sums[static_cast<std::size_t>(s.group - 1)] += s.coefficient;
  }
  for (std::size_t g = 0; g < sums.size(); ++g) {
    if (std::abs(sums[g] - 1.0) > 1e-12) {
      std::ostringstream os;
      os << "coefficients of group " << g + 1 << " sum to " << sums[g] << ", not 1";
      issues.push_back(os.str());
    }
  }
  return issues;
}

/// Stage table as CSV (stage, gamma, alpha) for audit.
inline std::string plan_table_csv(const FormulaPlan& plan) {
  std::ostringstream os;
  os.precision(17);
  os << "stage,gamma,alpha\n";
  for (std::size_t v = 0; v < plan.stages.size(); ++v) {
    os << v + 1 << ',' << plan.stages[v].group << ',' << plan.stages[v].coefficient << '\n';
  }
  return os.str();
}

/// T_p(t) applied to the columns of `block`.
inline Matrix apply_plan_to(const FormulaPlan& plan, const std::vector<SpectralData>& parts,
                            double t, Matrix block) {
  if (static_cast<int>(parts.size()) != plan.gamma_count) {
    throw Error("apply_plan: number of group spectra differs from Gamma");
  }
  for (const auto& part : parts) {
    if (part.dim() != block.rows()) throw Error("apply_plan: dimension mismatch");
  }
  for (const auto& stage : plan.stages) {
    block = evolve_apply(parts[static_cast<std::size_t>(stage.group - 1)], stage.coefficient * t,
                         block);
  }
  return block;
}

/// T_p(t) = Π_v e^{-iH_{γ_v} α_v t}, rightmost (first) stage applied first.
inline DenseOperator apply_plan(const FormulaPlan& plan, const std::vector<SpectralData>& parts,
                                double t) {
  if (parts.empty()) throw Error("apply_plan: no group spectra");
  const auto dim = parts.front().dim();
  return DenseOperator(apply_plan_to(plan, parts, t, Matrix::Identity(dim, dim)), false,
                       "trotter_step");
}

struct OrderFit {
  bool exact = false;            // every error below 1e-13: no slope
  std::optional<double> slope;   // least-squares slope of log error vs log t
  double residual = 0.0;         // RMS residual of the fit in log space
  std::vector<double> errors;
};

/// Fits log ‖T_p(t) − e^{-iHt}‖ against log t.
inline OrderFit order_check(const FormulaPlan& plan, const SpectralData& hamiltonian,
                            const std::vector<SpectralData>& parts,
                            const std::vector<double>& t_grid) {
  if (t_grid.size() < 2) throw Error("order_check: need at least two times");
  OrderFit fit;
  for (double t : t_grid) {
    const Matrix exact = evolve(hamiltonian, t).matrix();
    const Matrix trotter = apply_plan(plan, parts, t).matrix();
    fit.errors.push_back(spectral_norm(Matrix(trotter - exact)));
  }
  if (std::all_of(fit.errors.begin(), fit.errors.end(), [](double e) { return e < 1e-13; })) {
    fit.exact = true;
    return fit;
  }
  const auto n = static_cast<double>(t_grid.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double x = std::log(t_grid[i]);
    const double y = std::log(std::max(fit.errors[i], 1e-300));
    xs.push_back(x);
    ys.push_back(y);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + slope * xs[i]);
    ss += r * r;
  }
  fit.slope = slope;
  fit.residual = std::sqrt(ss / n);
  return fit;
}

inline OrderFit order_check(const FormulaPlan& plan, const HamiltonianSpec& spec,
                            const std::vector<double>& t_grid) {
  const auto assembled = assemble(spec);
  std::vector<SpectralData> parts;
  for (const auto& part : assembled.parts) parts.push_back(eigh(part));
  return order_check(plan, eigh(assembled.hamiltonian), parts, t_grid);
}

/// n logarithmically spaced points in [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    const double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    out.push_back(lo * std::pow(hi / lo, f));
  }
  return out;
}

}  // namespace lowtrot
