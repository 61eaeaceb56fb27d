#pragma once

// Invariant battery run by `lowtrot verify`. Each check yields one row of
// check,status,measured,limit,detail where `measured` is the worst observed
// value of the checked quantity and `limit` the threshold it is held to.

#include "lowtrot/bounds.hpp"
#include "lowtrot/csv.hpp"
#include "lowtrot/error_lab.hpp"
#include "lowtrot/lattice.hpp"
#include "lowtrot/operator.hpp"
#include "lowtrot/product_formula.hpp"
#include "lowtrot/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace lowtrot {

struct VerifyOptions {
  std::uint64_t seed = 0;
  int workers = 1;
  bool inject_fault = false;  // flips the sign of one coefficient in the order-check plans
  std::size_t dim_cap = kDefaultDimensionCap;
};

struct CheckResult {
  std::string id;
  bool passed = false;
  double measured = 0.0;
  double limit = 0.0;
  std::string detail;
};

inline const char* kVerifyHeader = "check,status,measured,limit,detail";

inline std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string verify_csv(const std::vector<CheckResult>& rows) {
  std::string out = kVerifyHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += r.id + ',' + (r.passed ? "pass" : "fail") + ',' + format_double(r.measured) + ',' +
           format_double(r.limit) + ',' + quoted(r.detail) + '\n';
  }
  return out;
}

/// Plan with the sign of the coefficient on stage `index` flipped.
inline FormulaPlan with_flipped_stage(FormulaPlan plan, std::size_t index = 0) {
  if (index < plan.stages.size()) plan.stages[index].coefficient = -plan.stages[index].coefficient;
  return plan;
}

namespace detail {

/// Tracks the worst (largest) value of a quantity that must stay <= limit.
struct Worst {
  double value = -std::numeric_limits<double>::infinity();
  int samples = 0;
  int violations = 0;
  void add(double v, double lim) {
    value = std::max(value, v - lim);
    ++samples;
    if (!(v <= lim)) ++violations;
  }
};

inline CheckResult margin_result(const std::string& id, const Worst& w, const std::string& what) {
  CheckResult r;
  r.id = id;
  r.passed = w.samples > 0 && w.violations == 0;
  r.measured = w.value;
  r.limit = 0.0;
  r.detail = what + " (max of value-bound over " + std::to_string(w.samples) + " points; " +
             std::to_string(w.violations) + " violations)";
  return r;
}

inline std::vector<HamiltonianSpec> verify_models(std::size_t cap) {
  return {build_aklt(3, cap), build_aklt(4, cap), build_aklt(5, cap), build_mg(4, cap),
          build_mg(6, cap),   build_mg(8, cap),   build_long_range_heisenberg(4, 2.0, 1.0, cap)};
}

inline std::vector<HamiltonianSpec> small_models(std::size_t cap) {
  return {build_aklt(3, cap), build_aklt(4, cap), build_aklt(5, cap), build_mg(4, cap),
          build_mg(5, cap)};
}

/// Σ_{r ≥ m} r^{-ν} ≤ m^{1-ν}/(ν-1) + m^{-ν}
inline double zeta_tail_bound(double m, double nu) {
  return std::pow(m, 1.0 - nu) / (nu - 1.0) + std::pow(m, -nu);
}

}  // namespace detail

inline std::vector<CheckResult> run_verify(const VerifyOptions& options = {}) {
  using detail::Worst;
  const std::size_t cap = options.dim_cap;
  std::vector<std::function<CheckResult()>> checks;

  checks.push_back([cap] {
    Worst w;
    for (const auto& spec : detail::verify_models(cap)) {
      for (const auto& term : spec.terms()) w.add(-min_eigenvalue(term.block()), 1e-10);
    }
    return detail::margin_result("V01_builders_psd", w, "-lambda_min of every built term");
  });

  checks.push_back([cap] {
    Worst w;
    for (const auto& spec : detail::verify_models(cap)) {
      const auto assembled = assemble(spec);
      Matrix sum_parts = Matrix::Zero(assembled.hamiltonian.dim(), assembled.hamiltonian.dim());
      for (const auto& part : assembled.parts) sum_parts += part.matrix();
      Matrix sum_terms = Matrix::Zero(sum_parts.rows(), sum_parts.cols());
      for (const auto& term : spec.terms()) sum_terms += embed(term, spec.lattice()).matrix();
      w.add(max_abs_entry(Matrix(sum_parts - sum_terms)), 1e-12);
    }
    return detail::margin_result("V02_partition_reconstruction", w,
                                 "max entry of sum of groups minus sum of terms");
  });

  checks.push_back([cap] {
    Worst w;
    for (const auto& spec : detail::verify_models(cap)) {
      if (spec.model_tag() == "lr_heisenberg") continue;
      const auto s = eigh(assemble(spec).hamiltonian);
      w.add(std::abs(s.min_eigenvalue()), 1e-10);
    }
    return detail::margin_result("V03_frustration_free", w, "|lambda_min(H)| for aklt and mg");
  });

  checks.push_back([cap] {
    Worst w;
    std::string failed;
    for (const auto& spec : detail::verify_models(cap)) {
      const auto report = validate(spec);
      w.add(static_cast<double>(report.failures.size()), 0.0);
      if (!report.passed) failed += " " + spec.model_tag() + std::to_string(spec.num_sites());
    }
    auto r = detail::margin_result("V04_validate_builders", w, "validation failures per model");
    if (!failed.empty()) r.detail += "; failing:" + failed;
    return r;
  });

  checks.push_back([] {
    // g(2N) - g(N) is bounded by the coupling tail beyond the half chain; for
    // fast decay the increment also drops below 1e-6 outright.
    Worst w;
    for (double nu : {2.0, 3.0}) {
      for (int n = 32; n <= 512; n *= 2) {
        const double inc = long_range_extensiveness(2 * n, nu, 1.0) -
                           long_range_extensiveness(n, nu, 1.0);
        const double m = std::floor((n - 1) / 2.0);
        w.add(inc, 6.0 * detail::zeta_tail_bound(m, nu));
      }
    }
    for (int n = 32; n <= 512; n *= 2) {
      const double inc =
          long_range_extensiveness(2 * n, 8.0, 1.0) - long_range_extensiveness(n, 8.0, 1.0);
      w.add(inc, 1e-6);
    }
    return detail::margin_result("V05_long_range_g_bounded", w,
                                 "g(2N)-g(N) against coupling tail (nu=2,3) and 1e-6 (nu=8)");
  });

  checks.push_back([seed = options.seed, cap] {
    Worst w;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Matrix a(50, 50);
    for (Eigen::Index i = 0; i < 50; ++i)
      for (Eigen::Index j = 0; j < 50; ++j) a(i, j) = cplx(normal(rng), normal(rng));
    a = (a + a.adjoint()).eval() / 2.0;
    std::vector<Matrix> sources{a, assemble(build_aklt(4, cap)).hamiltonian.matrix()};
    for (const auto& m : sources) {
      const auto s = eigh(m);
      const Matrix rec = s.eigenvectors * s.eigenvalues.cast<cplx>().asDiagonal() *
                         s.eigenvectors.adjoint();
      w.add(spectral_norm(Matrix(rec - m)), 1e-9 * (1.0 + spectral_norm(m)));
      const Matrix gram = s.eigenvectors.adjoint() * s.eigenvectors;
      w.add(max_abs_entry(Matrix(gram - Matrix::Identity(m.rows(), m.cols()))), 1e-10);
      for (Eigen::Index i = 1; i < s.eigenvalues.size(); ++i) {
        w.add(s.eigenvalues(i - 1) - s.eigenvalues(i), 0.0);
      }
    }
    return detail::margin_result("V06_spectral_reconstruction", w,
                                 "reconstruction, orthonormality and ordering");
  });

  checks.push_back([cap] {
    Worst w;
    for (const auto& spec : detail::verify_models(cap)) {
      const TrotterLab lab(spec);
      const auto id = Matrix::Identity(lab.dim(), lab.dim());
      for (double t : {0.0, 0.1, 1.0, -0.7}) {
        const Matrix u = lab.exact_propagator(t);
        w.add(spectral_norm(Matrix(u.adjoint() * u - id)), 1e-9);
        for (int p : {1, 2, 4}) {
          const Matrix v = lab.trotter_step(suzuki_plan(p, lab.gamma_count()), t);
          w.add(spectral_norm(Matrix(v.adjoint() * v - id)), 1e-9);
        }
      }
    }
    return detail::margin_result("V07_unitarity", w, "||U^dag U - I|| for exact and product steps");
  });

  checks.push_back([cap] {
    Worst w;
    for (const auto& spec : detail::small_models(cap)) {
      const TrotterLab lab(spec);
      const Matrix u = lab.exact_propagator(0.37);
      for (double delta : {0.0, 0.5, 1.0, 2.0}) {
        const Matrix pi = low_energy_projector(lab.spectrum(), delta).matrix();
        w.add(max_abs_entry(Matrix(pi * pi - pi)), 1e-10);
        w.add(hermiticity_defect(pi), 1e-10);
        w.add(spectral_norm(Matrix(u * pi - pi * u)), 1e-9);
        w.add(std::abs(pi.trace().real() - static_cast<double>(lab.spectrum().count_at_most(delta))),
              1e-9);
      }
    }
    return detail::margin_result("V08_projector_properties", w,
                                 "idempotence, hermiticity, rank and [U,Pi]");
  });

  checks.push_back([cap] {
    Worst w;
    for (const auto& spec : detail::verify_models(cap)) {
      const TrotterLab lab(spec);
      const double norm = std::max(std::abs(lab.spectrum().min_eigenvalue()),
                                   std::abs(lab.spectrum().max_eigenvalue()));
      w.add(norm, spec.num_sites() * lab.extensiveness() * (1.0 + 1e-12));
    }
    return detail::margin_result("V09_norm_at_most_Ng", w, "||H|| against N*g");
  });

  checks.push_back([cap] {
    Worst w;
    for (const auto& spec : detail::verify_models(cap)) {
      const auto assembled = assemble(spec);
      const auto s = eigh(assembled.hamiltonian);
      const double eig = std::max(std::abs(s.min_eigenvalue()), std::abs(s.max_eigenvalue()));
      w.add(std::abs(spectral_norm(assembled.hamiltonian) - eig), 1e-10 * std::max(1.0, eig));
    }
    return detail::margin_result("V10_spectral_norm_hermitian", w,
                                 "|spectral_norm - max|eigenvalue||");
  });

  checks.push_back([] {
    Worst w;
    for (int p : {1, 2, 4, 6}) {
      for (int gamma : {1, 2, 3}) {
        const auto plan = suzuki_plan(p, gamma);
        w.add(static_cast<double>(plan_issues(plan).size()), 0.0);
        w.add(plan_table_csv(plan) == plan_table_csv(suzuki_plan(p, gamma)) ? 0.0 : 1.0, 0.0);
      }
    }
    return detail::margin_result("V11_plan_invariants", w,
                                 "stage count, |alpha|<=1, per-group sums, determinism");
  });

  checks.push_back([cap, fault = options.inject_fault] {
    CheckResult r;
    r.id = "V12_order_slope";
    r.limit = 0.2;
    r.measured = 0.0;
    const auto grid = log_grid(1e-3, 1e-2, 6);
    bool ok = true;
    for (const auto& spec : {build_aklt(4, cap), build_mg(6, cap)}) {
      const TrotterLab lab(spec);
      for (int p : {1, 2}) {
        auto plan = suzuki_plan(p, lab.gamma_count());
        if (fault) plan = with_flipped_stage(plan);
        const auto fit = order_check(plan, lab.spectrum(), lab.part_spectra(), grid);
        const double dev = fit.slope ? std::abs(*fit.slope - (p + 1)) : 1e300;
        r.measured = std::max(r.measured, dev);
        ok = ok && dev <= 0.2;
      }
    }
    r.passed = ok;
    r.detail = std::string("max |slope-(p+1)| on aklt N=4 and mg N=6") +
               (fault ? " (fault injected)" : "");
    return r;
  });

  checks.push_back([cap] {
    Worst w;
    for (const auto& spec : detail::small_models(cap)) {
      const TrotterLab lab(spec);
      for (int p : {1, 2}) {
        const auto plan = suzuki_plan(p, lab.gamma_count());
        for (double t : {0.05, 0.1, 0.5}) {
          const double full = lab.full_error(plan, t);
          w.add(full, 2.0);
          for (double delta : {0.5, 1.0, 2.0}) w.add(lab.projected_error(plan, t, delta), full + 1e-12);
        }
      }
    }
    return detail::margin_result("V13_projected_at_most_full", w, "projected against full error");
  });

  checks.push_back([cap] {
    Worst w;
    const TrotterLab lab(build_aklt(5, cap));
    const auto plan = suzuki_plan(1, lab.gamma_count());
    double previous = 0.0;
    for (int i = 0; i <= 40; ++i) {
      const double delta = lab.spectrum().max_eigenvalue() * i / 40.0;
      const double e = lab.projected_error(plan, 0.1, delta);
      w.add(previous, e + 1e-13);
      previous = e;
    }
    return detail::margin_result("V14_monotone_in_delta", w, "projected error along a delta grid");
  });

  checks.push_back([cap] {
    Worst w;
    for (const auto& spec : detail::small_models(cap)) {
      const TrotterLab lab(spec);
      for (int q : {1, 2}) {
        for (double delta : {0.5, 1.0}) {
          const Matrix basis = lab.spectrum().basis_at_most(delta);
          w.add(lab.nested_commutator_sum(q, basis),
                thm_s1_rhs(q, lab.locality_k(), lab.extensiveness(), delta));
        }
      }
    }
    return detail::margin_result("V15_projected_commutator_sum", w, "sum against q!(2kg)^q delta");
  });

  checks.push_back([cap] {
    Worst w;
    for (const auto& spec : detail::small_models(cap)) {
      const TrotterLab lab(spec);
      for (int q : {1, 2}) {
        w.add(lab.nested_commutator_sum(q),
              unprojected_commutator_rhs(q, lab.locality_k(), lab.extensiveness(), spec.num_sites()));
      }
    }
    return detail::margin_result("V16_unprojected_commutator_sum", w, "sum against q!(2kg)^q N g");
  });

  checks.push_back([cap] {
    Worst w;
    const TrotterLab lab(build_aklt(5, cap));
    const double g = lab.extensiveness();
    const int k = lab.locality_k();
    const auto terms = lab.embedded_terms();
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const int s = static_cast<int>(lab.spec().terms()[i].support().size());
      const double norm = spectral_norm(terms[i]);
      for (double delta : {0.0, 0.5, 1.0, 1.5}) {
        for (int j = 0; j <= 5; ++j) {
          const double dp = delta + 3.0 * g * s + 8.0 * k * g * j / 5.0;
          w.add(lab.leakage_norm(terms[i], delta, dp),
                excitation_bound_rhs(norm, delta, dp, g, s, k));
        }
      }
    }
    return detail::margin_result("V17_leakage_bound", w, "leakage against excitation bound");
  });

  checks.push_back([cap] {
    Worst w;
    for (const auto& spec : {build_aklt(4, cap), build_mg(5, cap)}) {
      const TrotterLab lab(spec);
      for (int p : {1, 2}) {
        const auto plan = suzuki_plan(p, lab.gamma_count());
        for (long long r : {1, 2, 4, 8}) {
          for (double delta : {0.5, 1.0}) {
            const double t = 1.0;
            w.add(lab.accumulated_error(plan, t, r, delta),
                  r * lab.projected_error(plan, t / r, delta) + 1e-9);
          }
        }
      }
    }
    return detail::margin_result("V18_step_accumulation", w, "r-step error against r*per-step");
  });

  checks.push_back([cap] {
    Worst w;
    int applicable = 0;
    for (const auto& spec : detail::small_models(cap)) {
      const TrotterLab lab(spec);
      for (int p : {1, 2}) {
        const auto plan = suzuki_plan(p, lab.gamma_count());
        for (double delta : {0.5, 1.0}) {
          const auto probe = inputs_for(lab, plan, 0.0, delta, 1e-6);
          const double limit = std::min(cor_s4_bound(probe).time_limit, thm_s3_bound(probe).time_limit);
          for (double t : {0.1, limit, 0.5 * limit, 0.25 * limit}) {
            const auto in = inputs_for(lab, plan, t, delta, 1e-6);
            const double measured = lab.projected_error(plan, t, delta);
            for (const auto& report : {cor_s4_bound(in), thm_s3_bound(in)}) {
              if (!report.time_condition_ok) continue;
              ++applicable;
              w.add(measured, report.bound_value);
            }
          }
        }
      }
    }
    auto r = detail::margin_result("V19_error_bound_soundness", w,
                                   "measured error against bounds inside the time condition");
    r.detail += "; applicable " + std::to_string(applicable);
    return r;
  });

  checks.push_back([] {
    Worst w;
    BoundInputs base;
    base.num_sites = 8;
    base.k = 2;
    base.g = 2.0;
    base.gamma = 2;
    base.eps_small = 0.01;
    for (int p : {1, 2, 4}) {
      base.p = p;
      base.c_p = suzuki_stage_multiplier(p);
      for (auto eval : {cor_s4_bound, thm_s3_bound}) {
        for (int i = 0; i < 10; ++i) {
          BoundInputs a = base, b = base;
          a.delta = i * 1.5;
          b.delta = (i + 1) * 1.5;
          a.t = b.t = 0.01;
          w.add(eval(a).bound_value, eval(b).bound_value);
          a.delta = b.delta = 1.0;
          a.t = 0.005 * i;
          b.t = 0.005 * (i + 1);
          w.add(eval(a).bound_value, eval(b).bound_value);
          a = base;
          b = base;
          a.delta = b.delta = 1.0;
          a.t = b.t = 0.02;
          a.eps_small = 0.5 / std::pow(2.0, i);
          b.eps_small = a.eps_small / 2.0;
          w.add(eval(a).delta_prime, eval(b).delta_prime);
          w.add(eval(a).bound_value - a.eps_small, eval(b).bound_value - b.eps_small);
        }
      }
      for (int q = 0; q <= 3; ++q) {
        const double lhs = thm_s1_rhs(q, base.k, base.g, base.num_sites * base.g);
        const double rhs = unprojected_commutator_rhs(q, base.k, base.g, base.num_sites);
        w.add(std::abs(lhs - rhs), 0.0);
      }
    }
    return detail::margin_result("V20_bound_monotonicity", w,
                                 "bounds along delta, t and 1/eps; commutator bound at delta=Ng");
  });

  checks.push_back([seed = options.seed, cap] {
    Worst w;
    std::mt19937_64 rng(seed + 1);
    for (const auto& spec : {build_aklt(4, cap), build_mg(5, cap)}) {
      const TrotterLab lab(spec);
      for (double delta : {0.0, 0.5, 1.0}) {
        const Matrix basis = lab.spectrum().basis_at_most(delta);
        if (basis.cols() == 0) continue;
        for (int sample = 0; sample < 3; ++sample) {
          const Vector psi = random_state_in(basis, rng);
          for (int q : {0, 1, 2}) {
            const auto c = low_energy_expectation_sum(lab, q, psi, delta);
            w.add(c.value, c.bound + 1e-9);
          }
        }
      }
    }
    return detail::margin_result("V21_expectation_commutator_sum", w,
                                 "sampled low-energy expectations against q!(2kg)^q delta");
  });

  std::vector<CheckResult> results(checks.size());
  detail::parallel_for(checks.size(), options.workers,
                       [&](std::size_t i) { results[i] = checks[i](); });
  return results;
}

inline bool all_passed(const std::vector<CheckResult>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const CheckResult& r) { return r.passed; });
}

}  // namespace lowtrot
