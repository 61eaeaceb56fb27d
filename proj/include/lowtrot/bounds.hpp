#pragma once

// Closed-form low-energy Trotter error bounds, Trotter-number formulas, and
// the certified Trotter-number search against exact errors.
//
// All logarithms are natural. Energies (Δ, ⟨ψ|H|ψ⟩) are measured with every
// local term shifted to be positive semidefinite.

#include "lowtrot/core.hpp"
#include "lowtrot/error_lab.hpp"
#include "lowtrot/product_formula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace lowtrot {

enum class FormulaId { thm_s3, cor_s4, thm_s1, prop_s5_const, prop_s5_general, weakly_corr };

inline const char* to_string(FormulaId id) {
  switch (id) {
    case FormulaId::thm_s3: return "thm_s3";
    case FormulaId::cor_s4: return "cor_s4";
    case FormulaId::thm_s1: return "thm_s1";
    case FormulaId::prop_s5_const: return "prop_s5_const";
    case FormulaId::prop_s5_general: return "prop_s5_general";
    case FormulaId::weakly_corr: return "weakly_corr";
  }
  return "unknown";
}

struct BoundInputs {
  long long num_sites = 1;       // N
  int k = 1;                     // locality
  double g = 1.0;                // extensiveness
  int gamma = 1;                 // partition count Γ
  int c_p = 1;                   // stage multiplier
  int p = 1;                     // order
  double delta = 0.0;            // Δ
  double t = 0.0;
  double eps_total = 0.01;       // target accuracy ε
  double eps_small = 0.01;       // slack ϵ inside Δ′
  std::optional<double> nu;
  std::optional<double> dimension;
  double c_conc = 1.0;           // concentration constant
  std::optional<double> energy_expect;
  int q = 1;                     // nested-commutator depth for the commutator bound
};

/// Problems with the inputs; empty when every field is in its domain.
inline std::vector<std::string> input_issues(const BoundInputs& in) {
  std::vector<std::string> out;
  auto require = [&](bool ok, const char* what) {
    if (!ok) out.emplace_back(what);
  };
  require(in.num_sites >= 1, "N must be positive");
  require(in.k >= 1, "k must be positive");
  require(in.g > 0.0, "g must be positive");
  require(in.gamma >= 1, "Gamma must be positive");
  require(in.c_p >= 1, "c_p must be positive");
  require(in.p >= 1, "p must be positive");
  require(in.delta >= 0.0, "delta must be non-negative");
  require(in.delta <= static_cast<double>(in.num_sites) * in.g * (1.0 + 1e-12),
          "delta must not exceed N*g");
  require(in.t >= 0.0, "t must be non-negative");
  require(in.eps_total > 0.0, "eps_total must be positive");
  require(in.eps_small > 0.0 && in.eps_small < 1.0, "eps_small must lie in (0,1)");
  require(in.c_conc > 0.0, "c_conc must be positive");
  require(in.q >= 0, "q must be non-negative");
  return out;
}

struct BoundReport {
  FormulaId formula = FormulaId::cor_s4;
  double delta_prime = 0.0;
  std::optional<int> p0;
  bool time_condition_ok = true;
  double time_limit = std::numeric_limits<double>::infinity();
  double bound_value = 0.0;
};

/// Γ = O(1) bound. Δ′ = Δ + 4kg·ln(2^{1-p} N / (k ϵ)) (clamped at Δ);
/// valid for |t| ≤ (1/e)(2c_pΓkg)^{-1}.
inline BoundReport cor_s4_bound(const BoundInputs& in) {
  BoundReport r;
  r.formula = FormulaId::cor_s4;
  const double k = in.k;
  const double n = static_cast<double>(in.num_sites);
  const double log_arg = std::pow(2.0, 1.0 - in.p) * n / (k * in.eps_small);
  r.delta_prime = in.delta + std::max(0.0, 4.0 * k * in.g * std::log(log_arg));
  const double rate = 2.0 * in.c_p * in.gamma * k * in.g;
  r.time_limit = 1.0 / (std::exp(1.0) * rate);
  const double t = std::abs(in.t);
  r.time_condition_ok = t <= r.time_limit;
  const double prefactor = 2.0 * in.c_p * in.gamma / ((1.0 - std::exp(-1.0)) * (in.p + 1));
  r.bound_value = prefactor * std::pow(rate * t, in.p) * r.delta_prime * t + in.eps_small;
  return r;
}

/// General-Γ bound with p₀ = ⌈ln(2N/(kϵ)) + 1⌉ and Δ′ = Δ + 4kg·ln(e²N/ϵ);
/// valid for |t| ≤ (1/2)(2c_p p₀ kg)^{-1}.
inline BoundReport thm_s3_bound(const BoundInputs& in) {
  BoundReport r;
  r.formula = FormulaId::thm_s3;
  const double k = in.k;
  const double n = static_cast<double>(in.num_sites);
  const int p0 = static_cast<int>(std::ceil(std::log(2.0 * n / (k * in.eps_small)) + 1.0));
  r.p0 = p0;
  r.delta_prime = in.delta + 4.0 * k * in.g * std::log(std::exp(2.0) * n / in.eps_small);
  const double rate = 2.0 * in.c_p * p0 * k * in.g;
  r.time_limit = 0.5 / rate;
  const double t = std::abs(in.t);
  r.time_condition_ok = t <= r.time_limit;
  r.bound_value = 4.0 * in.c_p / (in.p + 1) * std::pow(rate * t, in.p) * r.delta_prime * t +
                  in.eps_small;
  return r;
}

inline double factorial(int q) {
  double f = 1.0;
  for (int i = 2; i <= q; ++i) f *= i;
  return f;
}

/// q!(2kg)^q Δ
inline double thm_s1_rhs(int q, int k, double g, double delta) {
  if (q < 0) throw Error("thm_s1_rhs: q must be >= 0");
  return factorial(q) * std::pow(2.0 * k * g, static_cast<double>(q)) * delta;
}

/// q!(2kg)^q N g, the unrestricted nested-commutator bound.
inline double unprojected_commutator_rhs(int q, int k, double g, long long num_sites) {
  return thm_s1_rhs(q, k, g, static_cast<double>(num_sites) * g);
}

/// ‖O‖ exp(−(Δ′ − Δ − 3g|X|)/(4kg))
inline double excitation_bound_rhs(double op_norm, double delta, double delta_prime, double g,
                                   int support_size, int k) {
  return op_norm * std::exp(-(delta_prime - delta - 3.0 * g * support_size) / (4.0 * k * g));
}

enum class TrotterRegime { const_gamma, general };

struct TrotterNumberEstimate {
  double raw = 0.0;       // formula value before rounding (with prefactor A)
  long long r = 1;
  FormulaId formula = FormulaId::prop_s5_const;
};

/// r = ⌈A·gt·((Δt + gt·ln(N/ε))/ε)^{1/p}⌉, times ln(N/ε) in the general regime.
inline TrotterNumberEstimate prop_s5_number(const BoundInputs& in, TrotterRegime regime,
                                            double prefactor = 1.0) {
  TrotterNumberEstimate out;
  out.formula = regime == TrotterRegime::const_gamma ? FormulaId::prop_s5_const
                                                     : FormulaId::prop_s5_general;
  if (in.eps_total >= 2.0) {
    // ‖(U − V)Π‖ ≤ 2 for unitaries, so a single step already meets ε
    out.raw = 1.0;
    out.r = 1;
    return out;
  }
  const double n = static_cast<double>(in.num_sites);
  const double gt = in.g * std::abs(in.t);
  const double log_term = std::log(n / in.eps_total);
  double value = prefactor * gt *
                 std::pow((in.delta * std::abs(in.t) + gt * log_term) / in.eps_total, 1.0 / in.p);
  if (regime == TrotterRegime::general) value *= log_term;
  out.raw = value;
  const double rounded = std::max(1.0, std::ceil(value));
  out.r = rounded >= 9.0e18 ? std::numeric_limits<long long>::max()
                            : static_cast<long long>(rounded);
  return out;
}

struct WeaklyCorrelatedNumber {
  double width = 0.0;  // x
  double effective_delta = 0.0;
  TrotterNumberEstimate estimate;
};

/// x = sqrt((2N/c)·ln(4/ε))·g and r from the Γ = O(1) formula at Δ = ⟨H⟩ + x.
inline WeaklyCorrelatedNumber weakly_correlated_number(const BoundInputs& in) {
  if (!in.energy_expect) throw Error("weakly_correlated_number: energy expectation required");
  if (!(in.c_conc > 0.0)) throw Error("weakly_correlated_number: c must be positive");
  WeaklyCorrelatedNumber out;
  const double n = static_cast<double>(in.num_sites);
  const double log_term = std::max(0.0, std::log(4.0 / in.eps_total));
  out.width = std::sqrt(2.0 * n / in.c_conc * log_term) * in.g;
  out.effective_delta = *in.energy_expect + out.width;
  BoundInputs shifted = in;
  shifted.delta = out.effective_delta;
  out.estimate = prop_s5_number(shifted, TrotterRegime::const_gamma);
  out.estimate.formula = FormulaId::weakly_corr;
  return out;
}

/// Scalar inputs describing a concrete model, plan and target.
inline BoundInputs inputs_for(const TrotterLab& lab, const FormulaPlan& plan, double t,
                              double delta, double eps_small, double eps_total = 0.01) {
  BoundInputs in;
  in.num_sites = lab.spec().num_sites();
  in.k = lab.locality_k();
  in.g = lab.extensiveness();
  in.gamma = lab.gamma_count();
  in.c_p = plan.c_p;
  in.p = plan.order;
  in.delta = delta;
  in.t = t;
  in.eps_small = eps_small;
  in.eps_total = eps_total;
  return in;
}

// ---------------------------------------------------------------------------
// Certified Trotter number

inline constexpr long long kMaxTrotterNumber = 1000000;

struct CertifiedTrotterNumber {
  long long r = 1;
  double per_step_total = 0.0;  // r·ε_{p,Δ}(t/r)
  double direct_error = 0.0;    // ‖(e^{-iHt} − T_p(t/r)^r)Π_{≤Δ}‖
  bool verified = false;        // direct_error ≤ ε
};

/// Smallest r from a doubling-then-bisection search with r·ε_{p,Δ}(t/r) ≤ ε,
/// then checked directly against the accumulated error.
inline CertifiedTrotterNumber trotter_number_certified(const TrotterLab& lab,
                                                       const FormulaPlan& plan, double t,
                                                       double delta, double eps_total) {
  auto total = [&](long long r) {
    return static_cast<double>(r) * lab.projected_error(plan, t / static_cast<double>(r), delta);
  };
  CertifiedTrotterNumber out;
  long long hi = 1;
  if (eps_total < 2.0) {
    while (total(hi) > eps_total) {
      if (hi > kMaxTrotterNumber) {
        std::ostringstream os;
        os << "trotter_number_certified: no r <= " << kMaxTrotterNumber
           << " reaches eps = " << eps_total << " (r*error at r = " << hi << " is " << total(hi)
           << ")";
        throw Error(os.str());
      }
      hi *= 2;
    }
    long long lo = hi / 2;  // fails (or 0)
    while (hi - lo > 1) {
      const long long mid = lo + (hi - lo) / 2;
      if (total(mid) <= eps_total) hi = mid; else lo = mid;
    }
  }
  if (hi > kMaxTrotterNumber) throw Error("trotter_number_certified: r exceeds 10^6");
  out.r = hi;
  out.per_step_total = total(hi);
  out.direct_error = lab.accumulated_error(plan, t, hi, delta);
  out.verified = out.direct_error <= eps_total;
  return out;
}

struct ConcentrationFit {
  double energy = 0.0;  // ⟨ψ|H|ψ⟩
  double c = std::numeric_limits<double>::infinity();  // largest c valid on the grid
  std::vector<double> tail_weights;
};

/// Largest c with ⟨ψ|Π_{>⟨H⟩+x}|ψ⟩ ≤ exp(−c x²/(N g²)) at every grid point.
inline ConcentrationFit fit_concentration_constant(const TrotterLab& lab, const Vector& psi,
                                                   const std::vector<double>& widths) {
  ConcentrationFit fit;
  fit.energy = lab.expectation(psi);
  const double n = lab.spec().num_sites();
  const double g = lab.extensiveness();
  for (double x : widths) {
    const double w = lab.tail_weight(psi, fit.energy + x);
    fit.tail_weights.push_back(w);
    if (x <= 0.0 || w <= 0.0) continue;
    fit.c = std::min(fit.c, -std::log(w) * n * g * g / (x * x));
  }
  return fit;
}

}  // namespace lowtrot
