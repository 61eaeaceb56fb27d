#pragma once

// Exact Trotter errors (full and low-energy projected), leakage norms and
// nested-commutator sums for a fixed Hamiltonian.

#include "lowtrot/core.hpp"
#include "lowtrot/lattice.hpp"
#include "lowtrot/operator.hpp"
#include "lowtrot/product_formula.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace lowtrot {

enum class ErrorKind { full, projected };

inline const char* to_string(ErrorKind kind) {
  return kind == ErrorKind::full ? "full" : "projected";
}

struct ErrorSample {
  std::string model_tag;
  int num_sites = 0;
  int order_p = 1;
  int gamma = 1;
  double t = 0.0;
  std::optional<double> delta;  // nullopt: unrestricted
  double error_value = 0.0;
  ErrorKind error_kind = ErrorKind::full;
};

/// M^r by repeated squaring.
inline Matrix matrix_power(const Matrix& m, long long r) {
  if (r < 0) throw Error("matrix_power: negative exponent");
  Matrix result = Matrix::Identity(m.rows(), m.cols());
  Matrix base = m;
  while (r > 0) {
    if (r & 1) result = result * base;
    r >>= 1;
    if (r > 0) base = base * base;
  }
  return result;
}

/// Caches the eigendecompositions of H and of every partition group H_γ so
/// that sweeps over t, Δ and plans reuse them. Immutable after construction.
class TrotterLab {
 public:
  explicit TrotterLab(HamiltonianSpec spec) : spec_(std::move(spec)) {
    auto assembled = assemble(spec_);
    spectrum_ = eigh(assembled.hamiltonian);
    for (const auto& part : assembled.parts) part_spectra_.push_back(eigh(part));
    hamiltonian_ = std::move(assembled.hamiltonian);
    g_ = spec_.terms().empty() ? 0.0 : lowtrot::extensiveness(spec_);
  }

  const HamiltonianSpec& spec() const { return spec_; }
  const DenseOperator& hamiltonian() const { return *hamiltonian_; }
  const SpectralData& spectrum() const { return spectrum_; }
  const std::vector<SpectralData>& part_spectra() const { return part_spectra_; }
  Eigen::Index dim() const { return spectrum_.dim(); }
  double extensiveness() const { return g_; }
  int locality_k() const { return spec_.locality_k(); }
  int gamma_count() const { return spec_.gamma_count(); }

  Matrix exact_propagator(double t) const { return evolve(spectrum_, t).matrix(); }

  Matrix trotter_step(const FormulaPlan& plan, double t) const {
    return apply_plan(plan, part_spectra_, t).matrix();
  }

  /// ‖e^{-iHt} − T_p(t)‖
  double full_error(const FormulaPlan& plan, double t) const {
    return spectral_norm(Matrix(exact_propagator(t) - trotter_step(plan, t)));
  }

  /// ‖(e^{-iHt} − T_p(t)) Π_{≤Δ}‖, evaluated on an eigenbasis of Π_{≤Δ}.
  double projected_error(const FormulaPlan& plan, double t, double delta) const {
    const Matrix basis = spectrum_.basis_at_most(delta);
    if (basis.cols() == 0) return 0.0;
    const auto m = basis.cols();
    Matrix exact = basis * phase_factors(spectrum_.eigenvalues.head(m), t).asDiagonal();
    const Matrix trotter = apply_plan_to(plan, part_spectra_, t, basis);
    return spectral_norm(Matrix(exact - trotter));
  }

  /// ‖(e^{-iHt} − T_p(t/r)^r) Π_{≤Δ}‖
  double accumulated_error(const FormulaPlan& plan, double t, long long r, double delta) const {
    if (r < 1) throw Error("accumulated_error: r must be >= 1");
    const Matrix basis = spectrum_.basis_at_most(delta);
    if (basis.cols() == 0) return 0.0;
    const auto m = basis.cols();
    Matrix exact = basis * phase_factors(spectrum_.eigenvalues.head(m), t).asDiagonal();
    const Matrix step = trotter_step(plan, t / static_cast<double>(r));
    const Matrix trotter = matrix_power(step, r) * basis;
    return spectral_norm(Matrix(exact - trotter));
  }

  /// ‖Π_{>Δ′} O Π_{≤Δ}‖
  double leakage_norm(const Matrix& op, double delta, double delta_prime) const {
    if (!(delta_prime > delta)) throw Error("leakage_norm: requires delta_prime > delta");
    if (op.rows() != dim() || op.cols() != dim()) throw Error("leakage_norm: dimension mismatch");
    const Matrix low = spectrum_.basis_at_most(delta);
    const Matrix high = spectrum_.basis_above(delta_prime);
    if (low.cols() == 0 || high.cols() == 0) return 0.0;
    return spectral_norm(Matrix(high.adjoint() * op * low));
  }

  std::vector<Matrix> embedded_terms() const {
    std::vector<Matrix> out;
    for (const auto& term : spec_.terms()) out.push_back(embed(term, spec_.lattice()).matrix());
    return out;
  }

  /// Calls visit(C) for every tuple (X_0..X_q) in which each X_j meets
  /// X_0 ∪ ... ∪ X_{j-1}, with C = [h_{X_q},[…,[h_{X_1},h_{X_0}]]].
  /// Subtrees whose partial commutator vanishes identically are skipped.
  void for_each_nested_commutator(int q, const std::function<void(const Matrix&)>& visit) const {
    if (q < 0) throw Error("nested commutator depth must be >= 0");
    if (q > 3) throw Error("nested commutator depth above 3 is not supported");
    const auto terms = embedded_terms();
    const auto& local = spec_.terms();
    std::function<void(int, const std::vector<int>&, const Matrix&)> recurse =
        [&](int level, const std::vector<int>& covered, const Matrix& current) {
          for (std::size_t x = 0; x < terms.size(); ++x) {
            Matrix next;
            std::vector<int> grown;
            if (level == 0) {
              next = terms[x];
              grown = local[x].support();
            } else {
              if (!sites_intersect(local[x].support(), covered)) continue;
              next = terms[x] * current - current * terms[x];
              if (max_abs_entry(next) == 0.0) continue;
              grown = site_union(covered, local[x].support());
            }
            if (level == q) {
              visit(next);
            } else {
              recurse(level + 1, grown, next);
            }
          }
        };
    recurse(0, {}, Matrix());
  }

  /// Σ over overlapping term tuples of ‖B† C B‖ (B an orthonormal basis of
  /// the projector's image) or of ‖C‖ when no basis is given.
  double nested_commutator_sum(int q, const std::optional<Matrix>& basis = std::nullopt) const {
    double total = 0.0;
    for_each_nested_commutator(q, [&](const Matrix& c) {
      if (basis) {
        if (basis->cols() == 0) return;
        total += spectral_norm(Matrix(basis->adjoint() * c * *basis));
      } else {
        total += spectral_norm(c);
      }
    });
    return total;
  }

  /// ⟨ψ|Π_{>x}|ψ⟩
  double tail_weight(const Vector& psi, double threshold) const {
    const Matrix high = spectrum_.basis_above(threshold);
    if (high.cols() == 0) return 0.0;
    return (high.adjoint() * psi).squaredNorm();
  }

  double expectation(const Vector& psi) const {
    return (psi.adjoint() * hamiltonian_->matrix() * psi)(0, 0).real();
  }

 private:
  HamiltonianSpec spec_;
  std::optional<DenseOperator> hamiltonian_;
  SpectralData spectrum_;
  std::vector<SpectralData> part_spectra_;
  double g_ = 0.0;
};

/// Orthonormal basis of a projector's image (eigenvectors with eigenvalue > 1/2).
inline Matrix projector_basis(const DenseOperator& projector) {
  const auto s = eigh(projector.matrix());
  return s.basis_above(0.5);
}

inline double full_error(const HamiltonianSpec& spec, const FormulaPlan& plan, double t) {
  return TrotterLab(spec).full_error(plan, t);
}

inline double projected_error(const HamiltonianSpec& spec, const FormulaPlan& plan, double t,
                              double delta) {
  return TrotterLab(spec).projected_error(plan, t, delta);
}

inline double leakage_norm(const HamiltonianSpec& spec, const DenseOperator& op, double delta,
                           double delta_prime) {
  return TrotterLab(spec).leakage_norm(op.matrix(), delta, delta_prime);
}

inline double nested_commutator_sum(const HamiltonianSpec& spec, int q,
                                    const std::optional<DenseOperator>& projector = std::nullopt) {
  TrotterLab lab(spec);
  if (projector) return lab.nested_commutator_sum(q, projector_basis(*projector));
  return lab.nested_commutator_sum(q);
}

struct ExpectationCheck {
  double value = 0.0;
  double bound = 0.0;  // q!(2kg)^q Δ
};

/// Σ_{tuples} |⟨ψ|[h_{X_q},[…,[h_{X_1},h_{X_0}]]]|ψ⟩| for ψ in the image of Π_{≤Δ}.
inline ExpectationCheck low_energy_expectation_sum(const TrotterLab& lab, int q, const Vector& psi,
                                                   double delta) {
  if (psi.size() != lab.dim()) throw Error("low_energy_expectation_sum: dimension mismatch");
  const Matrix basis = lab.spectrum().basis_at_most(delta);
  const Vector projected = basis * (basis.adjoint() * psi);
  if ((projected - psi).norm() > 1e-10) {
    throw Error("low_energy_expectation_sum: state is not in the low-energy subspace");
  }
  ExpectationCheck out;
  lab.for_each_nested_commutator(q, [&](const Matrix& c) {
    out.value += std::abs((psi.adjoint() * c * psi)(0, 0));
  });
  double factorial = 1.0;
  for (int i = 2; i <= q; ++i) factorial *= i;
  out.bound = factorial *
              std::pow(2.0 * lab.locality_k() * lab.extensiveness(), static_cast<double>(q)) * delta;
  return out;
}

/// Normalised Gaussian-random combination of the columns of `basis`.
template <typename Rng>
Vector random_state_in(const Matrix& basis, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector coeffs(basis.cols());
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) coeffs(i) = cplx(normal(rng), normal(rng));
  Vector psi = basis * coeffs;
  return psi / psi.norm();
}

}  // namespace lowtrot
