#pragma once

// k-local Hamiltonians with positive-semidefinite terms on open 1-D chains,
// their commuting partitions, and the built-in model families.

#include "lowtrot/core.hpp"
#include "lowtrot/embedding.hpp"
#include "lowtrot/spin.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace lowtrot {

enum class Geometry { open_chain };

class LatticeSpec {
 public:
  LatticeSpec(int num_sites, int local_dim, std::size_t dim_cap = kDefaultDimensionCap)
      : num_sites_(num_sites), local_dim_(local_dim) {
    if (num_sites < 2) throw Error("LatticeSpec: num_sites must be >= 2");
    if (local_dim < 2) throw Error("LatticeSpec: local_dim must be >= 2");
    auto dim = checked_power(static_cast<std::size_t>(local_dim),
                             static_cast<std::size_t>(num_sites), dim_cap);
    if (!dim) {
      std::ostringstream os;
      os << "Hilbert dimension " << local_dim << "^" << num_sites
         << " exceeds the dimension cap " << dim_cap;
      throw DimensionCapError(os.str());
    }
    hilbert_dim_ = *dim;
  }

  int num_sites() const { return num_sites_; }
  int local_dim() const { return local_dim_; }
  std::size_t hilbert_dim() const { return hilbert_dim_; }
  Geometry geometry() const { return Geometry::open_chain; }

 private:
  int num_sites_;
  int local_dim_;
  std::size_t hilbert_dim_ = 0;
};

/// A term h_X: a square block acting on the sorted site list `support`.
/// Hermiticity and positivity are checked by validate(), not here, so that
/// malformed models can still be represented and reported on.
class LocalTerm {
 public:
  LocalTerm(std::vector<int> support, Matrix block)
      : support_(std::move(support)), block_(std::move(block)) {
    if (support_.empty()) throw Error("LocalTerm: empty support");
    for (std::size_t i = 0; i < support_.size(); ++i) {
      if (support_[i] < 0) throw Error("LocalTerm: negative site index");
      if (i > 0 && support_[i] <= support_[i - 1]) {
        throw Error("LocalTerm: support must be sorted and distinct");
      }
    }
    if (block_.rows() != block_.cols()) throw Error("LocalTerm: block must be square");
  }

  const std::vector<int>& support() const { return support_; }
  const Matrix& block() const { return block_; }

 private:
  std::vector<int> support_;
  Matrix block_;
};

/// Operator norm of a block: largest |eigenvalue| for Hermitian input,
/// largest singular value otherwise.
inline double block_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (hermiticity_defect(m) <= 1e-12 * std::max(1.0, max_abs_entry(m))) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

inline double min_eigenvalue(const Matrix& m) {
  const Matrix herm = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

class HamiltonianSpec {
 public:
  HamiltonianSpec(LatticeSpec lattice, std::vector<LocalTerm> terms, std::vector<int> partition,
                  int locality_k, std::string model_tag)
      : lattice_(lattice),
        terms_(std::move(terms)),
        partition_(std::move(partition)),
        locality_k_(locality_k),
        model_tag_(std::move(model_tag)) {
    if (partition_.size() != terms_.size()) {
      throw Error("HamiltonianSpec: partition must have one label per term");
    }
    if (locality_k_ < 1) throw Error("HamiltonianSpec: locality_k must be >= 1");
    const auto d = static_cast<std::size_t>(lattice_.local_dim());
    for (const auto& term : terms_) {
      if (term.support().back() >= lattice_.num_sites()) {
        throw Error("HamiltonianSpec: term support outside the lattice");
      }
      const auto expected = detail::ipow(d, term.support().size());
      if (static_cast<std::size_t>(term.block().rows()) != expected) {
        throw Error("HamiltonianSpec: block dimension does not match local_dim^|support|");
      }
    }
    std::set<int> labels(partition_.begin(), partition_.end());
    int expect = 1;
    for (int label : labels) {
      if (label != expect++) {
        throw Error("HamiltonianSpec: partition labels must be the contiguous range 1..Gamma");
      }
    }
    gamma_ = static_cast<int>(labels.size());
  }

  const LatticeSpec& lattice() const { return lattice_; }
  const std::vector<LocalTerm>& terms() const { return terms_; }
  const std::vector<int>& partition() const { return partition_; }
  int locality_k() const { return locality_k_; }
  const std::string& model_tag() const { return model_tag_; }
  int num_sites() const { return lattice_.num_sites(); }
  int gamma_count() const { return gamma_; }

  /// Indices of the terms carrying group label `gamma` (1-based).
  std::vector<std::size_t> group(int gamma) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < partition_.size(); ++i) {
      if (partition_[i] == gamma) out.push_back(i);
    }
    return out;
  }

 private:
  LatticeSpec lattice_;
  std::vector<LocalTerm> terms_;
  std::vector<int> partition_;
  int locality_k_;
  std::string model_tag_;
  int gamma_ = 0;
};

/// ‖[A, B]‖ for two local terms, evaluated on the union of their supports.
inline double local_commutator_norm(const LocalTerm& a, const LocalTerm& b, int local_dim) {
  if (!sites_intersect(a.support(), b.support())) return 0.0;
  const auto sites = site_union(a.support(), b.support());
  const Matrix ea = embed_block(a.block(), a.support(), sites, local_dim);
  const Matrix eb = embed_block(b.block(), b.support(), sites, local_dim);
  const Matrix c = ea * eb - eb * ea;
  Eigen::JacobiSVD<Matrix> svd(c);
  return svd.singularValues()(0);
}

inline bool terms_commute(const LocalTerm& a, const LocalTerm& b, int local_dim) {
  const double scale = block_norm(a.block()) * block_norm(b.block());
  return local_commutator_norm(a, b, local_dim) <= 1e-12 * std::max(scale, 1e-300);
}

/// Greedy colouring into mutually commuting groups; each term gets the lowest
/// label whose group it commutes with entirely. Labels are 1-based.
inline std::vector<int> greedy_partition(const std::vector<LocalTerm>& terms, int local_dim) {
  std::vector<int> labels(terms.size(), 0);
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    std::size_t chosen = groups.size();
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const bool ok = std::all_of(groups[g].begin(), groups[g].end(), [&](std::size_t j) {
        return terms_commute(terms[i], terms[j], local_dim);
      });
      if (ok) {
        chosen = g;
        break;
      }
    }
    if (chosen == groups.size()) groups.emplace_back();
    groups[chosen].push_back(i);
    labels[i] = static_cast<int>(chosen) + 1;
  }
  return labels;
}

// ---------------------------------------------------------------------------
// Model builders

inline HamiltonianSpec build_aklt(int num_sites, std::size_t dim_cap = kDefaultDimensionCap) {
  if (num_sites < 2) throw Error("build_aklt: requires N >= 2");
  LatticeSpec lattice(num_sites, 3, dim_cap);
  // projector onto total spin 2 of two spin-1 sites: S(S+1) = 6
  const Matrix bond = spin::eigenspace_projector(spin::total_spin_squared(3, 2), 6.0);
  std::vector<LocalTerm> terms;
  std::vector<int> labels;
  for (int i = 0; i + 1 < num_sites; ++i) {
    terms.emplace_back(std::vector<int>{i, i + 1}, bond);
    labels.push_back(i % 2 == 0 ? 1 : 2);
  }
  return HamiltonianSpec(lattice, std::move(terms), std::move(labels), 2, "aklt");
}

inline HamiltonianSpec build_mg(int num_sites, std::size_t dim_cap = kDefaultDimensionCap) {
  if (num_sites < 3) throw Error("build_mg: requires N >= 3");
  LatticeSpec lattice(num_sites, 2, dim_cap);
  // projector onto total spin 3/2 of three spin-1/2 sites: S(S+1) = 15/4
  const Matrix triple = spin::eigenspace_projector(spin::total_spin_squared(2, 3), 15.0 / 4.0);
  std::vector<LocalTerm> terms;
  std::vector<int> labels;
  for (int i = 0; i + 2 < num_sites; ++i) {
    terms.emplace_back(std::vector<int>{i, i + 1, i + 2}, triple);
    labels.push_back(i % 3 + 1);
  }
  return HamiltonianSpec(lattice, std::move(terms), std::move(labels), 3, "mg");
}

inline double long_range_coupling(int i, int j, double nu, double j0) {
  return j0 * std::pow(static_cast<double>(std::abs(i - j)), -nu);
}

inline HamiltonianSpec build_long_range_heisenberg(int num_sites, double nu, double j0,
                                                   std::size_t dim_cap = kDefaultDimensionCap) {
  if (num_sites < 2) throw Error("build_long_range_heisenberg: requires N >= 2");
  if (!(nu >= 0.0)) throw Error("build_long_range_heisenberg: nu must be >= 0");
  if (!(j0 > 0.0)) throw Error("build_long_range_heisenberg: J0 must be > 0");
  LatticeSpec lattice(num_sites, 2, dim_cap);
  const Matrix id4 = Matrix::Identity(4, 4);
  const std::array<Matrix, 3> paulis{spin::pauli_x(), spin::pauli_y(), spin::pauli_z()};
  std::array<Matrix, 3> pair_terms;
  for (std::size_t a = 0; a < 3; ++a) {
    Matrix pp = Eigen::kroneckerProduct(paulis[a], paulis[a]);
    pair_terms[a] = (pp + id4) / 2.0;
  }
  std::vector<LocalTerm> terms;
  std::vector<int> labels;
  for (int i = 0; i < num_sites; ++i) {
    for (int j = i + 1; j < num_sites; ++j) {
      const double coupling = long_range_coupling(i, j, nu, j0);
      for (std::size_t a = 0; a < 3; ++a) {
        terms.emplace_back(std::vector<int>{i, j}, coupling * pair_terms[a]);
        labels.push_back(static_cast<int>(a) + 1);
      }
    }
  }
  return HamiltonianSpec(lattice, std::move(terms), std::move(labels), 2, "lr_heisenberg");
}

/// h -> h + ‖h‖·1, making any Hermitian term positive semidefinite.
inline LocalTerm shift_psd(const LocalTerm& term) {
  const Matrix& b = term.block();
  if (hermiticity_defect(b) > 1e-12 * std::max(1.0, max_abs_entry(b))) {
    throw Error("shift_psd: block is not Hermitian");
  }
  const double norm = block_norm(b);
  Matrix shifted = b + norm * Matrix::Identity(b.rows(), b.cols());
  return LocalTerm(term.support(), std::move(shifted));
}

/// g = max_i Σ_{X ∋ i} ‖h_X‖
inline double extensiveness(const HamiltonianSpec& spec) {
  std::vector<double> per_site(static_cast<std::size_t>(spec.num_sites()), 0.0);
  for (const auto& term : spec.terms()) {
    const double norm = block_norm(term.block());
    for (int site : term.support()) per_site[static_cast<std::size_t>(site)] += norm;
  }
  return *std::max_element(per_site.begin(), per_site.end());
}

/// Extensiveness of the long-range Heisenberg chain from its couplings alone
/// (each of the three axis terms on a pair has norm J_ij).
inline double long_range_extensiveness(int num_sites, double nu, double j0) {
  double best = 0.0;
  for (int i = 0; i < num_sites; ++i) {
    double sum = 0.0;
    for (int j = 0; j < num_sites; ++j) {
      if (j != i) sum += 3.0 * long_range_coupling(i, j, nu, j0);
    }
    best = std::max(best, sum);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Validation

enum class FailureKind { hermiticity, psd, locality, commutation };

inline const char* to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::hermiticity: return "hermiticity";
    case FailureKind::psd: return "psd";
    case FailureKind::locality: return "locality";
    case FailureKind::commutation: return "commutation";
  }
  return "unknown";
}

struct ValidationFailure {
  FailureKind kind;
  std::vector<std::size_t> terms;  // offending term indices
  std::string message;
};

struct ValidationReport {
  bool passed = true;
  std::vector<double> min_eigenvalues;         // per term
  std::vector<double> psd_margins;             // λ_min + 1e-10·‖h‖, ≥ 0 passes
  std::vector<double> group_max_commutator;    // per group, index γ-1
  int locality_k = 0;
  int gamma = 0;
  double g = 0.0;
  int num_sites = 0;
  std::vector<ValidationFailure> failures;
};

inline ValidationReport validate(const HamiltonianSpec& spec) {
  ValidationReport report;
  report.locality_k = spec.locality_k();
  report.gamma = spec.gamma_count();
  report.num_sites = spec.num_sites();
  const int d = spec.lattice().local_dim();
  const auto& terms = spec.terms();

  std::vector<double> norms;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const Matrix& b = terms[i].block();
    const double defect = hermiticity_defect(b);
    if (defect > 1e-12) {
      std::ostringstream os;
      os << "term " << i << " is not Hermitian (defect " << defect << ")";
      report.failures.push_back({FailureKind::hermiticity, {i}, os.str()});
    }
    const double norm = block_norm(b);
    norms.push_back(norm);
    const double lmin = min_eigenvalue(b);
    report.min_eigenvalues.push_back(lmin);
    report.psd_margins.push_back(lmin + 1e-10 * norm);
    if (lmin < -1e-10 * norm) {
      std::ostringstream os;
      os << "term " << i << " is not positive semidefinite (min eigenvalue " << lmin << ")";
      report.failures.push_back({FailureKind::psd, {i}, os.str()});
    }
    if (static_cast<int>(terms[i].support().size()) > spec.locality_k()) {
      std::ostringstream os;
      os << "term " << i << " acts on " << terms[i].support().size() << " sites > k = "
         << spec.locality_k();
      report.failures.push_back({FailureKind::locality, {i}, os.str()});
    }
  }

  for (int gamma = 1; gamma <= spec.gamma_count(); ++gamma) {
    const auto members = spec.group(gamma);
    double worst = 0.0;
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const auto i = members[a];
        const auto j = members[b];
        const double c = local_commutator_norm(terms[i], terms[j], d);
        worst = std::max(worst, c);
        if (c > 1e-12 * norms[i] * norms[j] && c > 0.0) {
          std::ostringstream os;
          os << "terms " << i << " and " << j << " in group " << gamma
             << " do not commute (‖[A,B]‖ = " << c << ")";
          report.failures.push_back({FailureKind::commutation, {i, j}, os.str()});
        }
      }
    }
    report.group_max_commutator.push_back(worst);
  }

  report.g = terms.empty() ? 0.0 : extensiveness(spec);
  report.passed = report.failures.empty();
  return report;
}

}  // namespace lowtrot
