#pragma once

// Dense full-Hilbert-space operators: embedding, assembly, Hermitian
// eigendecomposition, propagators, spectral norms and low-energy projectors.

#include "lowtrot/core.hpp"
#include "lowtrot/embedding.hpp"
#include "lowtrot/lattice.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace lowtrot {

class DenseOperator {
 public:
  explicit DenseOperator(Matrix entries, bool hermitian_hint = false, std::string label = {})
      : entries_(std::move(entries)), hermitian_hint_(hermitian_hint), label_(std::move(label)) {
    if (entries_.rows() != entries_.cols()) throw Error("DenseOperator: matrix must be square");
    if (hermitian_hint_ &&
        hermiticity_defect(entries_) > 1e-12 * std::max(1.0, max_abs_entry(entries_))) {
      throw Error("DenseOperator: hermitian_hint set on a non-Hermitian matrix");
    }
  }

  static DenseOperator identity(Eigen::Index dim, std::string label = "identity") {
    return DenseOperator(Matrix::Identity(dim, dim), true, std::move(label));
  }
  static DenseOperator zero(Eigen::Index dim, std::string label = "zero") {
    return DenseOperator(Matrix::Zero(dim, dim), true, std::move(label));
  }

  Eigen::Index dim() const { return entries_.rows(); }
  const Matrix& matrix() const { return entries_; }
  bool hermitian_hint() const { return hermitian_hint_; }
  const std::string& label() const { return label_; }

 private:
  Matrix entries_;
  bool hermitian_hint_;
  std::string label_;
};

inline constexpr double kSpectralTieTolerance = 1e-10;

/// Eigenpairs of a Hermitian operator, eigenvalues ascending.
struct SpectralData {
  RealVector eigenvalues;
  Matrix eigenvectors;

  Eigen::Index dim() const { return eigenvalues.size(); }
  double min_eigenvalue() const { return eigenvalues(0); }
  double max_eigenvalue() const { return eigenvalues(eigenvalues.size() - 1); }

  /// Number of eigenvalues E_n <= delta. Eigenvalues within kSpectralTieTolerance
  /// above delta count as ties, so exact degeneracies at delta survive rounding.
  Eigen::Index count_at_most(double delta) const {
    Eigen::Index n = 0;
    while (n < eigenvalues.size() && eigenvalues(n) <= delta + kSpectralTieTolerance) ++n;
    return n;
  }
  /// Orthonormal basis of the image of Π_{≤delta}.
  Matrix basis_at_most(double delta) const { return eigenvectors.leftCols(count_at_most(delta)); }
  /// Orthonormal basis of the image of Π_{>delta}.
  Matrix basis_above(double delta) const {
    const auto n = count_at_most(delta);
    return eigenvectors.rightCols(dim() - n);
  }
};

inline SpectralData eigh(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error("eigh: matrix must be square");
  if (hermiticity_defect(a) > 1e-12 * std::max(1.0, max_abs_entry(a))) {
    throw Error("eigh: matrix is not Hermitian");
  }
  SpectralData out;
  if (a.size() == 0) return out;
  if (is_real(a)) {
    const RealMatrix sym = (a.real() + a.real().transpose()) / 2.0;
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym);
    out.eigenvalues = es.eigenvalues();
    out.eigenvectors = es.eigenvectors().cast<cplx>();
  } else {
    const Matrix herm = (a + a.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
    out.eigenvalues = es.eigenvalues();
    out.eigenvectors = es.eigenvectors();
  }
  return out;
}

inline SpectralData eigh(const DenseOperator& a) {
  if (!a.hermitian_hint()) throw Error("eigh: operator is not marked Hermitian");
  return eigh(a.matrix());
}

/// V diag(f(λ)) V† for a spectral function given as a vector of values.
inline Matrix spectral_function(const SpectralData& s, const Vector& values) {
  return s.eigenvectors * values.asDiagonal() * s.eigenvectors.adjoint();
}

inline Vector phase_factors(const RealVector& eigenvalues, double t) {
  Vector out(eigenvalues.size());
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    out(i) = std::polar(1.0, -eigenvalues(i) * t);
  }
  return out;
}

/// e^{-iAt} = V diag(e^{-iλt}) V†
inline DenseOperator evolve(const SpectralData& s, double t) {
  return DenseOperator(spectral_function(s, phase_factors(s.eigenvalues, t)), false, "propagator");
}

/// Applies e^{-iAt} to the columns of `block` without forming the propagator.
inline Matrix evolve_apply(const SpectralData& s, double t, const Matrix& block) {
  Matrix coeffs = s.eigenvectors.adjoint() * block;
  coeffs = phase_factors(s.eigenvalues, t).asDiagonal() * coeffs;
  return s.eigenvectors * coeffs;
}

/// Largest singular value, from the eigenvalues of A†A.
inline double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  double top = 0.0;
  if (is_real(a)) {
    const RealMatrix r = a.real();
    const RealMatrix gram = r.transpose() * r;
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(gram, Eigen::EigenvaluesOnly);
    top = es.eigenvalues().maxCoeff();
  } else {
    const Matrix gram = a.adjoint() * a;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    top = es.eigenvalues().maxCoeff();
  }
  return std::sqrt(std::max(top, 0.0));
}

inline double spectral_norm(const DenseOperator& a) { return spectral_norm(a.matrix()); }

/// Π_{≤delta} = Σ_{E_n ≤ delta} |E_n⟩⟨E_n|
inline DenseOperator low_energy_projector(const SpectralData& s, double delta) {
  const Matrix basis = s.basis_at_most(delta);
  Matrix p = basis * basis.adjoint();
  p = (p + p.adjoint()) / 2.0;
  return DenseOperator(std::move(p), true, "low_energy_projector");
}

inline DenseOperator commutator(const DenseOperator& a, const DenseOperator& b) {
  if (a.dim() != b.dim()) throw Error("commutator: dimension mismatch");
  return DenseOperator(a.matrix() * b.matrix() - b.matrix() * a.matrix(), false, "commutator");
}

// ---------------------------------------------------------------------------
// Embedding and assembly

inline std::vector<int> all_sites(const LatticeSpec& lattice) {
  std::vector<int> sites(static_cast<std::size_t>(lattice.num_sites()));
  std::iota(sites.begin(), sites.end(), 0);
  return sites;
}

inline DenseOperator embed(const LocalTerm& term, const LatticeSpec& lattice) {
  if (term.support().back() >= lattice.num_sites()) throw Error("embed: support outside lattice");
  const auto sites = all_sites(lattice);
  Matrix full = embed_block(term.block(), term.support(), sites, lattice.local_dim());
  const bool herm = hermiticity_defect(term.block()) <= 1e-12 * std::max(1.0, max_abs_entry(term.block()));
  return DenseOperator(std::move(full), herm, "embedded_term");
}

struct AssembledHamiltonian {
  DenseOperator hamiltonian;
  std::vector<DenseOperator> parts;  // H_γ, index γ-1
};

/// H = Σ_γ H_γ, each H_γ the sum of its group's embedded terms.
inline AssembledHamiltonian assemble(const HamiltonianSpec& spec) {
  const auto dim = static_cast<Eigen::Index>(spec.lattice().hilbert_dim());
  const auto sites = all_sites(spec.lattice());
  const int d = spec.lattice().local_dim();
  std::vector<Matrix> parts(static_cast<std::size_t>(spec.gamma_count()), Matrix::Zero(dim, dim));
  for (std::size_t i = 0; i < spec.terms().size(); ++i) {
    const auto& term = spec.terms()[i];
    parts[static_cast<std::size_t>(spec.partition()[i] - 1)] +=
        embed_block(term.block(), term.support(), sites, d);
  }
  Matrix total = Matrix::Zero(dim, dim);
  std::vector<DenseOperator> ops;
  for (std::size_t g = 0; g < parts.size(); ++g) {
    total += parts[g];
    ops.emplace_back(std::move(parts[g]), true, "H_" + std::to_string(g + 1));
  }
  return AssembledHamiltonian{DenseOperator(std::move(total), true, "H"), std::move(ops)};
}

// ---------------------------------------------------------------------------
// Binary dump: "TROT", u32 version, u64 dim, then row-major (re, im) doubles,
// all little-endian.

inline constexpr std::uint32_t kOperatorDumpVersion = 1;

namespace detail {

template <typename T>
void write_le(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  out.write(bytes.data(), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), sizeof(T))) throw Error("operator dump: truncated input");
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace detail

inline void write_operator_binary(std::ostream& out, const DenseOperator& op) {
  out.write("TROT", 4);
  detail::write_le<std::uint32_t>(out, kOperatorDumpVersion);
  detail::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(op.dim()));
  for (Eigen::Index r = 0; r < op.dim(); ++r) {
    for (Eigen::Index c = 0; c < op.dim(); ++c) {
      detail::write_le<double>(out, op.matrix()(r, c).real());
      detail::write_le<double>(out, op.matrix()(r, c).imag());
    }
  }
}

inline DenseOperator read_operator_binary(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), 4) || std::string(magic.data(), 4) != "TROT") {
    throw Error("operator dump: bad magic");
  }
  const auto version = detail::read_le<std::uint32_t>(in);
  if (version != kOperatorDumpVersion) throw Error("operator dump: unsupported version");
  const auto dim = detail::read_le<std::uint64_t>(in);
  if (dim > kDefaultDimensionCap * 8) throw Error("operator dump: dimension too large");
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const double re = detail::read_le<double>(in);
      const double im = detail::read_le<double>(in);
      m(r, c) = cplx(re, im);
    }
  }
  return DenseOperator(std::move(m));
}

}  // namespace lowtrot
