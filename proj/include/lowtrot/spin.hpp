#pragma once

// Dimensionless spin matrices (hbar = 1) and total-spin projectors.

#include "lowtrot/core.hpp"
#include "lowtrot/embedding.hpp"

#include <array>
#include <cmath>
#include <numeric>

namespace lowtrot::spin {

/// (Sx, Sy, Sz) for spin s = (dim-1)/2 in the basis m = s, s-1, ..., -s.
inline std::array<Matrix, 3> spin_matrices(int dim) {
  if (dim < 2) throw Error("spin_matrices: dimension must be >= 2");
  const double s = (dim - 1) / 2.0;
  Matrix sp = Matrix::Zero(dim, dim);
  Matrix sz = Matrix::Zero(dim, dim);
  for (int a = 0; a < dim; ++a) {
    const double m = s - a;
    sz(a, a) = m;
    if (a > 0) {
      // <m+1| S+ |m>
      sp(a - 1, a) = std::sqrt(s * (s + 1) - m * (m + 1));
    }
  }
  const Matrix sm = sp.adjoint();
  Matrix sx = (sp + sm) / 2.0;
  Matrix sy = (sp - sm) / cplx(0.0, 2.0);
  return {sx, sy, sz};
}

inline Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}
inline Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

/// (S_1 + ... + S_n)^2 on n sites of local dimension `dim`.
inline Matrix total_spin_squared(int dim, int n) {
  const auto ops = spin_matrices(dim);
  std::vector<int> sites(static_cast<std::size_t>(n));
  std::iota(sites.begin(), sites.end(), 0);
  const auto full = static_cast<Eigen::Index>(detail::ipow(static_cast<std::size_t>(dim),
                                                           static_cast<std::size_t>(n)));
  Matrix total = Matrix::Zero(full, full);
  for (const auto& op : ops) {
    Matrix component = Matrix::Zero(full, full);
    for (int i = 0; i < n; ++i) {
      const int site = i;
      component += embed_block(op, std::span<const int>(&site, 1), sites, dim);
    }
    total += component * component;
  }
  return total;
}

/// Projector onto the eigenspace of Hermitian `m` with eigenvalue `target`
/// (eigenvalues within 1e-8 of the target are included).
inline Matrix eigenspace_projector(const Matrix& m, double target) {
  const auto n = m.rows();
  Matrix basis;
  RealVector evals;
  if (is_real(m)) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(m.real());
    evals = es.eigenvalues();
    basis = es.eigenvectors().cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    evals = es.eigenvalues();
    basis = es.eigenvectors();
  }
  Matrix p = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(evals(i) - target) < 1e-8) p += basis.col(i) * basis.col(i).adjoint();
  }
  return (p + p.adjoint()) / 2.0;
}

}  // namespace lowtrot::spin
