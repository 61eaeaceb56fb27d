#include "lowtrot/bounds.hpp"
#include "lowtrot/error_lab.hpp"
#include "lowtrot/lattice.hpp"
#include "lowtrot/spin.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace lowtrot;

namespace {

const TrotterLab& aklt4() {
  static const TrotterLab lab(build_aklt(4));
  return lab;
}

HamiltonianSpec commuting_spec() {
  const Matrix zz = Matrix(Vector::Constant(4, 1.0).asDiagonal()) +
                    Matrix(Vector((Vector(4) << 1, -1, -1, 1).finished()).asDiagonal());
  return HamiltonianSpec(LatticeSpec(3, 2), {LocalTerm({0, 1}, zz), LocalTerm({1, 2}, zz)}, {1, 2},
                         2, "zz");
}

}  // namespace

TEST(FullError, ZeroAtTimeZero) {
  EXPECT_LE(aklt4().full_error(suzuki_plan(1, 2), 0.0), 1e-12);
}

TEST(FullError, ZeroForSingleGroup) {
  const auto spec = build_aklt(2);
  EXPECT_LE(full_error(spec, suzuki_plan(1, 1), 0.4), 1e-12);
}

TEST(FullError, ZeroForCommutingGroups) {
  EXPECT_LE(full_error(commuting_spec(), suzuki_plan(1, 2), 0.9), 1e-12);
}

TEST(FullError, ReproducibleAndPositive) {
  const double a = aklt4().full_error(suzuki_plan(1, 2), 0.1);
  const double b = TrotterLab(build_aklt(4)).full_error(suzuki_plan(1, 2), 0.1);
  EXPECT_GT(a, 0.0);
  EXPECT_NEAR(a, b, 1e-10);
  EXPECT_NEAR(a, 0.003503276620677301, 1e-10);
}

TEST(ProjectedError, BelowGroundIsZero) {
  EXPECT_EQ(aklt4().projected_error(suzuki_plan(1, 2), 0.3, -0.5), 0.0);
}

TEST(ProjectedError, FullSpectrumEqualsFull) {
  const auto& lab = aklt4();
  for (int p : {1, 2}) {
    const auto plan = suzuki_plan(p, 2);
    const double full = lab.full_error(plan, 0.2);
    EXPECT_NEAR(lab.projected_error(plan, 0.2, lab.spectrum().max_eigenvalue()), full, 1e-12);
    EXPECT_NEAR(lab.projected_error(plan, 0.2, std::numeric_limits<double>::infinity()), full, 1e-12);
  }
}

TEST(ProjectedError, SixSitesBelowFull) {
  const TrotterLab lab(build_aklt(6));
  const auto plan = suzuki_plan(1, 2);
  const double full = lab.full_error(plan, 0.1);
  for (double delta : {0.5, 1.0}) {
    EXPECT_LT(lab.projected_error(plan, 0.1, delta), full);
  }
}

TEST(ProjectedError, MonotoneInDeltaAndBelowFull) {
  const TrotterLab lab(build_mg(6));
  for (int p : {1, 2}) {
    const auto plan = suzuki_plan(p, lab.gamma_count());
    for (double t : {0.05, 0.5}) {
      const double full = lab.full_error(plan, t);
      EXPECT_LE(full, 2.0);
      double previous = 0.0;
      for (int i = 0; i <= 30; ++i) {
        const double delta = lab.spectrum().max_eigenvalue() * i / 30.0;
        const double e = lab.projected_error(plan, t, delta);
        EXPECT_GE(e + 1e-13, previous);
        EXPECT_LE(e, full + 1e-12);
        previous = e;
      }
    }
  }
}

TEST(ProjectedError, MatchesExplicitProjectorProduct) {
  const auto& lab = aklt4();
  const auto plan = suzuki_plan(2, 2);
  const Matrix diff = lab.exact_propagator(0.4) - lab.trotter_step(plan, 0.4);
  const Matrix pi = low_energy_projector(lab.spectrum(), 1.0).matrix();
  EXPECT_NEAR(lab.projected_error(plan, 0.4, 1.0), spectral_norm(Matrix(diff * pi)), 1e-12);
}

TEST(AccumulatedError, BoundedByStepSum) {
  const auto& lab = aklt4();
  for (int p : {1, 2}) {
    const auto plan = suzuki_plan(p, 2);
    for (long long r : {1, 2, 4, 8}) {
      EXPECT_LE(lab.accumulated_error(plan, 1.0, r, 1.0), r * lab.projected_error(plan, 1.0 / r, 1.0) + 1e-9);
    }
  }
  EXPECT_THROW(lab.accumulated_error(suzuki_plan(1, 2), 1.0, 0, 1.0), Error);
}

TEST(MatrixPower, MatchesRepeatedProduct) {
  const Matrix step = aklt4().trotter_step(suzuki_plan(1, 2), 0.1);
  Matrix manual = Matrix::Identity(81, 81);
  for (int i = 0; i < 7; ++i) manual = step * manual;
  EXPECT_LE(max_abs_entry(Matrix(matrix_power(step, 7) - manual)), 1e-12);
  EXPECT_THROW(matrix_power(step, -1), Error);
}

TEST(Leakage, IdentityDoesNotLeak) {
  const auto& lab = aklt4();
  EXPECT_LE(lab.leakage_norm(Matrix::Identity(81, 81), 0.5, 1.0), 1e-12);
}

TEST(Leakage, AboveSpectrumIsZero) {
  const auto& lab = aklt4();
  const Matrix o = lab.embedded_terms()[0];
  EXPECT_EQ(lab.leakage_norm(o, 0.5, lab.spectrum().max_eigenvalue() + 1.0), 0.0);
}

TEST(Leakage, RequiresOrderedThresholds) {
  const auto& lab = aklt4();
  EXPECT_THROW(lab.leakage_norm(Matrix::Identity(81, 81), 1.0, 1.0), Error);
  EXPECT_THROW(lab.leakage_norm(Matrix::Identity(3, 3), 0.0, 1.0), Error);
}

TEST(Leakage, BoundedByExcitationEstimate) {
  const TrotterLab lab(build_aklt(5));
  const double g = lab.extensiveness();
  const int k = lab.locality_k();
  const auto terms = lab.embedded_terms();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const int s = static_cast<int>(lab.spec().terms()[i].support().size());
    for (double delta : {0.5, 1.0}) {
      for (double extra = 0.0; extra <= 8.0 * k * g; extra += k * g) {
        const double dp = delta + 3.0 * g * s + extra;
        EXPECT_LE(lab.leakage_norm(terms[i], delta, dp),
                  excitation_bound_rhs(spectral_norm(terms[i]), delta, dp, g, s, k));
      }
    }
  }
}

TEST(Leakage, FreeFunctionMatchesLab) {
  const auto spec = build_aklt(3);
  const TrotterLab lab(spec);
  const Matrix o = lab.embedded_terms()[1];
  EXPECT_NEAR(leakage_norm(spec, DenseOperator(o, true), 0.1, 0.9), lab.leakage_norm(o, 0.1, 0.9), 1e-14);
}

TEST(NestedCommutators, ZeroWhenEverythingCommutes) {
  EXPECT_LE(nested_commutator_sum(commuting_spec(), 1), 1e-12);
  EXPECT_LE(nested_commutator_sum(commuting_spec(), 2), 1e-12);
}

TEST(NestedCommutators, DepthZeroIsSumOfNorms) {
  const auto& lab = aklt4();
  EXPECT_NEAR(lab.nested_commutator_sum(0), 3.0, 1e-12);
}

TEST(NestedCommutators, DepthOneMatchesBruteForce) {
  const TrotterLab lab(build_mg(5));
  const auto terms = lab.embedded_terms();
  double brute = 0.0;
  for (std::size_t a = 0; a < terms.size(); ++a)
    for (std::size_t b = 0; b < terms.size(); ++b)
      brute += spectral_norm(Matrix(terms[b] * terms[a] - terms[a] * terms[b]));
  EXPECT_NEAR(lab.nested_commutator_sum(1), brute, 1e-10);
}

TEST(NestedCommutators, DepthTwoMatchesBruteForce) {
  const TrotterLab lab(build_aklt(4));
  const auto terms = lab.embedded_terms();
  double brute = 0.0;
  for (const auto& x0 : terms)
    for (const auto& x1 : terms)
      for (const auto& x2 : terms) {
        const Matrix inner = x1 * x0 - x0 * x1;
        brute += spectral_norm(Matrix(x2 * inner - inner * x2));
      }
  EXPECT_NEAR(lab.nested_commutator_sum(2), brute, 1e-10);
}

TEST(NestedCommutators, UnprojectedBound) {
  const auto& lab = aklt4();
  for (int q : {1, 2}) {
    EXPECT_LE(lab.nested_commutator_sum(q), unprojected_commutator_rhs(q, 2, 2.0, 4));
  }
}

TEST(NestedCommutators, ProjectedBoundAkltFour) {
  const auto& lab = aklt4();
  const Matrix basis = lab.spectrum().basis_at_most(1.0);
  EXPECT_LE(lab.nested_commutator_sum(2, basis), 128.0);
  EXPECT_DOUBLE_EQ(thm_s1_rhs(2, 2, 2.0, 1.0), 128.0);
}

TEST(NestedCommutators, ProjectedBoundOnSmallModels) {
  for (const auto& spec : {build_aklt(3), build_aklt(5), build_mg(4), build_mg(5)}) {
    const TrotterLab lab(spec);
    for (int q : {1, 2}) {
      for (double delta : {0.5, 1.0}) {
        const auto pi = low_energy_projector(lab.spectrum(), delta);
        EXPECT_LE(nested_commutator_sum(spec, q, pi),
                  thm_s1_rhs(q, lab.locality_k(), lab.extensiveness(), delta));
      }
    }
  }
}

TEST(NestedCommutators, RejectsDeepNesting) {
  EXPECT_THROW(aklt4().nested_commutator_sum(4), Error);
  EXPECT_THROW(aklt4().nested_commutator_sum(-1), Error);
}

TEST(Expectation, GroundStateHasZeroSum) {
  const auto& lab = aklt4();
  const Vector psi = lab.spectrum().eigenvectors.col(0);
  for (int q : {0, 1, 2}) {
    const auto c = low_energy_expectation_sum(lab, q, psi, 0.0);
    EXPECT_EQ(c.bound, 0.0);
    EXPECT_LE(c.value, 1e-9);
  }
}

TEST(Expectation, RandomLowEnergyStates) {
  const auto& lab = aklt4();
  std::mt19937_64 rng(42);
  const Matrix basis = lab.spectrum().basis_at_most(1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const Vector psi = random_state_in(basis, rng);
    const auto c1 = low_energy_expectation_sum(lab, 1, psi, 1.0);
    EXPECT_DOUBLE_EQ(c1.bound, 8.0);
    EXPECT_LE(c1.value, c1.bound);
    const auto c0 = low_energy_expectation_sum(lab, 0, psi, 1.0);
    EXPECT_NEAR(c0.value, lab.expectation(psi), 1e-10);
    EXPECT_LE(c0.value, 1.0 + 1e-12);
  }
}

TEST(Expectation, RejectsStateOutsideSubspace) {
  const auto& lab = aklt4();
  const Vector psi = lab.spectrum().eigenvectors.col(80);
  EXPECT_THROW(low_energy_expectation_sum(lab, 1, psi, 1.0), Error);
}

TEST(TailWeight, ExtremesAndExpectation) {
  const auto& lab = aklt4();
  std::mt19937_64 rng(3);
  const Vector psi = random_state_in(lab.spectrum().eigenvectors, rng);
  EXPECT_NEAR(lab.tail_weight(psi, -1.0), 1.0, 1e-12);
  EXPECT_EQ(lab.tail_weight(psi, lab.spectrum().max_eigenvalue()), 0.0);
  double manual = 0.0;
  const Vector coeffs = lab.spectrum().eigenvectors.adjoint() * psi;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) manual += std::norm(coeffs(i)) * lab.spectrum().eigenvalues(i);
  EXPECT_NEAR(lab.expectation(psi), manual, 1e-10);
}
