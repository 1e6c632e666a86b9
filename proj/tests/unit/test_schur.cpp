#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "spb/bounds.hpp"
#include "spb/errors.hpp"
#include "spb/schur.hpp"

using namespace spb;

namespace {

double reconstruction_error(const SchurSplit& s) {
  const Index n = s.n(), r = s.r();
  CMatrix u(n, n), t = CMatrix::Zero(n, n);
  u << s.u1, s.u2;
  t.topLeftCorner(r, r) = s.t11;
  t.topRightCorner(r, n - r) = s.t12;
  t.bottomRightCorner(n - r, n - r) = s.t22;
  return (u * t * u.adjoint() - s.a.cast<std::complex<double>>()).norm();
}

double lower_part(const CMatrix& t) {
  double m = 0.0;
  for (Index j = 0; j < t.cols(); ++j)
    for (Index i = j + 1; i < t.rows(); ++i) m = std::max(m, std::abs(t(i, j)));
  return m;
}

}  // namespace

TEST(SchurSplit, SymmetricInputIsDiagonal) {
  const Matrix a = oracle::random_symmetric(12, 1);
  const SchurSplit s = schur_split(a, 3);
  EXPECT_LT(s.t12.cwiseAbs().maxCoeff(), 1e-12);
  for (const CMatrix* b : {&s.t11, &s.t22}) {
    CMatrix off = *b;
    off.diagonal().setZero();
    EXPECT_LT(off.cwiseAbs().maxCoeff(), 1e-12 * oracle::largest_singular_value(a));
  }
  EXPECT_LT(reconstruction_error(s), 1e-10 * oracle::largest_singular_value(a));
  const oracle::Eig e = oracle::jacobi_eigen(a);
  for (Index i = 0; i < 3; ++i) EXPECT_NEAR(s.t11(i, i).real(), e.values(i), 1e-10);
}

TEST(SchurSplit, TriangularInputKeepsIdentityUpToPhases) {
  Matrix a = Matrix::Zero(6, 6);
  for (Index i = 0; i < 6; ++i) {
    a(i, i) = 6.0 - static_cast<double>(i);
    for (Index j = i + 1; j < 6; ++j) a(i, j) = 0.1 * static_cast<double>(i + j);
  }
  const SchurSplit s = schur_split(a, 2);
  CMatrix u(6, 6);
  u << s.u1, s.u2;
  for (Index i = 0; i < 6; ++i) EXPECT_NEAR(std::abs(u(i, i)), 1.0, 1e-12);
}

TEST(SchurSplit, RandomNonsymmetricReconstruction) {
  const Matrix a = oracle::gaussian(20, 20, 2);
  const SchurSplit s = schur_split(a, 2);
  EXPECT_LT(reconstruction_error(s), 1e-10 * oracle::largest_singular_value(a));
  EXPECT_LT((s.u1.adjoint() * s.u2).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(lower_part(s.t11), 1e-12);
  EXPECT_LT(lower_part(s.t22), 1e-12);
  // The selected cluster has the largest real parts.
  const double min_top = s.t11.diagonal().real().minCoeff();
  EXPECT_GE(min_top, s.t22.diagonal().real().maxCoeff());
}

TEST(SchurSplit, Errors) {
  EXPECT_THROW(schur_split(Matrix::Identity(4, 4), 1), DegenerateSplitError);
  EXPECT_THROW(schur_split(Matrix::Zero(3, 4), 1), DimensionError);
  EXPECT_THROW(schur_split(Matrix::Identity(3, 3), 3), DimensionError);
}

TEST(ReorderSchur, MovesFlaggedEntriesToTop) {
  const Matrix a = oracle::gaussian(10, 10, 3);
  Eigen::ComplexSchur<CMatrix> cs(a.cast<std::complex<double>>());
  CMatrix t = cs.matrixT();
  CMatrix u = cs.matrixU();
  t.triangularView<Eigen::StrictlyLower>().setZero();
  std::vector<bool> pick(10, false);
  pick[9] = pick[4] = pick[7] = true;
  const CVector picked{{t(4, 4), t(7, 7), t(9, 9)}};
  const CMatrix before = u * t * u.adjoint();
  reorder_schur(t, u, pick);
  EXPECT_LT((u * t * u.adjoint() - before).norm(), 1e-11 * before.norm());
  EXPECT_LT((u.adjoint() * u - CMatrix::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(lower_part(t), 1e-12);
  for (Index k = 0; k < 3; ++k) {
    double best = 1e300;
    for (Index j = 0; j < 3; ++j) best = std::min(best, std::abs(t(k, k) - picked(j)));
    EXPECT_LT(best, 1e-10);
  }
}

TEST(SchurBound, SymmetricReductionMatchesMainBound) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Index n = 20, r = 1 + static_cast<Index>(seed % 3);
    const Matrix a = oracle::random_symmetric(n, seed + 10);
    const Matrix e = 0.01 * oracle::random_symmetric(n, seed + 20);
    const SchurSplit s = schur_split(a, r);
    const SchurBound sb = schur_bound(s, e);
    const BoundReport br = theorem_main_bound(SymMatrix(a), SymMatrix(e), r);
    EXPECT_EQ(sb.gap.method, "exact-diagonal");
    EXPECT_NEAR(sb.report.term_quadratic, br.term_quadratic, 1e-10);
    EXPECT_NEAR(sb.report.term_cross, br.term_cross, 1e-10);
    EXPECT_NEAR(sb.report.term_submult, br.term_submult, 1e-10);
    EXPECT_NEAR(sb.report.gap_used, br.gap_used, 1e-10);
  }
}

TEST(SchurBound, LargeT12IsInapplicable) {
  const fixture::Nonnormal inst = fixture::nonnormal_instance(12, 2, 0.0, 4);
  const double gap = schur_bound(schur_split(inst.a, 2), Matrix::Zero(12, 12)).gap.gap;
  ASSERT_GT(gap, 0.0);
  const fixture::Nonnormal big = fixture::nonnormal_instance(12, 2, gap, 4);
  const SchurBound sb = schur_bound(schur_split(big.a, 2), Matrix::Zero(12, 12));
  EXPECT_FALSE(sb.t12_small);
  EXPECT_FALSE(sb.applicable);
  EXPECT_FALSE(sb.reason.empty());
}

TEST(SchurBound, NonnormalSoundAgainstEigenvectorOracle) {
  int applicable = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Index n = 30, r = 1 + static_cast<Index>(seed % 3);
    const fixture::Nonnormal base = fixture::nonnormal_instance(n, r, 0.0, 100 * seed);
    const double gap = schur_bound(schur_split(base.a, r), Matrix::Zero(n, n)).gap.gap;
    const fixture::Nonnormal inst = fixture::nonnormal_instance(n, r, 0.05 * gap, 100 * seed);
    const Matrix e = fixture::nonsymmetric_perturbation(n, 0.09 * gap, seed % 2 == 0, 100 * seed + 50);
    const SchurSplit s = schur_split(inst.a, r);
    const SchurBound sb = schur_bound(s, e);
    ASSERT_TRUE(sb.applicable) << sb.reason;
    ++applicable;
    const SchurNewtonResult nr = schur_newton(s, e);
    const CMatrix oracle_basis = fixture::eigvec_basis(inst.a + e, s.t11.diagonal());
    const double obs = fixture::procrustes_error_c(oracle_basis, s.u1);
    EXPECT_NEAR(unitary_aligned_error(nr.u1hat, s.u1), obs, 1e-9);
    EXPECT_LE(obs, sb.report.total) << seed;
    const CMatrix alt = schur_invariant_basis(s, e);
    EXPECT_NEAR(fixture::procrustes_error_c(alt, s.u1), obs, 1e-9);
  }
  EXPECT_EQ(applicable, 20);
}

TEST(SchurNewton, ZeroPerturbation) {
  const fixture::Nonnormal inst = fixture::nonnormal_instance(10, 2, 0.01, 7);
  const SchurSplit s = schur_split(inst.a, 2);
  const SchurNewtonResult nr = schur_newton(s, Matrix::Zero(10, 10));
  EXPECT_EQ(nr.iters, 0);
  EXPECT_LT(unitary_aligned_error(nr.u1hat, s.u1), 1e-14);
}

TEST(ComplexNorms, Basic) {
  CMatrix m(2, 2);
  m << std::complex<double>(3, 4), 0, 0, 1;
  EXPECT_NEAR(two_to_inf_norm_c(m), 5.0, 1e-15);
  EXPECT_NEAR(spectral_norm_c(m), 5.0, 1e-14);
}
