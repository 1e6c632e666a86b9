#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "spb/errors.hpp"
#include "spb/generators.hpp"
#include "spb/linalg.hpp"
#include "spb/rng.hpp"
#include "spb/separation.hpp"

using namespace spb;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Matrix sep_probe_q(Index n) {
  Matrix q = Matrix::Zero(n + 1, 1);
  q(0, 0) = 1.0;
  for (Index i = 0; i < n; ++i) q(i + 1, 0) = (i < n / 2 ? 2.0 : -2.0) / std::sqrt(double(n));
  return q;
}

// Split with the same eigenvectors and all eigenvalues moved by xi.
SpectralSplit shifted(const SpectralSplit& s, double xi) {
  Matrix a = s.a().dense() + xi * Matrix::Identity(s.n(), s.n());
  return SpectralSplit(SymMatrix(std::move(a)), s.v1(), s.lambda1().array() + xi, s.v2(),
                       s.lambda2().array() + xi);
}

}  // namespace

TEST(SepDiag, Examples) {
  Vector d2 = Vector::Zero(9);
  d2(0) = 1.0;
  d2(8) = -1.0;
  EXPECT_EQ(sep_diag(vec({2.0}), d2).value, 1.0);
  EXPECT_EQ(sep_diag(vec({5.0, 4.0}), vec({4.0})).value, 0.0);
  const SepEstimate s = sep_diag(vec({2.5, 3.0}), vec({1.0, -2.0}));
  EXPECT_EQ(s.kind, SepKind::ExactDiagonal);
  ASSERT_TRUE(s.witness.has_value());
  EXPECT_EQ(s.witness->rows(), 2);
  EXPECT_EQ(s.witness->cols(), 2);
  EXPECT_EQ((*s.witness)(0, 0), 1.0);
  EXPECT_THROW(sep_diag(vec({1.0}), vec({2.0})), PreconditionError);
  EXPECT_THROW(sep_diag(Vector(), vec({2.0})), DimensionError);
}

TEST(SepDiag, ShiftInvariance) {
  const Vector d1 = vec({3.0, 2.5, 4.0});
  const Vector d2 = vec({1.0, -0.5});
  const double base = sep_diag(d1, d2).value;
  EXPECT_EQ(sep_diag(d1.array() + 7.0, d2.array() + 7.0).value, base);
  SeededRng rng(5);
  for (int k = 0; k < 50; ++k) {
    const double xi = 20.0 * (rng.uniform() - 0.5);
    EXPECT_NEAR(sep_diag(d1.array() + xi, d2.array() + xi).value, base, 1e-13);
  }
}

TEST(SepDiag, WitnessAttainsValueInAllThreeNorms) {
  const Vector d1 = vec({3.0, 2.5, 4.0});
  const Vector d2 = vec({1.0, -0.5, 0.25, 0.75});
  const SepEstimate s = sep_diag(d1, d2);
  const Matrix& z = *s.witness;
  const Matrix img = z * d1.asDiagonal() - d2.asDiagonal() * z;
  EXPECT_NEAR(img.norm() / z.norm(), s.value, 1e-12);
  EXPECT_NEAR(oracle::largest_singular_value(img) / oracle::largest_singular_value(z), s.value, 1e-12);
  EXPECT_NEAR(two_to_inf_norm(img) / two_to_inf_norm(z), s.value, 1e-12);
}

TEST(Sep2Perturbed, Examples) {
  EXPECT_EQ(sep2_perturbed(vec({3.0}), vec({1.0}), 0.0, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(sep2_perturbed(vec({1.0}), vec({0.0}), 0.25, 0.25), 0.5);
  EXPECT_EQ(sep2_perturbed(vec({1.0}), vec({0.0}), 0.75, 0.5), 0.0);
}

TEST(RestrictedLower, ModelFamilies) {
  EXPECT_NEAR(sep_2inf_restricted_lower(gen_low_rank(64).split).value, 1.0, 1e-12);
  EXPECT_NEAR(sep_2inf_restricted_lower(gen_coherent(64).split).value, 2.0, 1e-12);
  for (Index n : {4, 16, 64}) {
    const SepEstimate s = sep_2inf_restricted_lower(gen_sep_example(n).split);
    EXPECT_EQ(s.kind, SepKind::CertifiedLower);
    EXPECT_GE(s.value, 1.0 / std::sqrt(double(n + 1)) - 1e-12);
  }
}

TEST(GapCertificate, ModelFamilies) {
  const GapCertificate low = gap_certificate(gen_low_rank(128).split);
  EXPECT_NEAR(low.gap_lower, 1.0, 1e-12);
  const GapCertificate coh = gap_certificate(gen_coherent(128).split);
  EXPECT_NEAR(coh.sep2, 2.0, 1e-12);
  EXPECT_NEAR(coh.gap_lower, 2.0, 1e-12);
  for (Index n : {4, 16, 64, 256}) {
    const SpectralSplit split = gen_sep_example(n).split;
    const GapCertificate g = gap_certificate(split);
    EXPECT_EQ(g.sepF, 1.0);
    EXPECT_GE(g.gap_lower, 1.0 / std::sqrt(double(n + 1)) - 1e-12);
    EXPECT_LE(g.gap_lower, g.sep2);
    EXPECT_EQ(g.gap_lower, std::min(g.sep2, g.sep2inf_lower));
    const SepEstimate up = sep_2inf_upper_probe(split, {sep_probe_q(n)});
    EXPECT_LE(up.value, 3.0 / std::sqrt(double(n)) + 1e-12);
    EXPECT_GE(up.value, g.sep2inf_lower - 1e-12);
  }
}

TEST(UpperProbe, SepExampleProbeHasUnitRowNorm) {
  for (Index n : {4, 8, 64}) EXPECT_NEAR(two_to_inf_norm(sep_probe_q(n)), 1.0, 1e-15);
}

TEST(UpperProbe, RejectsCandidateOutsideComplement) {
  const SpectralSplit split = gen_low_rank(16).split;
  EXPECT_THROW(sep_2inf_upper_probe(split, {split.v1().matrix()}), PreconditionError);
  EXPECT_THROW(sep_2inf_upper_probe(split, {}), PreconditionError);
  EXPECT_THROW(sep_2inf_upper_probe(split, {Matrix::Zero(16, 2)}), PreconditionError);
}

TEST(UpperProbe, ExhaustiveUnitCandidatesOnDiagonalEqualSepDiag) {
  SeededRng rng(77);
  for (int inst = 0; inst < 20; ++inst) {
    const Index n = 7, r = 2;
    Vector d(n);
    for (Index i = 0; i < n; ++i) d(i) = 4.0 * rng.uniform() - 2.0;
    std::sort(d.data(), d.data() + n, std::greater<>());
    if (d(r - 1) - d(r) < 1e-3) continue;
    const SpectralSplit split = spectral_split(SymMatrix(Matrix(d.asDiagonal())), r);
    std::vector<Matrix> cands;
    for (Index i = 0; i < n - r; ++i) {
      for (Index j = 0; j < r; ++j) {
        Matrix z = Matrix::Zero(n - r, r);
        z(i, j) = 1.0;
        cands.push_back(split.v2().matrix() * z);
      }
    }
    const double exact = sep_diag(split.lambda1(), split.lambda2()).value;
    const SepEstimate up = sep_2inf_upper_probe(split, cands);
    EXPECT_NEAR(up.value, exact, 1e-12);
    EXPECT_GE(up.value, sep_2inf_restricted_lower(split).value - 1e-12);
  }
}

TEST(UpperProbe, ShiftLeavesEveryRatioUnchanged) {
  const SpectralSplit split = spectral_split(SymMatrix(oracle::random_symmetric(10, 3)), 3);
  const Matrix& v2 = split.v2().matrix();
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix z = v2 * oracle::gaussian(7, 3, 100 + s);
    const double base = sep_2inf_upper_probe(split, {z}).value;
    for (double xi : {-3.0, 0.5, 11.0}) {
      EXPECT_NEAR(sep_2inf_upper_probe(shifted(split, xi), {z}).value, base, 1e-12 * (1 + base));
    }
  }
}

TEST(UpperProbe, RandomSamplesNeverBeatCertifiedLower) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Index n = 12, r = 1 + static_cast<Index>(seed % 3);
    const SpectralSplit split = spectral_split(SymMatrix(oracle::random_symmetric(n, seed)), r);
    const double lower = sep_2inf_restricted_lower(split).value;
    const Matrix& v2 = split.v2().matrix();
    std::vector<Matrix> cands;
    for (std::uint64_t k = 0; k < 1000; ++k) cands.push_back(v2 * oracle::gaussian(n - r, r, seed * 7919 + k));
    for (const Matrix& z : cands) {
      EXPECT_GE(sep_2inf_upper_probe(split, {z}).value, lower - 1e-12);
    }
  }
}

TEST(SepFrobenius, KroneckerMatchesBruteForceAndDiagonalFormula) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Matrix b = oracle::random_symmetric(3, seed) + 5.0 * Matrix::Identity(3, 3);
    const Matrix c = oracle::random_symmetric(4, seed + 10);
    EXPECT_NEAR(sep_frobenius_kron(b, c), oracle::sep_frobenius_bruteforce(b, c), 1e-10);
    const Matrix nb = oracle::gaussian(3, 3, seed + 20);
    const Matrix nc = oracle::gaussian(5, 5, seed + 30);
    EXPECT_NEAR(sep_frobenius_kron(nb, nc), oracle::sep_frobenius_bruteforce(nb, nc), 1e-10);
  }
  const Vector d1 = vec({3.0, 2.0});
  const Vector d2 = vec({1.5, 0.0, -1.0});
  EXPECT_NEAR(sep_frobenius_kron(Matrix(d1.asDiagonal()), Matrix(d2.asDiagonal())),
              sep_diag(d1, d2).value, 1e-12);
}

TEST(SepFrobenius, RestrictedFrobeniusProbeMatchesUnrestricted) {
  // In the Frobenius norm, restricting Z to ran(V2) does not change sep.
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Index n = 10, r = 2;
    const SpectralSplit split = spectral_split(SymMatrix(oracle::random_symmetric(n, seed + 40)), r);
    const Matrix& v2 = split.v2().matrix();
    const Matrix c = v2 * split.lambda2().asDiagonal() * v2.transpose();
    const Matrix l1 = split.lambda1().asDiagonal();
    const double unrestricted = sep_frobenius_kron(Matrix(l1), Matrix(split.lambda2().asDiagonal()));
    double best = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n - r; ++i) {
      for (Index j = 0; j < r; ++j) {
        Matrix m = Matrix::Zero(n - r, r);
        m(i, j) = 1.0;
        const Matrix z = v2 * m;
        best = std::min(best, (z * l1 - c * z).norm() / z.norm());
      }
    }
    EXPECT_NEAR(best, unrestricted, 1e-10);
    for (std::uint64_t k = 0; k < 200; ++k) {
      const Matrix z = v2 * oracle::gaussian(n - r, r, 500 + k);
      EXPECT_GE((z * l1 - c * z).norm() / z.norm(), unrestricted - 1e-10);
    }
  }
}

TEST(BetaW, IdentityApproachesInverseSqrtN) {
  for (Index n : {2, 3, 4, 5, 6}) {
    const BetaEstimate b = beta_w_estimate(OrthoBasis(Matrix::Identity(n, n)), 32, 500, 3);
    const double floor = 1.0 / std::sqrt(double(n));
    EXPECT_GE(b.upper_estimate, floor - 1e-12);
    double brute = 1.0;
    for (std::uint64_t k = 0; k < 20000; ++k) {
      Matrix x = oracle::gaussian(n, 1, 9000 + k);
      x /= x.norm();
      brute = std::min(brute, x.cwiseAbs().maxCoeff());
    }
    EXPECT_LE(b.upper_estimate, brute + 1e-3);
    EXPECT_NEAR(b.x.norm(), 1.0, 1e-12);
  }
}

TEST(BetaW, SingleColumnAndFloor) {
  Matrix e1 = Matrix::Zero(5, 1);
  e1(0, 0) = 1.0;
  EXPECT_NEAR(beta_w_estimate(OrthoBasis(e1)).upper_estimate, 1.0, 1e-12);
  const OrthoBasis w(oracle::random_orthonormal(20, 3, 8));
  EXPECT_GE(beta_w_estimate(w).upper_estimate, 1.0 / std::sqrt(20.0) - 1e-9);
}

TEST(BetaW, DeterministicForSeed) {
  const OrthoBasis w(oracle::random_orthonormal(15, 3, 9));
  const BetaEstimate a = beta_w_estimate(w, 8, 200, 42);
  const BetaEstimate b = beta_w_estimate(w, 8, 200, 42);
  EXPECT_EQ(a.upper_estimate, b.upper_estimate);
  EXPECT_EQ(a.best_start, b.best_start);
}

TEST(ComplementInfNorm, CoherentConstantInN) {
  for (Index n : {16, 64, 256}) EXPECT_NEAR(complement_inf_norm(gen_coherent(n).split), 2.0, 1e-12);
}
