#include "spb/generators.hpp"

#include <cmath>
#include <sstream>

#include "spb/errors.hpp"

namespace spb {

namespace {

constexpr Index kFullCheckLimit = 512;

void require_even(Index n, Index min_n, const char* what) {
  if (n < min_n || n % 2 != 0) {
    std::ostringstream msg;
    msg << what << ": n must be even and at least " << min_n << ", got " << n;
    throw PreconditionError(msg.str());
  }
}

Vector ones_pm(Index n) {
  Vector v = Vector::Ones(n);
  v.tail(n / 2).setConstant(-1.0);
  return v;
}

SpectralSplit::Check check_for(Index n) {
  return n <= kFullCheckLimit ? SpectralSplit::Check::Full : SpectralSplit::Check::Cheap;
}

// A = basis diag(vals) basis^T, exactly symmetric.
Matrix assemble(const Matrix& basis, const Vector& vals) {
  Matrix a = basis * vals.asDiagonal() * basis.transpose();
  return 0.5 * (a + a.transpose());
}

}  // namespace

const char* to_string(Family f) {
  switch (f) {
    case Family::LowRank: return "low-rank";
    case Family::Coherent: return "coherent";
    case Family::Tightness: return "tightness";
    case Family::SepExample: return "sep-example";
  }
  return "unknown";
}

Family family_from_string(const std::string& s) {
  if (s == "low-rank") return Family::LowRank;
  if (s == "coherent") return Family::Coherent;
  if (s == "tightness") return Family::Tightness;
  if (s == "sep-example") return Family::SepExample;
  throw ConfigError("unknown family '" + s + "'");
}

Instance gen_low_rank(Index n) {
  require_even(n, 4, "gen_low_rank");
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  Matrix v1(n, 2);
  v1.col(0).setConstant(s);
  v1.col(1) = ones_pm(n) * s;
  Matrix v2 = orthonormal_complement(v1);
  const Vector l1 = Vector::Ones(2);
  const Vector l2 = Vector::Zero(n - 2);
  SymMatrix a(assemble(v1, l1));
  return Instance{SpectralSplit(std::move(a), OrthoBasis::trusted(v1), l1,
                                OrthoBasis::trusted(std::move(v2)), l2, check_for(n))};
}

Instance gen_coherent(Index n) {
  require_even(n, 4, "gen_coherent");
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  Matrix v1(n, 2);
  v1.col(0).setConstant(s);
  v1.col(1) = ones_pm(n) * s;
  Matrix known(n, 3);
  known.leftCols(2) = v1;
  known.col(2).setZero();
  known(0, 2) = 1.0 / std::sqrt(2.0);
  known(1, 2) = -1.0 / std::sqrt(2.0);
  Matrix v2(n, n - 2);
  v2.col(0) = known.col(2);
  v2.rightCols(n - 3) = orthonormal_complement(known);
  const Vector l1 = Vector::Constant(2, 4.0);
  Vector l2 = Vector::Zero(n - 2);
  l2(0) = 2.0;
  Matrix a = 4.0 * v1 * v1.transpose();
  a(0, 0) += 1.0;
  a(1, 1) += 1.0;
  a(0, 1) -= 1.0;
  a(1, 0) -= 1.0;
  return Instance{SpectralSplit(SymMatrix(std::move(a)), OrthoBasis::trusted(v1), l1,
                                OrthoBasis::trusted(std::move(v2)), l2, check_for(n))};
}

Instance gen_sep_example(Index n) {
  require_even(n, 4, "gen_sep_example");
  const Index m = n + 1;
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  Vector v1 = Vector::Zero(m);
  v1.tail(n).setConstant(s);
  Vector v2 = Vector::Zero(m);
  v2.tail(n) = ones_pm(n) * s;
  Vector e1 = Vector::Zero(m);
  e1(0) = 1.0;

  Matrix a = 2.0 * v1 * v1.transpose();
  a += e1 * v2.transpose() + v2 * e1.transpose();

  Matrix known(m, 3);
  known << v1, e1, v2;
  Matrix basis2(m, n);
  basis2.col(0) = (e1 + v2) / std::sqrt(2.0);
  basis2.middleCols(1, n - 2) = orthonormal_complement(known);
  basis2.col(n - 1) = (e1 - v2) / std::sqrt(2.0);
  Vector l2 = Vector::Zero(n);
  l2(0) = 1.0;
  l2(n - 1) = -1.0;
  const Vector l1 = Vector::Constant(1, 2.0);
  return Instance{SpectralSplit(SymMatrix(std::move(a)), OrthoBasis::trusted(Matrix(v1)), l1,
                                OrthoBasis::trusted(std::move(basis2)), l2, check_for(m))};
}

SymMatrix gen_gaussian_perturbation(Index n, double sigma, const SeededRng& rng) {
  if (n < 1) throw DimensionError("gen_gaussian_perturbation: n must be positive");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw PreconditionError("gen_gaussian_perturbation: sigma must be finite and >= 0");
  }
  Matrix z(n, n);
  if (sigma == 0.0) {
    z.setZero();
    return SymMatrix(std::move(z));
  }
  // Entry k of the row-major upper triangle (diagonal included) takes
  // normal_at(k).
  std::uint64_t k = 0;
  std::array<double, 2> pair{};
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j, ++k) {
      if (k % 2 == 0) pair = rng.normal_pair(k / 2);
      const double v = sigma * pair[k % 2];
      z(i, j) = v;
      z(j, i) = v;
    }
  }
  return SymMatrix(std::move(z));
}

TightnessInstance gen_tightness_example(Index n, double c_cross, double c_submult) {
  require_even(n, 8, "gen_tightness_example");
  if (!(c_cross >= 0.0) || !(c_submult >= 0.0) || !std::isfinite(c_cross) ||
      !std::isfinite(c_submult)) {
    throw PreconditionError("gen_tightness_example: constants must be finite and >= 0");
  }
  const double dn = static_cast<double>(n);
  const double rs = 1.0 / std::sqrt(dn);
  const Vector v1 = Vector::Constant(n, rs);
  const Vector u = ones_pm(n) * rs;  // already orthogonal to v1
  Vector w = -v1(0) * v1;            // P2 e1
  w(0) += 1.0;

  const double scale = std::pow(dn, -1.0 / 3.0);
  Matrix e = Matrix::Zero(n, n);
  Vector b = u;
  if (c_submult > 0.0) {
    // N = w u^T + u w^T has eigenvalues u.w +- ||w|| (u is a unit vector).
    const double uw = u.dot(w);
    const double n_norm = std::abs(uw) + w.norm();
    const double eps = scale * c_submult / n_norm;
    e.noalias() += eps * (w * u.transpose() + u * w.transpose());
    // y = w + alpha u with alpha chosen so that (I - M) y has no u component.
    const double alpha = (1.0 - eps * uw) / eps;
    const Vector y = w + alpha * u;
    Vector my = y - e * y;
    b = my - v1 * v1.dot(my);
  }
  const double b_norm = b.norm();
  if (!(b_norm > 0.0)) throw Error("gen_tightness_example: degenerate cross direction");
  b /= b_norm;
  e.noalias() += scale * c_cross * (b * v1.transpose() + v1 * b.transpose());
  e = 0.5 * (e + e.transpose());

  Matrix v1m = v1;
  Matrix v2 = orthonormal_complement(v1m);
  SymMatrix a(assemble(v1m, Vector::Ones(1)));
  return TightnessInstance{
      SpectralSplit(std::move(a), OrthoBasis::trusted(v1m), Vector::Ones(1),
                    OrthoBasis::trusted(std::move(v2)), Vector::Zero(n - 1), check_for(n)),
      SymMatrix(std::move(e))};
}

}  // namespace spb
