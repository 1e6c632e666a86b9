#include <algorithm>
#include <cmath>
#include <limits>

#include "spb/errors.hpp"
#include "spb/linalg.hpp"
#include "spb/rng.hpp"

namespace spb {

namespace {

// Extreme Ritz values from Lanczos with full reorthogonalization. Ritz values
// lie inside the spectrum, so the larger magnitude is a rigorous lower bound
// on ||M||_2.
double lanczos_lower(const Eigen::Ref<const Matrix>& m, int steps) {
  const Index n = m.rows();
  const Index k = std::min<Index>(steps, n);
  Matrix q(n, k + 1);
  Vector alpha(k), beta(k);

  const SeededRng rng(0x5eed5eedull, 7);
  Vector start(n);
  for (Index i = 0; i < n; ++i) start(i) = rng.normal_at(static_cast<std::uint64_t>(i));
  q.col(0) = start.normalized();

  Index used = 0;
  Vector w(n);
  for (Index j = 0; j < k; ++j) {
    w.noalias() = m * q.col(j);
    alpha(j) = q.col(j).dot(w);
    for (int pass = 0; pass < 2; ++pass) {
      const Vector c = q.leftCols(j + 1).transpose() * w;
      w.noalias() -= q.leftCols(j + 1) * c;
    }
    beta(j) = w.norm();
    used = j + 1;
    if (beta(j) <= 1e-13 * std::max(1.0, std::abs(alpha(j)))) break;
    q.col(j + 1) = w / beta(j);
  }

  Matrix t = Matrix::Zero(used, used);
  for (Index j = 0; j < used; ++j) {
    t(j, j) = alpha(j);
    if (j + 1 < used) {
      t(j, j + 1) = beta(j);
      t(j + 1, j) = beta(j);
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(t, Eigen::EigenvaluesOnly);
  return std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(used - 1)));
}

bool shifted_positive_definite(const Eigen::Ref<const Matrix>& m, double t, double sign,
                               Matrix& work) {
  work = sign * m;
  work.diagonal().array() += t;
  Eigen::LLT<Eigen::Ref<Matrix>> llt(work);
  return llt.info() == Eigen::Success;
}

}  // namespace

NormEnclosure sym_norm2_enclosure(const Eigen::Ref<const Matrix>& m, const SymNormOptions& opts) {
  if (m.rows() != m.cols()) throw DimensionError("sym_norm2: matrix is not square");
  if (m.size() == 0) return {};
  const Index n = m.rows();
  if (n <= opts.dense_limit) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    const double v = std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(n - 1)));
    return {v, v};
  }
  const double maxabs = m.cwiseAbs().maxCoeff();
  if (maxabs == 0.0) return {};

  NormEnclosure out;
  out.lower = lanczos_lower(m, opts.lanczos_steps);
  const double floor = 64.0 * n * std::numeric_limits<double>::epsilon() * maxabs;
  double slack = opts.initial_slack;
  Matrix work;
  for (int attempt = 0; attempt < 40; ++attempt) {
    const double t = out.lower * (1.0 + slack) + floor;
    if (shifted_positive_definite(m, t, -1.0, work) && shifted_positive_definite(m, t, 1.0, work)) {
      out.upper = t;
      return out;
    }
    slack *= 4.0;
  }
  // Gershgorin-type fallback; always valid.
  out.upper = m.cwiseAbs().rowwise().sum().maxCoeff();
  return out;
}

double sym_norm2(const Eigen::Ref<const Matrix>& m) { return sym_norm2_enclosure(m).upper; }

}  // namespace spb
