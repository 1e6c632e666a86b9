#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "oracles.hpp"

namespace fixture {

Nonnormal nonnormal_instance(Eigen::Index n, Eigen::Index r, double t12_norm, std::uint64_t seed) {
  Nonnormal out;
  const Matrix g = oracle::gaussian(n, n + 1, seed);
  Matrix t = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = 0.5 * (1.0 + std::tanh(g(i, n)));
    t(i, i) = i < r ? 4.0 + u : 2.0 * u - 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const bool in_t12 = i < r && j >= r;
      if (!in_t12) t(i, j) = 0.3 * g(i, j) / std::sqrt(double(n));
    }
  }
  if (t12_norm > 0.0) {
    Matrix t12 = oracle::gaussian(r, n - r, seed + 1);
    t12 *= t12_norm / oracle::largest_singular_value(t12);
    t.topRightCorner(r, n - r) = t12;
  }
  out.q = oracle::random_orthonormal(n, n, seed + 2);
  out.t = t;
  out.a = out.q * t * out.q.transpose();
  return out;
}

Matrix nonsymmetric_perturbation(Eigen::Index n, double norm, bool triangular, std::uint64_t seed) {
  Matrix e = oracle::gaussian(n, n, seed);
  if (triangular) e = Matrix(e.triangularView<Eigen::Upper>());
  return e * (norm / oracle::largest_singular_value(e));
}

CMatrix eigvec_basis(const Matrix& m, const Eigen::VectorXcd& targets) {
  Eigen::ComplexEigenSolver<CMatrix> es(m.cast<std::complex<double>>());
  const Eigen::VectorXcd& vals = es.eigenvalues();
  std::vector<bool> used(static_cast<std::size_t>(vals.size()), false);
  CMatrix cols(m.rows(), targets.size());
  for (Eigen::Index k = 0; k < targets.size(); ++k) {
    Eigen::Index best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < vals.size(); ++j) {
      const double d = std::abs(vals(j) - targets(k));
      if (!used[static_cast<std::size_t>(j)] && d < bd) bd = d, best = j;
    }
    used[static_cast<std::size_t>(best)] = true;
    cols.col(k) = es.eigenvectors().col(best);
  }
  Eigen::HouseholderQR<CMatrix> qr(cols);
  return qr.householderQ() * CMatrix::Identity(m.rows(), targets.size());
}

double procrustes_error_c(const CMatrix& uhat, const CMatrix& u1) {
  Eigen::BDCSVD<CMatrix> svd(uhat.adjoint() * u1, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const CMatrix d = uhat * (svd.matrixU() * svd.matrixV().adjoint()) - u1;
  double best = 0.0;
  for (Eigen::Index i = 0; i < d.rows(); ++i) best = std::max(best, d.row(i).norm());
  return best;
}

}  // namespace fixture
