#include "spb/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "spb/errors.hpp"
#include "spb/rng.hpp"

namespace spb {

namespace {

void require_same_shape(const OrthoBasis& a, const OrthoBasis& b, const char* op) {
  if (a.n() != b.n() || a.k() != b.k()) {
    std::ostringstream msg;
    msg << op << ": shape mismatch " << a.n() << "x" << a.k() << " vs " << b.n() << "x" << b.k();
    throw DimensionError(msg.str());
  }
}

bool sorted_descending(const Vector& v) {
  for (Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(i - 1)) return false;
  }
  return true;
}

// Flip each column so that its largest-magnitude entry is positive.
void fix_signs(Matrix& v) {
  for (Index j = 0; j < v.cols(); ++j) {
    Index best = 0;
    double mag = -1.0;
    for (Index i = 0; i < v.rows(); ++i) {
      if (std::abs(v(i, j)) > mag) {
        mag = std::abs(v(i, j));
        best = i;
      }
    }
    if (v(best, j) < 0.0) v.col(j) = -v.col(j);
  }
}

}  // namespace

SymMatrix::SymMatrix(Matrix m, Policy policy, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw DimensionError("SymMatrix: matrix is not square");
  if (m_.rows() < 1) throw DimensionError("SymMatrix: empty matrix");
  const Index n = m_.rows();
  if (policy == Policy::Symmetrize) {
    for (Index j = 0; j < n; ++j) {
      for (Index i = j + 1; i < n; ++i) {
        const double s = 0.5 * (m_(i, j) + m_(j, i));
        m_(i, j) = s;
        m_(j, i) = s;
      }
    }
    return;
  }
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      if (std::abs(m_(i, j) - m_(j, i)) > tol * scale) {
        std::ostringstream msg;
        msg << "SymMatrix: entries (" << i << "," << j << ") and (" << j << "," << i
            << ") differ by " << std::abs(m_(i, j) - m_(j, i));
        throw PreconditionError(msg.str());
      }
      m_(i, j) = m_(j, i);
    }
  }
}

SymMatrix SymMatrix::zero(Index n) { return SymMatrix(Matrix::Zero(n, n)); }

OrthoBasis::OrthoBasis(Matrix columns, double tol) : q_(std::move(columns)) {
  if (q_.cols() > q_.rows()) throw DimensionError("OrthoBasis: more columns than rows");
  if (q_.cols() == 0) return;
  const Matrix gram = q_.transpose() * q_;
  const double dev = (gram - Matrix::Identity(q_.cols(), q_.cols())).cwiseAbs().maxCoeff();
  if (!(dev <= tol)) {
    std::ostringstream msg;
    msg << "OrthoBasis: columns not orthonormal (max |Q^T Q - I| = " << dev << ")";
    throw PreconditionError(msg.str());
  }
}

OrthoBasis OrthoBasis::trusted(Matrix columns) {
  OrthoBasis b;
  if (columns.cols() > columns.rows()) throw DimensionError("OrthoBasis: more columns than rows");
  b.q_ = std::move(columns);
  return b;
}

double two_to_inf_norm(const Eigen::Ref<const Matrix>& b) {
  if (b.size() == 0) throw DimensionError("two_to_inf_norm: empty matrix");
  return b.rowwise().norm().maxCoeff();
}

double inf_norm(const Eigen::Ref<const Matrix>& b) {
  if (b.size() == 0) throw DimensionError("inf_norm: empty matrix");
  return b.cwiseAbs().rowwise().sum().maxCoeff();
}

double spectral_norm(const Eigen::Ref<const Matrix>& b) {
  if (b.size() == 0) return 0.0;
  const Index k = std::min(b.rows(), b.cols());
  if (k <= 64) {
    const Matrix g = b.rows() >= b.cols() ? Matrix(b.transpose() * b) : Matrix(b * b.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }
  Eigen::BDCSVD<Matrix> svd(b);
  return svd.singularValues()(0);
}

Matrix procrustes_align(const OrthoBasis& wtilde, const OrthoBasis& w) {
  require_same_shape(wtilde, w, "procrustes_align");
  const Matrix m = wtilde.matrix().transpose() * w.matrix();
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

double sin_theta_distance(const OrthoBasis& w, const OrthoBasis& wtilde) {
  require_same_shape(w, wtilde, "sin_theta_distance");
  if (w.k() == 0) return 0.0;
  const Matrix resid = wtilde.matrix() - w.matrix() * (w.matrix().transpose() * wtilde.matrix());
  return std::min(1.0, spectral_norm(resid));
}

Matrix orthonormal_complement(const Eigen::Ref<const Matrix>& b) {
  const Index n = b.rows();
  const Index k = b.cols();
  if (k >= n) return Matrix(n, 0);
  Eigen::HouseholderQR<Matrix> qr(b);
  Matrix tail = Matrix::Zero(n, n - k);
  tail.bottomRows(n - k).setIdentity();
  tail.applyOnTheLeft(qr.householderQ());
  return tail;
}

std::uint64_t fingerprint(const Eigen::Ref<const Matrix>& m) {
  std::uint64_t h = splitmix64(static_cast<std::uint64_t>(m.rows()) * 0x100000001B3ull +
                               static_cast<std::uint64_t>(m.cols()));
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      std::uint64_t bits;
      const double v = m(i, j);
      std::memcpy(&bits, &v, sizeof bits);
      h = (h ^ bits) * 0x9E3779B97F4A7C15ull;
      h ^= h >> 29;
    }
  }
  return splitmix64(h);
}

std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (splitmix64(b) + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2)));
}

SpectralSplit::SpectralSplit(SymMatrix a, OrthoBasis v1, Vector lambda1, OrthoBasis v2,
                             Vector lambda2, Check check)
    : a_(std::move(a)),
      v1_(std::move(v1)),
      lambda1_(std::move(lambda1)),
      v2_(std::move(v2)),
      lambda2_(std::move(lambda2)) {
  const Index n = a_.n();
  if (v1_.n() != n || v2_.n() != n || v1_.k() + v2_.k() != n) {
    throw DimensionError("SpectralSplit: basis dimensions do not partition R^n");
  }
  if (v1_.k() < 1 || v2_.k() < 1) throw DimensionError("SpectralSplit: need 1 <= r < n");
  if (lambda1_.size() != v1_.k() || lambda2_.size() != v2_.k()) {
    throw DimensionError("SpectralSplit: eigenvalue counts do not match bases");
  }
  if (!sorted_descending(lambda1_) || !sorted_descending(lambda2_)) {
    throw PreconditionError("SpectralSplit: eigenvalues must be sorted descending");
  }
  if (!(lambda1_.minCoeff() > lambda2_.maxCoeff())) {
    throw DegenerateSplitError("SpectralSplit: lambda_r must exceed lambda_{r+1}");
  }
  const double cross = (v1_.matrix().transpose() * v2_.matrix()).cwiseAbs().maxCoeff();
  if (!(cross <= 1e-12)) {
    std::ostringstream msg;
    msg << "SpectralSplit: V1^T V2 not zero (max entry " << cross << ")";
    throw PreconditionError(msg.str());
  }
  if (check == Check::Full) {
    Matrix recon = v1_.matrix() * lambda1_.asDiagonal() * v1_.matrix().transpose();
    recon.noalias() += v2_.matrix() * lambda2_.asDiagonal() * v2_.matrix().transpose();
    const double err = (recon - a_.dense()).norm();
    if (!(err <= 1e-10 * std::max(norm2(), 1e-300))) {
      std::ostringstream msg;
      msg << "SpectralSplit: reconstruction error " << err << " exceeds 1e-10 ||A||_2";
      throw PreconditionError(msg.str());
    }
  }
  fingerprint_ = spb::fingerprint(a_.dense());
}

double SpectralSplit::norm2() const {
  return std::max(std::abs(lambda1_(0)), std::abs(lambda2_(lambda2_.size() - 1)));
}

SpectralSplit spectral_split(const SymMatrix& a, Index r, double gap_tol) {
  const Index n = a.n();
  if (r < 1 || r >= n) {
    std::ostringstream msg;
    msg << "spectral_split: rank " << r << " outside [1, " << n - 1 << "]";
    throw DimensionError(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.dense());
  if (es.info() != Eigen::Success) throw Error("spectral_split: eigensolver failed");
  const Vector asc = es.eigenvalues();
  const Vector lambda = asc.reverse();
  Matrix vecs = es.eigenvectors().rowwise().reverse();
  fix_signs(vecs);

  const double norm = std::max(std::abs(lambda(0)), std::abs(lambda(n - 1)));
  const double tol = gap_tol < 0.0 ? 1e-10 * norm : gap_tol;
  const double gap = lambda(r - 1) - lambda(r);
  if (!(gap > tol)) {
    std::ostringstream msg;
    msg << "spectral_split: lambda_" << r << " - lambda_" << r + 1 << " = " << gap
        << " is not above tolerance " << tol;
    throw DegenerateSplitError(msg.str());
  }
  return SpectralSplit(a, OrthoBasis::trusted(vecs.leftCols(r)), lambda.head(r),
                       OrthoBasis::trusted(vecs.rightCols(n - r)), lambda.tail(n - r),
                       n <= 512 ? SpectralSplit::Check::Full : SpectralSplit::Check::Cheap);
}

PerturbationBlocks project_blocks(const SymMatrix& e, const SpectralSplit& split) {
  if (e.n() != split.n()) throw DimensionError("project_blocks: dimension mismatch");
  const Matrix& v1 = split.v1().matrix();
  const Matrix& v2 = split.v2().matrix();
  const Matrix ev1 = e.dense() * v1;
  const Matrix ev2 = e.dense() * v2;
  PerturbationBlocks b;
  b.e11 = v1.transpose() * ev1;
  b.e12 = v1.transpose() * ev2;
  b.e21 = v2.transpose() * ev1;
  b.e22 = v2.transpose() * ev2;
  b.e11 = (0.5 * (b.e11 + b.e11.transpose())).eval();
  b.e22 = (0.5 * (b.e22 + b.e22.transpose())).eval();
  return b;
}

ProjectedPerturbation::ProjectedPerturbation(const SpectralSplit& split, const SymMatrix& e,
                                             NormMode mode, const SymNormOptions& norm_opts)
    : e_(&e) {
  if (e.n() != split.n()) throw DimensionError("ProjectedPerturbation: dimension mismatch");
  const Matrix& v1 = split.v1().matrix();
  ev1_ = e.dense() * v1;
  e11_ = v1.transpose() * ev1_;
  e11_ = (0.5 * (e11_ + e11_.transpose())).eval();
  v2e21_ = ev1_ - v1 * e11_;
  e11_norm_ = sym_norm2(e11_);
  e21_norm_ = spectral_norm(v2e21_);
  if (mode == NormMode::Certified) {
    e_norm_ = sym_norm2_enclosure(e.dense(), norm_opts);
  } else {
    e_norm_ = {0.0, std::numeric_limits<double>::infinity()};
  }
  fingerprint_ = hash_combine(split.fingerprint(), spb::fingerprint(e.dense()));
}

Matrix ProjectedPerturbation::p2ep2(const SpectralSplit& split) const {
  const Matrix& v1 = split.v1().matrix();
  Matrix out = e_->dense();
  out.noalias() -= v1 * ev1_.transpose();
  out.noalias() -= v2e21_ * v1.transpose();
  const Index n = out.rows();
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      const double s = 0.5 * (out(i, j) + out(j, i));
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return out;
}

SubspaceError two_inf_subspace_error(const OrthoBasis& v1hat, const OrthoBasis& v1) {
  require_same_shape(v1hat, v1, "two_inf_subspace_error");
  SubspaceError out;
  out.u = procrustes_align(v1hat, v1);
  const Matrix diff = v1hat.matrix() * out.u - v1.matrix();
  out.aligned_error = two_to_inf_norm(diff);
  out.frob_error = diff.norm();
  return out;
}

}  // namespace spb
