#include "spb/newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "spb/errors.hpp"
#include "spb/separation.hpp"

namespace spb {

namespace {

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Divides f (in the eigenbases) by theta_j - mu_i.
class DiagonalSylvester {
 public:
  DiagonalSylvester(const Matrix& a11, const Matrix& a22) {
    Eigen::SelfAdjointEigenSolver<Matrix> e1(symmetrized(a11));
    Eigen::SelfAdjointEigenSolver<Matrix> e2(symmetrized(a22));
    if (e1.info() != Eigen::Success || e2.info() != Eigen::Success) {
      throw Error("sylvester_solve: eigensolver failed");
    }
    q1_ = e1.eigenvectors();
    q2_ = e2.eigenvectors();
    theta_ = e1.eigenvalues();
    mu_ = e2.eigenvalues();
    const double scale = std::max({theta_.cwiseAbs().maxCoeff(), mu_.cwiseAbs().maxCoeff(),
                                   std::numeric_limits<double>::min()});
    for (Index j = 0; j < theta_.size(); ++j) {
      for (Index i = 0; i < mu_.size(); ++i) {
        if (std::abs(theta_(j) - mu_(i)) < 1e-14 * scale) {
          std::ostringstream msg;
          msg << "sylvester_solve: eigenvalue collision " << theta_(j) << " vs " << mu_(i);
          throw SingularOperatorError(msg.str());
        }
      }
    }
  }

  Matrix solve(const Matrix& f) const {
    Matrix g = q2_.transpose() * f * q1_;
    for (Index j = 0; j < g.cols(); ++j) {
      for (Index i = 0; i < g.rows(); ++i) g(i, j) /= theta_(j) - mu_(i);
    }
    return q2_ * g * q1_.transpose();
  }

 private:
  Matrix q1_, q2_;
  Vector theta_, mu_;
};

// Unknown X in explicit (n-r) x r coordinates.
class ExplicitModel {
 public:
  ExplicitModel(const SpectralSplit& split, const PerturbationBlocks& b)
      : a11_(split.lambda1().asDiagonal()),
        a22_(split.lambda2().asDiagonal()),
        a12_(b.e12),
        a21_(b.e21) {
    a11_ += b.e11;
    a22_ += b.e22;
    solver_ = std::make_unique<DiagonalSylvester>(a11_, a22_);
  }

  Matrix zero() const { return Matrix::Zero(a22_.rows(), a11_.rows()); }
  Matrix residual(const Matrix& x) const { return -a21_ + x * a11_ - a22_ * x + x * (a12_ * x); }
  Matrix solve(const Matrix& f) const { return solver_->solve(f); }
  void project(Matrix&) const {}

 private:
  Matrix a11_, a22_, a12_, a21_;
  std::unique_ptr<DiagonalSylvester> solver_;
};

// Unknown Y = V2 X in ambient n x r coordinates. The Sylvester operator is
// applied column-wise in the eigenbasis of A11hat:
//   (theta_k P2 - P2 Ahat P2 + P1) z_k = g_k,
// which is positive definite on ran(V2) whenever theta_k exceeds the spectrum
// of A22hat.
class AmbientModel {
 public:
  AmbientModel(const SpectralSplit& split, const ProjectedPerturbation& pert)
      : a_(split.a().dense()), e_(pert.e().dense()), v1_(split.v1().matrix()) {
    const Index r = split.r();
    r0_ = pert.v2e21();
    a11_ = Matrix(split.lambda1().asDiagonal()) + pert.e11();
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(a11_));
    q_ = es.eigenvectors();
    theta_ = es.eigenvalues();

    // B = P2 Ahat P2 = (A - V1 L1 V1^T) + P2 E P2.
    Matrix b = a_ + e_;
    b.noalias() -= (v1_ * split.lambda1().asDiagonal()) * v1_.transpose();
    b.noalias() -= v1_ * pert.ev1().transpose();
    b.noalias() -= pert.v2e21() * v1_.transpose();
    const Matrix p1 = v1_ * v1_.transpose();

    factors_.resize(r);
    lu_.resize(r);
    cholesky_.assign(r, false);
    auto shifted = [&](Index k) {
      Matrix m = -b;
      m.diagonal().array() += theta_(k);
      m.noalias() += (1.0 - theta_(k)) * p1;
      return m;
    };
    for (Index k = 0; k < r; ++k) {
      Matrix m = shifted(k);
      Eigen::LLT<Eigen::Ref<Matrix>> llt(m);
      if (llt.info() == Eigen::Success) {
        factors_[k] = std::move(m);
        cholesky_[k] = true;
      } else {
        lu_[k] = std::make_unique<Eigen::PartialPivLU<Matrix>>(shifted(k));
      }
    }
  }

  Matrix zero() const { return Matrix::Zero(a_.rows(), a11_.rows()); }

  Matrix residual(const Matrix& y) const {
    Matrix ay = a_ * y;
    ay.noalias() += e_ * y;
    const Matrix c = v1_.transpose() * ay;  // V1^T Ahat Y
    Matrix g = -r0_;
    g.noalias() += y * a11_;
    g -= ay;
    g.noalias() += v1_ * c;
    g.noalias() += y * c;
    project(g);
    return g;
  }

  Matrix solve(const Matrix& g) const {
    Matrix z = g * q_;
    for (Index k = 0; k < z.cols(); ++k) {
      if (cholesky_[k]) {
        const auto& l = factors_[k];
        auto col = z.col(k);
        l.triangularView<Eigen::Lower>().solveInPlace(col);
        l.triangularView<Eigen::Lower>().adjoint().solveInPlace(col);
      } else {
        z.col(k) = lu_[k]->solve(Vector(z.col(k)));
      }
    }
    project(z);
    return z * q_.transpose();
  }

  void project(Matrix& y) const { y.noalias() -= v1_ * (v1_.transpose() * y); }

 private:
  const Matrix& a_;
  const Matrix& e_;
  const Matrix& v1_;
  Matrix r0_, a11_, q_;
  Vector theta_;
  std::vector<Matrix> factors_;
  std::vector<std::unique_ptr<Eigen::PartialPivLU<Matrix>>> lu_;
  std::vector<bool> cholesky_;
};

template <typename Model>
Matrix iterate(const Model& model, const NewtonOptions& opts, double scale, NewtonResult& out) {
  Matrix x = model.zero();
  for (int t = 0;; ++t) {
    const Matrix f = model.residual(x);
    const double res = f.norm();
    out.residual_history.push_back(res);
    if (!std::isfinite(res)) {
      throw IterationError("newton_subspace: residual is not finite", res, t);
    }
    if (res <= opts.tol * scale) {
      out.residual = res;
      out.iters = t;
      return x;
    }
    if (t >= opts.max_iters) {
      std::ostringstream msg;
      msg << "newton_subspace: no convergence after " << t << " iterations (residual " << res
          << ", target " << opts.tol * scale << ")";
      throw IterationError(msg.str(), res, t);
    }
    x -= model.solve(f);
    model.project(x);
  }
}

// (I + M)^{-1/2} for symmetric positive semidefinite M.
Matrix inv_sqrt_shifted(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(m));
  const Vector d = (1.0 + es.eigenvalues().array().max(0.0)).rsqrt();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

void build_bases(const SpectralSplit& split, const NewtonOptions& opts, NewtonResult& out) {
  const Matrix& v1 = split.v1().matrix();
  const Matrix& v2 = split.v2().matrix();
  const Matrix s = inv_sqrt_shifted(out.yhat.transpose() * out.yhat);
  out.v1hat = OrthoBasis::trusted((v1 + out.yhat) * s);
  if (!opts.build_complement) return;
  // (I + X X^T)^{-1/2} = I + U ((1 + S^2)^{-1/2} - 1) U^T from the thin SVD of X.
  Eigen::JacobiSVD<Matrix> svd(out.xhat, Eigen::ComputeThinU);
  const Vector sig = svd.singularValues();
  const Vector d = (1.0 + sig.array().square()).rsqrt() - 1.0;
  Matrix c = v2;
  c.noalias() -= v1 * out.xhat.transpose();
  const Matrix cu = c * svd.matrixU();
  c.noalias() += cu * d.asDiagonal() * svd.matrixU().transpose();
  out.v2hat = OrthoBasis::trusted(std::move(c));
}

SylvesterBackend resolve(SylvesterBackend b, Index n) {
  if (b != SylvesterBackend::Auto) return b;
  return n <= 256 ? SylvesterBackend::Diagonalized : SylvesterBackend::ShiftedCholesky;
}

bool within(const Vector& targets, double value, double radius) {
  for (Index j = 0; j < targets.size(); ++j) {
    if (std::abs(value - targets(j)) <= radius) return true;
  }
  return false;
}

}  // namespace

Matrix sylvester_solve(const Matrix& a11, const Matrix& a22, const Matrix& f) {
  if (a11.rows() != a11.cols() || a22.rows() != a22.cols() || f.rows() != a22.rows() ||
      f.cols() != a11.rows()) {
    throw DimensionError("sylvester_solve: inconsistent block sizes");
  }
  return DiagonalSylvester(a11, a22).solve(f);
}

Matrix quadratic_residual(const Matrix& x, const PerturbationBlocks& b, const Vector& lambda1,
                          const Vector& lambda2) {
  const Index r = lambda1.size();
  const Index m = lambda2.size();
  if (x.rows() != m || x.cols() != r || b.e11.rows() != r || b.e22.rows() != m) {
    throw DimensionError("quadratic_residual: inconsistent dimensions");
  }
  const Matrix a11 = Matrix(lambda1.asDiagonal()) + b.e11;
  const Matrix a22 = Matrix(lambda2.asDiagonal()) + b.e22;
  return -b.e21 + x * a11 - a22 * x + x * (b.e12 * x);
}

NKCertificate nk_certificate_from_norms(const Vector& lambda1, const Vector& lambda2,
                                        double e11_norm, double e21_norm, double e12_norm,
                                        double e22_norm) {
  NKCertificate c;
  c.sep_lower = sep2_perturbed(lambda1, lambda2, e11_norm, e22_norm);
  c.delta = 0.0;
  if (!(c.sep_lower > 0.0)) {
    c.eta = std::numeric_limits<double>::infinity();
    c.kappa = std::numeric_limits<double>::infinity();
    c.h = std::numeric_limits<double>::infinity();
    c.valid = false;
    return c;
  }
  c.eta = e21_norm / c.sep_lower;
  c.kappa = e12_norm / c.sep_lower;
  c.h = c.eta * c.kappa / ((1.0 - c.delta) * (1.0 - c.delta));
  c.valid = c.delta < 1.0 && c.h < 0.5;
  return c;
}

NKCertificate nk_certificate(const SpectralSplit& split, const PerturbationBlocks& b) {
  return nk_certificate_from_norms(split.lambda1(), split.lambda2(), sym_norm2(b.e11),
                                   spectral_norm(b.e21), spectral_norm(b.e12), sym_norm2(b.e22));
}

NKCertificate nk_certificate(const SpectralSplit& split, const ProjectedPerturbation& pert) {
  // ||E22||_2 <= ||E||_2; the ambient path never forms E22.
  return nk_certificate_from_norms(split.lambda1(), split.lambda2(), pert.e11_norm(),
                                   pert.e21_norm(), pert.e21_norm(), pert.e_norm().upper);
}

NewtonResult newton_subspace(const SymMatrix& a, const SymMatrix& e, Index r,
                             const NewtonOptions& opts) {
  const SpectralSplit split = spectral_split(a, r);
  return newton_subspace(split, e, opts);
}

NewtonResult newton_subspace(const SpectralSplit& split, const SymMatrix& e,
                             const NewtonOptions& opts) {
  const ProjectedPerturbation pert(split, e);
  return newton_subspace(split, pert, opts);
}

NewtonResult newton_subspace(const SpectralSplit& split, const ProjectedPerturbation& pert,
                             const NewtonOptions& opts) {
  if (pert.e().n() != split.n()) throw DimensionError("newton_subspace: dimension mismatch");
  if (!(opts.tol > 0.0) || opts.max_iters < 1) {
    throw PreconditionError("newton_subspace: need tol > 0 and max_iters >= 1");
  }
  NewtonResult out;
  out.input_fingerprint = pert.fingerprint();
  out.scale = split.norm2() + pert.e_norm().upper;
  const SylvesterBackend backend = resolve(opts.backend, split.n());

  PerturbationBlocks blocks;
  if (backend == SylvesterBackend::Diagonalized) {
    blocks = project_blocks(pert.e(), split);
    out.certificate = nk_certificate(split, blocks);
  } else {
    out.certificate = nk_certificate(split, pert);
  }
  if (opts.check_certificate && !out.certificate.valid) {
    std::ostringstream msg;
    msg << "newton_subspace: Newton-Kantorovich certificate invalid (h = " << out.certificate.h
        << ", sep lower bound = " << out.certificate.sep_lower << ")";
    throw CertificateError(msg.str());
  }

  if (backend == SylvesterBackend::Diagonalized) {
    const ExplicitModel model(split, blocks);
    out.xhat = iterate(model, opts, out.scale, out);
    out.yhat = split.v2().matrix() * out.xhat;
  } else {
    const AmbientModel model(split, pert);
    out.yhat = iterate(model, opts, out.scale, out);
    out.xhat = split.v2().matrix().transpose() * out.yhat;
  }
  build_bases(split, opts, out);
  out.inclusion = eigenvalue_inclusion_check(out, split, pert);
  return out;
}

InclusionReport eigenvalue_inclusion_check(const NewtonResult& result, const SpectralSplit& split,
                                           const PerturbationBlocks& blocks) {
  const Matrix& v1 = split.v1().matrix();
  const Matrix& v2 = split.v2().matrix();
  Matrix e = v1 * blocks.e11 * v1.transpose();
  e.noalias() += v1 * blocks.e12 * v2.transpose();
  e.noalias() += v2 * blocks.e21 * v1.transpose();
  e.noalias() += v2 * blocks.e22 * v2.transpose();
  const SymMatrix es(std::move(e), SymMatrix::Policy::Symmetrize);
  const ProjectedPerturbation pert(split, es);
  return eigenvalue_inclusion_check(result, split, pert);
}

InclusionReport eigenvalue_inclusion_check(const NewtonResult& result, const SpectralSplit& split,
                                           const ProjectedPerturbation& pert) {
  InclusionReport rep;
  const Matrix& a = split.a().dense();
  const Matrix& e = pert.e().dense();
  const Matrix& v1hat = result.v1hat.matrix();
  if (v1hat.rows() != split.n() || v1hat.cols() != split.r()) {
    throw DimensionError("eigenvalue_inclusion_check: result does not match split");
  }
  const double e_norm = pert.e_norm().upper;
  rep.radius = 2.0 * e_norm;
  const double slack = 1e-12 * std::max(1.0, split.norm2() + e_norm);

  Matrix av = a * v1hat;
  av.noalias() += e * v1hat;
  const Matrix h1 = symmetrized(v1hat.transpose() * av);
  Eigen::SelfAdjointEigenSolver<Matrix> es1(h1, Eigen::EigenvaluesOnly);
  rep.v1_block_eigs = es1.eigenvalues().reverse();
  rep.v1_inclusion = true;
  for (Index i = 0; i < rep.v1_block_eigs.size(); ++i) {
    rep.v1_inclusion &= within(split.lambda1(), rep.v1_block_eigs(i), rep.radius + slack);
  }

  const Index m = split.n() - split.r();
  if (result.has_v2hat() && m <= 400) {
    const Matrix& v2hat = result.v2hat.matrix();
    Matrix aw = a * v2hat;
    aw.noalias() += e * v2hat;
    const Matrix h2 = symmetrized(v2hat.transpose() * aw);
    Eigen::SelfAdjointEigenSolver<Matrix> es2(h2, Eigen::EigenvaluesOnly);
    rep.v2_inclusion = true;
    for (Index i = 0; i < es2.eigenvalues().size(); ++i) {
      rep.v2_inclusion &= within(split.lambda2(), es2.eigenvalues()(i), rep.radius + slack);
    }
    rep.v2_block_max = es2.eigenvalues().maxCoeff();
    rep.method = "dense";
  } else {
    // V2hat^T Ahat V2hat is similar to A22hat - X E12 with A22hat symmetric,
    // so its eigenvalues lie within ||E22|| + ||X|| ||E12|| of Lambda2.
    const double x_norm = spectral_norm(result.xhat);
    const double bf = e_norm + x_norm * pert.e21_norm();
    rep.v2_inclusion = bf <= rep.radius + slack;
    rep.v2_block_max = split.lambda2().maxCoeff() + bf;
    rep.method = "perturbation-bound";
  }
  rep.dominance = rep.v1_block_eigs.minCoeff() > rep.v2_block_max;
  rep.ok = rep.v1_inclusion && rep.v2_inclusion && rep.dominance;
  return rep;
}

}  // namespace spb
