#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace spb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Dense real symmetric matrix. Entries are exactly symmetric after
// construction.
class SymMatrix {
 public:
  enum class Policy {
    Reject,      // throw if asymmetry exceeds tol, else mirror the upper triangle
    Symmetrize,  // replace by (M + M^T) / 2
  };

  SymMatrix() = default;
  explicit SymMatrix(Matrix m, Policy policy = Policy::Reject, double tol = 1e-12);

  static SymMatrix zero(Index n);

  const Matrix& dense() const { return m_; }
  Index n() const { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }
  bool empty() const { return m_.size() == 0; }

 private:
  Matrix m_;
};

// n x k matrix with orthonormal columns.
class OrthoBasis {
 public:
  OrthoBasis() = default;
  explicit OrthoBasis(Matrix columns, double tol = 1e-12);

  // Skips the O(nk^2) check. For bases that are orthonormal by construction
  // (Householder products, eigensolver output).
  static OrthoBasis trusted(Matrix columns);

  const Matrix& matrix() const { return q_; }
  Index n() const { return q_.rows(); }
  Index k() const { return q_.cols(); }

 private:
  Matrix q_;
};

double two_to_inf_norm(const Eigen::Ref<const Matrix>& b);
double inf_norm(const Eigen::Ref<const Matrix>& b);
double spectral_norm(const Eigen::Ref<const Matrix>& b);

// Certified enclosure of the spectral norm of a symmetric matrix. For small
// matrices both ends come from a dense eigensolve; otherwise lower is a
// Lanczos Ritz value and upper is verified by Cholesky factorizations of
// upper*I -/+ M.
struct NormEnclosure {
  double lower = 0.0;
  double upper = 0.0;
};

struct SymNormOptions {
  Index dense_limit = 400;
  int lanczos_steps = 48;
  double initial_slack = 1e-2;
};

NormEnclosure sym_norm2_enclosure(const Eigen::Ref<const Matrix>& m,
                                  const SymNormOptions& opts = {});
double sym_norm2(const Eigen::Ref<const Matrix>& m);

// Unitary polar factor of wtilde^T w, the minimizer of ||wtilde U - w||_F.
Matrix procrustes_align(const OrthoBasis& wtilde, const OrthoBasis& w);

// ||W W^T - W~ W~^T||_2.
double sin_theta_distance(const OrthoBasis& w, const OrthoBasis& wtilde);

// Orthonormal basis of ran(b)^perp from a Householder QR of b.
Matrix orthonormal_complement(const Eigen::Ref<const Matrix>& b);

std::uint64_t fingerprint(const Eigen::Ref<const Matrix>& m);
std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b);

class SpectralSplit {
 public:
  enum class Check {
    Full,   // includes the O(n^3) reconstruction test
    Cheap,  // ordering, dimensions and V1^T V2
  };

  SpectralSplit(SymMatrix a, OrthoBasis v1, Vector lambda1, OrthoBasis v2, Vector lambda2,
                Check check = Check::Full);

  const SymMatrix& a() const { return a_; }
  const OrthoBasis& v1() const { return v1_; }
  const OrthoBasis& v2() const { return v2_; }
  const Vector& lambda1() const { return lambda1_; }
  const Vector& lambda2() const { return lambda2_; }
  Index n() const { return a_.n(); }
  Index r() const { return v1_.k(); }
  double norm2() const;
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  SymMatrix a_;
  OrthoBasis v1_;
  Vector lambda1_;
  OrthoBasis v2_;
  Vector lambda2_;
  std::uint64_t fingerprint_ = 0;
};

// gap_tol < 0 selects the default 1e-10 * ||A||_2.
SpectralSplit spectral_split(const SymMatrix& a, Index r, double gap_tol = -1.0);

struct PerturbationBlocks {
  Matrix e11, e12, e21, e22;
};

PerturbationBlocks project_blocks(const SymMatrix& e, const SpectralSplit& split);

// Projections of E against a split that never form V2^T E V2. Holds a
// reference to E, so E must outlive this object.
class ProjectedPerturbation {
 public:
  // Skip leaves e_norm() as [0, inf] for callers that never read it.
  enum class NormMode { Certified, Skip };

  ProjectedPerturbation(const SpectralSplit& split, const SymMatrix& e,
                        NormMode mode = NormMode::Certified, const SymNormOptions& norm_opts = {});
  ProjectedPerturbation(const SpectralSplit&, SymMatrix&&, NormMode = NormMode::Certified,
                        const SymNormOptions& = {}) = delete;

  const SymMatrix& e() const { return *e_; }
  const Matrix& ev1() const { return ev1_; }      // E V1
  const Matrix& e11() const { return e11_; }      // V1^T E V1
  const Matrix& v2e21() const { return v2e21_; }  // V2 E21 = P2 E V1
  double e11_norm() const { return e11_norm_; }
  double e21_norm() const { return e21_norm_; }
  const NormEnclosure& e_norm() const { return e_norm_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  // P2 E P2 = V2 E22 V2^T as a dense n x n matrix.
  Matrix p2ep2(const SpectralSplit& split) const;

 private:
  const SymMatrix* e_;
  Matrix ev1_, e11_, v2e21_;
  double e11_norm_ = 0.0;
  double e21_norm_ = 0.0;
  NormEnclosure e_norm_;
  std::uint64_t fingerprint_ = 0;
};

struct SubspaceError {
  double aligned_error = 0.0;
  double frob_error = 0.0;
  Matrix u;
};

SubspaceError two_inf_subspace_error(const OrthoBasis& v1hat, const OrthoBasis& v1);

}  // namespace spb
