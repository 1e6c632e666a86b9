#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spb/linalg.hpp"

namespace spb {

enum class SylvesterBackend {
  Auto,             // Diagonalized for n <= 256, ShiftedCholesky above
  Diagonalized,     // explicit (n-r) x r unknowns, both blocks diagonalized
  ShiftedCholesky,  // ambient n x r unknowns, one Cholesky per eigenvalue of A11
};

struct NewtonOptions {
  double tol = 1e-13;
  int max_iters = 50;
  bool check_certificate = false;
  // When false, v2hat is left empty. Forming it costs O(n^2 (n-r)) memory
  // traffic, which sweeps do not need.
  bool build_complement = true;
  SylvesterBackend backend = SylvesterBackend::Auto;
};

struct NKCertificate {
  double eta = 0.0;
  double delta = 0.0;
  double kappa = 0.0;
  double h = 0.0;
  bool valid = false;
  double sep_lower = 0.0;  // lower bound on sep_2(A11hat, A22hat)
};

struct InclusionReport {
  bool ok = false;
  bool v1_inclusion = false;
  bool v2_inclusion = false;
  bool dominance = false;
  Vector v1_block_eigs;
  double v2_block_max = 0.0;
  double radius = 0.0;
  std::string method;

  explicit operator bool() const { return ok; }
};

struct NewtonResult {
  Matrix xhat;  // (n-r) x r
  Matrix yhat;  // V2 xhat, n x r
  OrthoBasis v1hat;
  OrthoBasis v2hat;  // empty when build_complement is off
  double residual = 0.0;
  double scale = 0.0;
  int iters = 0;
  std::vector<double> residual_history;
  NKCertificate certificate;
  InclusionReport inclusion;
  std::uint64_t input_fingerprint = 0;

  bool has_v2hat() const { return v2hat.k() > 0; }
};

// Solves z a11 - a22 z = f.
Matrix sylvester_solve(const Matrix& a11, const Matrix& a22, const Matrix& f);

// -A21hat + X A11hat - A22hat X + X A12hat X with A11hat = Lambda1 + E11,
// A22hat = Lambda2 + E22 and the off-diagonal blocks taken from E.
Matrix quadratic_residual(const Matrix& x, const PerturbationBlocks& e_blocks,
                          const Vector& lambda1, const Vector& lambda2);

NKCertificate nk_certificate_from_norms(const Vector& lambda1, const Vector& lambda2,
                                        double e11_norm, double e21_norm, double e12_norm,
                                        double e22_norm);
NKCertificate nk_certificate(const SpectralSplit& split, const PerturbationBlocks& blocks);
NKCertificate nk_certificate(const SpectralSplit& split, const ProjectedPerturbation& pert);

NewtonResult newton_subspace(const SymMatrix& a, const SymMatrix& e, Index r,
                             const NewtonOptions& opts = {});
NewtonResult newton_subspace(const SpectralSplit& split, const SymMatrix& e,
                             const NewtonOptions& opts = {});
NewtonResult newton_subspace(const SpectralSplit& split, const ProjectedPerturbation& pert,
                             const NewtonOptions& opts = {});

InclusionReport eigenvalue_inclusion_check(const NewtonResult& result, const SpectralSplit& split,
                                           const PerturbationBlocks& blocks);
InclusionReport eigenvalue_inclusion_check(const NewtonResult& result, const SpectralSplit& split,
                                           const ProjectedPerturbation& pert);

}  // namespace spb
