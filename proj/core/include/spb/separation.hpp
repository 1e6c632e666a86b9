#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spb/linalg.hpp"

namespace spb {

enum class SepKind { ExactDiagonal, CertifiedLower, EmpiricalUpper };
const char* to_string(SepKind kind);

struct SepEstimate {
  double value = 0.0;
  SepKind kind = SepKind::CertifiedLower;
  std::optional<Matrix> witness;
};

struct GapCertificate {
  double sep2 = 0.0;
  double sepF = 0.0;
  double sep2inf_lower = 0.0;
  double gap_lower = 0.0;
  std::string method;
};

// min(d1) - max(d2), with witness e_i e_j^T (len(d2) x len(d1)).
SepEstimate sep_diag(const Vector& d1, const Vector& d2);

// sep_diag(lambda1, lambda2) - e11_norm - e22_norm, floored at 0.
double sep2_perturbed(const Vector& lambda1, const Vector& lambda2, double e11_norm,
                      double e22_norm);

// ||V2 Lambda2 V2^T||_inf, evaluated as ||A - V1 Lambda1 V1^T||_inf.
double complement_inf_norm(const SpectralSplit& split);

// max(sep_F/sqrt(n), sigma_min(Lambda1) - ||V2 Lambda2 V2^T||_inf).
SepEstimate sep_2inf_restricted_lower(const SpectralSplit& split);

// Smallest ||Z Lambda1 - V2 Lambda2 V2^T Z||_{2,inf} / ||Z||_{2,inf} over the
// candidates, each of which must lie in ran(V2).
SepEstimate sep_2inf_upper_probe(const SpectralSplit& split, const std::vector<Matrix>& candidates);

struct BetaEstimate {
  double upper_estimate = 0.0;
  Matrix x;
  int best_start = 0;
};

// Multi-start projected descent on ||W X||_{2,inf} / ||W||_{2,inf} over
// ||X||_F = 1 with X of size k x cols.
BetaEstimate beta_w_estimate(const OrthoBasis& w, int num_starts = 32, int iters = 500,
                             std::uint64_t seed = 1, Index cols = 1);

GapCertificate gap_certificate(const SpectralSplit& split);

// Smallest singular value of Z -> Z B - C Z, i.e. sep_F(B, C).
double sep_frobenius_kron(const Matrix& b, const Matrix& c);
double sep_frobenius_kron(const Eigen::MatrixXcd& b, const Eigen::MatrixXcd& c);

}  // namespace spb
