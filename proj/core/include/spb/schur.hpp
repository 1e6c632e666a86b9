#pragma once

#include <string>

#include <Eigen/Dense>

#include "spb/bounds.hpp"
#include "spb/linalg.hpp"

namespace spb {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

enum class EigSelector {
  LargestReal,       // r eigenvalues with the largest real part
  LargestMagnitude,  // r eigenvalues of largest modulus
};

// Ordered complex Schur form A = [U1 U2] [[T11, T12], [0, T22]] [U1 U2]^*.
struct SchurSplit {
  Matrix a;
  CMatrix u1, u2;
  CMatrix t11, t12, t22;
  Index n() const { return a.rows(); }
  Index r() const { return u1.cols(); }
};

SchurSplit schur_split(const Matrix& a, Index r, EigSelector selector = EigSelector::LargestReal,
                       double sep_tol = -1.0);

// Moves the diagonal entries flagged in `select` to the top of the
// triangular factor t, updating the unitary factor u with adjacent swaps.
void reorder_schur(CMatrix& t, CMatrix& u, const std::vector<bool>& select);

struct SchurGap {
  double sep2_lower = 0.0;
  double sepF = 0.0;
  double sep2inf_lower = 0.0;
  double gap = 0.0;
  std::string method;  // "exact-diagonal", "kronecker" or "unavailable"
};

// sep_2 is exact for real ordered diagonal blocks and sep_F / sqrt(min(r, n-r))
// otherwise, with sep_F from the Kronecker operator when both blocks have at
// most 64 rows.
SchurGap schur_gap(const SchurSplit& s);

struct SchurBound {
  bool applicable = false;
  bool e_small = false;    // ||E||_2 <= gap / 10
  bool t12_small = false;  // ||T12||_2 <= gap / 10
  BoundReport report;      // term_quadratic uses ||E21||_2
  double term_quadratic_full_norm = 0.0;  // same term with ||E||_2 in place of ||E21||_2
  double e_norm = 0.0;
  double t12_norm = 0.0;
  SchurGap gap;
  std::string reason;
  // Q in the aligned error ranges over unitary matrices.
  std::string alignment = "unitary-procrustes";
};

SchurBound schur_bound(const SchurSplit& s, const Matrix& e);

struct SchurNewtonResult {
  CMatrix x;      // (n-r) x r in U2 coordinates
  CMatrix u1hat;  // orthonormal basis of ran(U1 + U2 X)
  double residual = 0.0;
  double scale = 0.0;
  int iters = 0;
};

// Frozen-Jacobian Newton for X Ahat11 - Ahat22 X = Ahat21 - X Ahat12 X.
SchurNewtonResult schur_newton(const SchurSplit& s, const Matrix& e, double tol = 1e-13,
                               int max_iters = 100);

// min over unitary Q of ||U1hat Q - U1||_{2,inf}.
double unitary_aligned_error(const CMatrix& u1hat, const CMatrix& u1);

// Dominant invariant subspace of A + E from a reordered Schur form selecting
// the r eigenvalues nearest eig(T11).
CMatrix schur_invariant_basis(const SchurSplit& s, const Matrix& e);

double two_to_inf_norm_c(const CMatrix& m);
double spectral_norm_c(const CMatrix& m);

}  // namespace spb
