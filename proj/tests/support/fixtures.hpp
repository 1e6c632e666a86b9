#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

// Instance builders and reference computations for the nonnormal suite.
namespace fixture {

using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;

// A = Q T Q^T with T real upper triangular: the top r diagonal entries in
// [4, 5], the rest in [-1, 1], and T12 scaled to t12_norm in the 2-norm.
struct Nonnormal {
  Matrix a;
  Matrix t;
  Matrix q;
};
Nonnormal nonnormal_instance(Eigen::Index n, Eigen::Index r, double t12_norm, std::uint64_t seed);

// Nonsymmetric perturbation with 2-norm `norm`; upper triangular in the
// standard basis when `triangular` is set.
Matrix nonsymmetric_perturbation(Eigen::Index n, double norm, bool triangular, std::uint64_t seed);

// Orthonormal basis for the eigenvectors of m whose eigenvalues lie nearest
// to `targets`, from a dense nonsymmetric eigensolver.
CMatrix eigvec_basis(const Matrix& m, const Eigen::VectorXcd& targets);

// ||uhat Q - u1||_{2,inf} at the unitary polar factor Q of uhat^* u1.
double procrustes_error_c(const CMatrix& uhat, const CMatrix& u1);

}  // namespace fixture
