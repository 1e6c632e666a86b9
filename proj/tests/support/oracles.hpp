#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

// Test-side reference computations. These deliberately avoid the library's
// code paths (no calls into spb for the quantity being checked).
namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Gaussian matrix from a plain Box-Muller over a 64-bit LCG.
Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);
Matrix random_symmetric(Eigen::Index n, std::uint64_t seed);
Matrix random_orthonormal(Eigen::Index n, Eigen::Index k, std::uint64_t seed);

double row_norm_max(const Matrix& b);
double max_abs_row_sum(const Matrix& b);
double largest_singular_value(const Matrix& b);

// U = M (M^T M)^{-1/2} for M = wtilde^T w.
Matrix polar_factor(const Matrix& wtilde, const Matrix& w);

// Top-k eigenvectors of a symmetric matrix from a cyclic Jacobi sweep.
struct Eig {
  Vector values;   // descending
  Matrix vectors;  // matching columns
};
Eig jacobi_eigen(Matrix a);

// ||P - Ptilde||_2 for the two orthogonal projectors.
double projector_distance(const Matrix& w, const Matrix& wtilde);

// Smallest singular value of Z -> Z b - c Z assembled column by column from
// images of the unit basis.
double sep_frobenius_bruteforce(const Matrix& b, const Matrix& c);

// Quantile by explicit order-statistic formula.
double quantile_type7(std::vector<double> v, double p);

}  // namespace oracle
