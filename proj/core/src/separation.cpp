#include "spb/separation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spb/errors.hpp"
#include "spb/rng.hpp"

namespace spb {

const char* to_string(SepKind kind) {
  switch (kind) {
    case SepKind::ExactDiagonal: return "exact-diagonal";
    case SepKind::CertifiedLower: return "certified-lower";
    case SepKind::EmpiricalUpper: return "empirical-upper";
  }
  return "unknown";
}

SepEstimate sep_diag(const Vector& d1, const Vector& d2) {
  if (d1.size() == 0 || d2.size() == 0) throw DimensionError("sep_diag: empty spectrum");
  Index j = 0, i = 0;
  const double lo = d1.minCoeff(&j);
  const double hi = d2.maxCoeff(&i);
  if (lo < hi) {
    std::ostringstream msg;
    msg << "sep_diag: min(d1) = " << lo << " is below max(d2) = " << hi;
    throw PreconditionError(msg.str());
  }
  SepEstimate out;
  out.value = lo - hi;
  out.kind = SepKind::ExactDiagonal;
  Matrix z = Matrix::Zero(d2.size(), d1.size());
  z(i, j) = 1.0;
  out.witness = std::move(z);
  return out;
}

double sep2_perturbed(const Vector& lambda1, const Vector& lambda2, double e11_norm,
                      double e22_norm) {
  const double raw = lambda1.minCoeff() - lambda2.maxCoeff() - e11_norm - e22_norm;
  return std::max(0.0, raw);
}

double complement_inf_norm(const SpectralSplit& split) {
  const Matrix& a = split.a().dense();
  const Matrix& v1 = split.v1().matrix();
  const Matrix v1l = v1 * split.lambda1().asDiagonal();
  const Index n = split.n();
  double best = 0.0;
  Vector col(n);
  // A - V1 L1 V1^T is symmetric, so column sums equal row sums.
  for (Index j = 0; j < n; ++j) {
    col.noalias() = a.col(j) - v1l * v1.row(j).transpose();
    best = std::max(best, col.cwiseAbs().sum());
  }
  return best;
}

SepEstimate sep_2inf_restricted_lower(const SpectralSplit& split) {
  const double sep_f = sep_diag(split.lambda1(), split.lambda2()).value;
  const double frob_branch = sep_f / std::sqrt(static_cast<double>(split.n()));
  const double sigma_min = split.lambda1().cwiseAbs().minCoeff();
  const double norm_branch = std::max(0.0, sigma_min - complement_inf_norm(split));
  SepEstimate out;
  out.value = std::max(frob_branch, norm_branch);
  out.kind = SepKind::CertifiedLower;
  return out;
}

SepEstimate sep_2inf_upper_probe(const SpectralSplit& split, const std::vector<Matrix>& candidates) {
  if (candidates.empty()) throw PreconditionError("sep_2inf_upper_probe: no candidates");
  const Matrix& v1 = split.v1().matrix();
  const Matrix& v2 = split.v2().matrix();
  const Vector& l1 = split.lambda1();
  const Vector& l2 = split.lambda2();

  SepEstimate out;
  out.kind = SepKind::EmpiricalUpper;
  out.value = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const Matrix& z = candidates[c];
    if (z.rows() != split.n() || z.cols() != split.r()) {
      throw DimensionError("sep_2inf_upper_probe: candidate must be n x r");
    }
    const double zscale = std::max(1.0, z.cwiseAbs().maxCoeff());
    const double leak = (v1.transpose() * z).cwiseAbs().maxCoeff();
    if (leak > 1e-10 * zscale) {
      std::ostringstream msg;
      msg << "sep_2inf_upper_probe: candidate " << c << " is outside ran(V2) (|V1^T Z| = " << leak
          << ")";
      throw PreconditionError(msg.str());
    }
    const double denom = two_to_inf_norm(z);
    if (!(denom > 0.0)) throw PreconditionError("sep_2inf_upper_probe: zero candidate");
    const Matrix coeff = l2.asDiagonal() * (v2.transpose() * z);
    const Matrix resid = z * l1.asDiagonal() - v2 * coeff;
    const double ratio = two_to_inf_norm(resid) / denom;
    if (ratio < out.value) {
      out.value = ratio;
      out.witness = z;
    }
  }
  return out;
}

namespace {

double beta_objective(const Matrix& w, const Matrix& x, double wnorm) {
  return two_to_inf_norm(w * x) / wnorm;
}

}  // namespace

BetaEstimate beta_w_estimate(const OrthoBasis& w, int num_starts, int iters, std::uint64_t seed,
                             Index cols) {
  if (w.k() < 1 || cols < 1 || num_starts < 1 || iters < 0) {
    throw PreconditionError("beta_w_estimate: invalid arguments");
  }
  const Matrix& wm = w.matrix();
  const Index k = w.k();
  const double wnorm = two_to_inf_norm(wm);

  BetaEstimate best;
  best.upper_estimate = std::numeric_limits<double>::infinity();
  for (int s = 0; s < num_starts; ++s) {
    SeededRng rng(seed, static_cast<std::uint64_t>(s));
    Matrix x(k, cols);
    for (Index j = 0; j < cols; ++j) {
      for (Index i = 0; i < k; ++i) x(i, j) = rng.normal();
    }
    x /= x.norm();
    double val = beta_objective(wm, x, wnorm);
    double step = 1e-2;
    for (int it = 0; it < iters && step > 1e-12; ++it) {
      const Matrix wx = wm * x;
      const Vector rho = wx.rowwise().norm();
      const double top = rho.maxCoeff();
      if (top == 0.0) break;
      // Soft-max weights concentrate on the rows that attain the maximum.
      const double tau = std::max(1e-3, step) * top;
      Vector weight(rho.size());
      for (Index i = 0; i < rho.size(); ++i) {
        weight(i) = rho(i) > 0.0 ? std::exp((rho(i) - top) / tau) / rho(i) : 0.0;
      }
      Matrix g = wm.transpose() * (weight.asDiagonal() * wx);
      g -= (g.cwiseProduct(x).sum()) * x;
      const double gnorm = g.norm();
      if (gnorm == 0.0) break;
      Matrix trial = x - (step / gnorm) * g;
      trial /= trial.norm();
      const double tv = beta_objective(wm, trial, wnorm);
      if (tv < val) {
        x = std::move(trial);
        val = tv;
      } else {
        step *= 0.5;
      }
    }
    if (val < best.upper_estimate) {
      best.upper_estimate = val;
      best.x = x;
      best.best_start = s;
    }
  }
  return best;
}

GapCertificate gap_certificate(const SpectralSplit& split) {
  GapCertificate g;
  g.sep2 = sep_diag(split.lambda1(), split.lambda2()).value;
  g.sepF = g.sep2;
  const double frob_branch = g.sepF / std::sqrt(static_cast<double>(split.n()));
  const double sigma_min = split.lambda1().cwiseAbs().minCoeff();
  const double norm_branch = std::max(0.0, sigma_min - complement_inf_norm(split));
  g.sep2inf_lower = std::max(frob_branch, norm_branch);
  g.gap_lower = std::min(g.sep2, g.sep2inf_lower);
  if (g.sep2 <= g.sep2inf_lower) {
    g.method = "sep2";
  } else {
    g.method = norm_branch >= frob_branch ? "sigma-min-minus-inf-norm" : "frobenius-over-sqrt-n";
  }
  return g;
}

namespace {

template <typename Mat>
double kron_sep(const Mat& b, const Mat& c) {
  using Scalar = typename Mat::Scalar;
  const Index l = b.rows();
  const Index m = c.rows();
  if (b.cols() != l || c.cols() != m) throw DimensionError("sep_frobenius_kron: blocks must be square");
  if (l == 0 || m == 0) throw DimensionError("sep_frobenius_kron: empty block");
  // vec(Z B - C Z) = (B^T kron I_m - I_l kron C) vec(Z), column-major vec.
  Mat k = Mat::Zero(l * m, l * m);
  for (Index p = 0; p < l; ++p) {
    for (Index q = 0; q < l; ++q) {
      const Scalar bqp = b(q, p);
      if (bqp != Scalar(0)) {
        for (Index i = 0; i < m; ++i) k(p * m + i, q * m + i) += bqp;
      }
    }
    k.block(p * m, p * m, m, m) -= c;
  }
  Eigen::BDCSVD<Mat> svd(k);
  return svd.singularValues()(l * m - 1);
}

}  // namespace

double sep_frobenius_kron(const Matrix& b, const Matrix& c) { return kron_sep(b, c); }

double sep_frobenius_kron(const Eigen::MatrixXcd& b, const Eigen::MatrixXcd& c) {
  return kron_sep(b, c);
}

}  // namespace spb
