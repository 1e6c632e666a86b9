#include "spb/schur.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>

#include "spb/errors.hpp"
#include "spb/separation.hpp"

namespace spb {

namespace {

using cd = std::complex<double>;

constexpr Index kKronLimit = 64;

double maxabs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

std::vector<bool> choose(const CVector& d, Index r, EigSelector sel) {
  std::vector<Index> idx(static_cast<std::size_t>(d.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  auto key = [&](Index i) { return sel == EigSelector::LargestReal ? d(i).real() : std::abs(d(i)); };
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return key(a) > key(b); });
  std::vector<bool> pick(static_cast<std::size_t>(d.size()), false);
  for (Index k = 0; k < r; ++k) pick[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] = true;
  return pick;
}

// Swaps diagonal entries k and k+1 of the triangular t.
void swap_adjacent(CMatrix& t, CMatrix& u, Index k) {
  const cd a = t(k, k);
  const cd b = t(k, k + 1);
  const cd c = t(k + 1, k + 1);
  // Eigenvector of [[a, b], [0, c]] for c.
  cd x1 = b;
  cd x2 = c - a;
  const double nx = std::hypot(std::abs(x1), std::abs(x2));
  if (nx == 0.0) return;  // equal diagonal and zero coupling: already swapped
  x1 /= nx;
  x2 /= nx;
  Eigen::Matrix2cd g;
  g << x1, -std::conj(x2), x2, std::conj(x1);
  t.middleCols(k, 2) = t.middleCols(k, 2) * g;
  t.middleRows(k, 2) = g.adjoint() * t.middleRows(k, 2);
  u.middleCols(k, 2) = u.middleCols(k, 2) * g;
  t(k + 1, k) = 0.0;
  t(k, k) = c;
  t(k + 1, k + 1) = a;
}

bool diagonal_real_ordered(const SchurSplit& s, double tol, double& sep) {
  auto offdiag = [](const CMatrix& m) {
    double v = 0.0;
    for (Index j = 0; j < m.cols(); ++j)
      for (Index i = 0; i < m.rows(); ++i)
        if (i != j) v = std::max(v, std::abs(m(i, j)));
    return v;
  };
  if (maxabs(s.t12) > tol || offdiag(s.t11) > tol || offdiag(s.t22) > tol) return false;
  const CVector d1 = s.t11.diagonal();
  const CVector d2 = s.t22.diagonal();
  if (d1.imag().cwiseAbs().maxCoeff() > tol) return false;
  if (d2.size() && d2.imag().cwiseAbs().maxCoeff() > tol) return false;
  const double lo = d1.real().minCoeff();
  const double hi = d2.size() ? d2.real().maxCoeff() : -std::numeric_limits<double>::infinity();
  if (!(lo > hi)) return false;
  sep = lo - hi;
  return true;
}

// Solves Z S - R Z = F for upper triangular S (r x r) and R (m x m).
CMatrix triangular_sylvester(const CMatrix& s, const CMatrix& r, const CMatrix& f) {
  const Index m = r.rows();
  CMatrix z(m, s.rows());
  for (Index j = 0; j < s.rows(); ++j) {
    CVector rhs = f.col(j);
    for (Index k = 0; k < j; ++k) rhs -= z.col(k) * s(k, j);
    CMatrix lhs = -r;
    lhs.diagonal().array() += s(j, j);
    const double floor = 1e-14 * std::max(1.0, std::max(maxabs(r), std::abs(s(j, j))));
    if (lhs.diagonal().cwiseAbs().minCoeff() <= floor) {
      throw SingularOperatorError("schur_newton: Sylvester operator is numerically singular");
    }
    z.col(j) = lhs.triangularView<Eigen::Upper>().solve(rhs);
  }
  return z;
}

}  // namespace

double two_to_inf_norm_c(const CMatrix& m) {
  return m.size() ? m.rowwise().norm().maxCoeff() : 0.0;
}

double spectral_norm_c(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

void reorder_schur(CMatrix& t, CMatrix& u, const std::vector<bool>& select) {
  std::vector<bool> flags = select;
  Index target = 0;
  for (Index j = 0; j < static_cast<Index>(flags.size()); ++j) {
    if (!flags[static_cast<std::size_t>(j)]) continue;
    for (Index k = j - 1; k >= target; --k) {
      swap_adjacent(t, u, k);
      std::swap(flags[static_cast<std::size_t>(k)], flags[static_cast<std::size_t>(k + 1)]);
    }
    ++target;
  }
}

SchurSplit schur_split(const Matrix& a, Index r, EigSelector selector, double sep_tol) {
  if (a.rows() != a.cols() || a.rows() == 0) throw DimensionError("schur_split: A must be square and nonempty");
  const Index n = a.rows();
  if (r < 1 || r >= n) throw DimensionError("schur_split: need 1 <= r < n");
  Eigen::ComplexSchur<CMatrix> cs(a.cast<cd>());
  if (cs.info() != Eigen::Success) throw Error("schur_split: Schur iteration failed");
  CMatrix t = cs.matrixT();
  CMatrix u = cs.matrixU();
  t.triangularView<Eigen::StrictlyLower>().setZero();
  reorder_schur(t, u, choose(t.diagonal(), r, selector));

  SchurSplit s;
  s.a = a;
  s.u1 = u.leftCols(r);
  s.u2 = u.rightCols(n - r);
  s.t11 = t.topLeftCorner(r, r);
  s.t12 = t.topRightCorner(r, n - r);
  s.t22 = t.bottomRightCorner(n - r, n - r);

  const double anorm = spectral_norm(a);
  const double tol = sep_tol >= 0.0 ? sep_tol : 1e-10 * std::max(1.0, anorm);
  double dist = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < n - r; ++j) dist = std::min(dist, std::abs(s.t11(i, i) - s.t22(j, j)));
  if (!(dist > tol)) {
    std::ostringstream msg;
    msg << "schur_split: selected cluster is within " << dist << " of the rest of the spectrum";
    throw DegenerateSplitError(msg.str());
  }
  return s;
}

SchurGap schur_gap(const SchurSplit& s) {
  SchurGap g;
  const Index n = s.n();
  const Index r = s.r();
  const double tol = 1e-12 * std::max(1.0, maxabs(s.t11) + maxabs(s.t22));
  double exact = 0.0;
  if (diagonal_real_ordered(s, tol, exact)) {
    g.sep2_lower = exact;
    g.sepF = exact;
    g.method = "exact-diagonal";
  } else if (r <= kKronLimit && n - r <= kKronLimit) {
    g.sepF = sep_frobenius_kron(s.t11, s.t22);
    g.sep2_lower = g.sepF / std::sqrt(static_cast<double>(std::min(r, n - r)));
    g.method = "kronecker";
  } else {
    g.method = "unavailable";
    return g;
  }
  const CMatrix c = s.u2 * s.t22 * s.u2.adjoint();
  double c_inf = 0.0;
  for (Index i = 0; i < n; ++i) c_inf = std::max(c_inf, c.row(i).cwiseAbs().sum());
  Eigen::JacobiSVD<CMatrix> svd(s.t11);
  const double sigma_min = svd.singularValues()(r - 1);
  g.sep2inf_lower = std::max(g.sepF / std::sqrt(static_cast<double>(n)), std::max(0.0, sigma_min - c_inf));
  g.gap = std::min(g.sep2_lower, g.sep2inf_lower);
  return g;
}

SchurBound schur_bound(const SchurSplit& s, const Matrix& e) {
  if (e.rows() != s.n() || e.cols() != s.n()) throw DimensionError("schur_bound: E has the wrong size");
  SchurBound out;
  out.gap = schur_gap(s);
  const double gap = out.gap.gap;
  const double sep = out.gap.sep2_lower;
  out.e_norm = spectral_norm(e);
  out.t12_norm = spectral_norm_c(s.t12);
  out.e_small = gap > 0.0 && out.e_norm <= gap / 10.0;
  out.t12_small = gap > 0.0 && out.t12_norm <= gap / 10.0;
  out.applicable = out.e_small && out.t12_small;
  if (out.gap.method == "unavailable") {
    out.reason = "blocks too large for the Kronecker separation estimate";
  } else if (!out.e_small) {
    out.reason = "||E||_2 exceeds gap/10";
  } else if (!out.t12_small) {
    out.reason = "||T12||_2 exceeds gap/10";
  }

  BoundReport& rep = out.report;
  rep.gap_used = gap;
  rep.sep2 = sep;
  rep.sep2inf_lower = out.gap.sep2inf_lower;
  rep.gap_method = out.gap.method;
  rep.e_norm_upper = out.e_norm;
  rep.assumptions_ok = out.applicable;
  if (!(gap > 0.0) || !(sep > 0.0)) return out;

  const CMatrix ec = e.cast<cd>();
  const CMatrix eu1 = ec * s.u1;
  const CMatrix e21 = s.u2.adjoint() * eu1;
  const CMatrix p2eu1 = s.u2 * e21;
  const CMatrix p2ep2 = s.u2 * (s.u2.adjoint() * ec * s.u2) * s.u2.adjoint();
  const double e21n = spectral_norm_c(e21);
  const double u1n = two_to_inf_norm_c(s.u1);
  rep.e21_norm = e21n;
  rep.term_quadratic = 8.0 * u1n * (e21n / sep) * (e21n / sep);
  rep.term_cross = 2.0 * two_to_inf_norm_c(p2eu1) / gap;
  rep.term_submult = 4.0 * two_to_inf_norm_c(p2ep2) * e21n / (gap * sep);
  rep.total = rep.term_quadratic + rep.term_cross + rep.term_submult;
  rep.dk_reference = 2.0 * e21n / sep;
  out.term_quadratic_full_norm = 8.0 * u1n * (out.e_norm / sep) * (out.e_norm / sep);
  return out;
}

SchurNewtonResult schur_newton(const SchurSplit& s, const Matrix& e, double tol, int max_iters) {
  if (e.rows() != s.n() || e.cols() != s.n()) throw DimensionError("schur_newton: E has the wrong size");
  const CMatrix ec = e.cast<cd>();
  const CMatrix a11 = s.t11 + s.u1.adjoint() * ec * s.u1;
  const CMatrix a12 = s.t12 + s.u1.adjoint() * ec * s.u2;
  const CMatrix a21 = s.u2.adjoint() * ec * s.u1;
  const CMatrix a22 = s.t22 + s.u2.adjoint() * ec * s.u2;

  Eigen::ComplexSchur<CMatrix> s11(a11), s22(a22);
  const CMatrix& q1 = s11.matrixU();
  const CMatrix& q2 = s22.matrixU();
  CMatrix tt1 = s11.matrixT();
  CMatrix tt2 = s22.matrixT();
  tt1.triangularView<Eigen::StrictlyLower>().setZero();
  tt2.triangularView<Eigen::StrictlyLower>().setZero();
  // Z a11 - a22 Z = F  <=>  W T1 - T2 W = q2^* F q1 with Z = q2 W q1^*.
  auto solve = [&](const CMatrix& f) {
    return CMatrix(q2 * triangular_sylvester(tt1, tt2, q2.adjoint() * f * q1) * q1.adjoint());
  };

  SchurNewtonResult out;
  out.scale = spectral_norm(s.a) + spectral_norm(e);
  auto residual = [&](const CMatrix& x) {
    return CMatrix(a21 + a22 * x - x * a11 - x * a12 * x);
  };
  CMatrix x = CMatrix::Zero(s.n() - s.r(), s.r());
  out.residual = maxabs(a21) == 0.0 ? 0.0 : spectral_norm_c(residual(x));
  while (out.residual > tol * out.scale) {
    if (out.iters >= max_iters || !std::isfinite(out.residual)) {
      throw IterationError("schur_newton: no convergence", out.residual, out.iters);
    }
    x = solve(a21 - x * a12 * x);
    ++out.iters;
    out.residual = spectral_norm_c(residual(x));
  }
  out.x = x;
  const CMatrix basis = s.u1 + s.u2 * x;
  Eigen::HouseholderQR<CMatrix> qr(basis);
  out.u1hat = qr.householderQ() * CMatrix::Identity(s.n(), s.r());
  return out;
}

double unitary_aligned_error(const CMatrix& u1hat, const CMatrix& u1) {
  if (u1hat.rows() != u1.rows() || u1hat.cols() != u1.cols()) {
    throw DimensionError("unitary_aligned_error: shapes differ");
  }
  Eigen::JacobiSVD<CMatrix> svd(u1hat.adjoint() * u1, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const CMatrix q = svd.matrixU() * svd.matrixV().adjoint();
  return two_to_inf_norm_c(u1hat * q - u1);
}

CMatrix schur_invariant_basis(const SchurSplit& s, const Matrix& e) {
  const Index n = s.n();
  const Index r = s.r();
  Eigen::ComplexSchur<CMatrix> cs((s.a + e).cast<cd>());
  if (cs.info() != Eigen::Success) throw Error("schur_invariant_basis: Schur iteration failed");
  CMatrix t = cs.matrixT();
  CMatrix u = cs.matrixU();
  t.triangularView<Eigen::StrictlyLower>().setZero();
  // Greedy nearest match of each eigenvalue of T11.
  std::vector<bool> pick(static_cast<std::size_t>(n), false);
  for (Index i = 0; i < r; ++i) {
    Index best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      if (pick[static_cast<std::size_t>(j)]) continue;
      const double d = std::abs(t(j, j) - s.t11(i, i));
      if (d < bd) bd = d, best = j;
    }
    pick[static_cast<std::size_t>(best)] = true;
  }
  reorder_schur(t, u, pick);
  return u.leftCols(r);
}

}  // namespace spb
