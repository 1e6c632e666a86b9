#include "spb/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "spb/errors.hpp"
#include "spb/separation.hpp"
#include "spb/stats.hpp"

namespace spb {

namespace {

// Above this size the n x n complement basis is not worth forming.
constexpr Index kComplementLimit = 400;

void require_same_n(const SpectralSplit& split, const SymMatrix& e, const char* what) {
  if (e.n() != split.n()) {
    std::ostringstream msg;
    msg << what << ": E is " << e.n() << " x " << e.n() << " but A is " << split.n() << " x "
        << split.n();
    throw DimensionError(msg.str());
  }
}

// P2 M for M with n rows.
Matrix project_off_v1(const Matrix& v1, const Matrix& m) {
  Matrix out = m;
  out.noalias() -= v1 * (v1.transpose() * m);
  return out;
}

double safe_ratio(double num, double den) {
  if (num == 0.0) return 0.0;
  if (den <= 0.0) return std::numeric_limits<double>::infinity();
  return num / den;
}

OrthoBasis dense_dominant_basis(const SpectralSplit& split, const SymMatrix& e) {
  const Matrix ahat = split.a().dense() + e.dense();
  Eigen::SelfAdjointEigenSolver<Matrix> es(ahat);
  if (es.info() != Eigen::Success) throw Error("observe_error: eigensolver failed");
  const Index n = split.n();
  const Index r = split.r();
  Matrix top(n, r);
  for (Index j = 0; j < r; ++j) top.col(j) = es.eigenvectors().col(n - 1 - j);
  return OrthoBasis::trusted(std::move(top));
}

}  // namespace

Mu coherence(const SpectralSplit& split) {
  return Mu{std::sqrt(static_cast<double>(split.n())) * two_to_inf_norm(split.v1().matrix())};
}

ObservedError observe_error(const SpectralSplit& split, const ProjectedPerturbation& pert,
                            NewtonOptions opts) {
  ObservedError obs;
  const NKCertificate cert = nk_certificate(split, pert);
  if (cert.valid) {
    opts.check_certificate = false;
    opts.build_complement = opts.build_complement && split.n() - split.r() <= kComplementLimit;
    try {
      NewtonResult res = newton_subspace(split, pert, opts);
      if (res.inclusion.ok) {
        const SubspaceError err = two_inf_subspace_error(res.v1hat, split.v1());
        obs.aligned_error = err.aligned_error;
        obs.frob_error = err.frob_error;
        obs.method = "newton";
        obs.newton_iters = res.iters;
        obs.v1hat = res.v1hat;
        obs.newton = std::move(res);
        return obs;
      }
    } catch (const IterationError&) {
    } catch (const SingularOperatorError&) {
    }
  }
  obs.v1hat = dense_dominant_basis(split, pert.e());
  const SubspaceError err = two_inf_subspace_error(obs.v1hat, split.v1());
  obs.aligned_error = err.aligned_error;
  obs.frob_error = err.frob_error;
  obs.method = "dense-eigensolver";
  return obs;
}

void attach_observed(BoundReport& report, const ObservedError& obs) {
  report.observed_error = obs.aligned_error;
  report.observed_frob_error = obs.frob_error;
  report.observed_method = obs.method;
}

BoundReport theorem_main_bound(const SpectralSplit& split, const ProjectedPerturbation& pert) {
  require_same_n(split, pert.e(), "theorem_main_bound");
  const GapCertificate gc = gap_certificate(split);
  const double sep2 = gc.sep2;
  const double gap = gc.gap_lower;
  const double e21 = pert.e21_norm();

  BoundReport rep;
  rep.gap_used = gap;
  rep.sep2 = sep2;
  rep.sep2inf_lower = gc.sep2inf_lower;
  rep.gap_method = gc.method;
  rep.e21_norm = e21;
  rep.e_norm_upper = pert.e_norm().upper;

  const double v1_norm = two_to_inf_norm(split.v1().matrix());
  const double ratio = safe_ratio(e21, sep2);
  rep.term_quadratic = 8.0 * v1_norm * ratio * ratio;
  rep.term_cross = 2.0 * safe_ratio(two_to_inf_norm(pert.v2e21()), gap);
  if (e21 > 0.0) {
    const double p2ep2 = two_to_inf_norm(pert.p2ep2(split));
    rep.term_submult = 4.0 * safe_ratio(p2ep2 * e21, gap * sep2);
  }
  rep.total = rep.term_quadratic + rep.term_cross + rep.term_submult;
  rep.assumptions_ok = gap > 0.0 && rep.e_norm_upper <= gap / 5.0;
  rep.dk_reference = 2.0 * ratio;
  return rep;
}

BoundReport theorem_main_bound(const SpectralSplit& split, const SymMatrix& e, bool observe) {
  require_same_n(split, e, "theorem_main_bound");
  const ProjectedPerturbation pert(split, e);
  BoundReport rep = theorem_main_bound(split, pert);
  if (observe) attach_observed(rep, observe_error(split, pert));
  return rep;
}

BoundReport theorem_main_bound(const SymMatrix& a, const SymMatrix& e, Index r, bool observe) {
  if (a.n() != e.n()) throw DimensionError("theorem_main_bound: A and E differ in size");
  return theorem_main_bound(spectral_split(a, r), e, observe);
}

CorollaryBound corollary_infbound(const SpectralSplit& split, const SymMatrix& e) {
  require_same_n(split, e, "corollary_infbound");
  const ProjectedPerturbation pert(split, e);
  CorollaryBound out;
  BoundReport& rep = out.report;
  rep = theorem_main_bound(split, pert);
  rep.term_cross *= 2.0;
  rep.term_submult = 0.0;
  rep.total = rep.term_quadratic + rep.term_cross;

  const double gap = rep.gap_used;
  const double mu = coherence(split).value;
  const double e_inf = inf_norm(e.dense());
  const double inf_threshold = gap / (4.0 + 4.0 * mu * mu);
  const bool two_ok = rep.assumptions_ok;
  const bool inf_ok = gap > 0.0 && e_inf <= inf_threshold;
  rep.assumptions_ok = two_ok && inf_ok;
  out.applicable = rep.assumptions_ok;
  if (!two_ok) {
    std::ostringstream msg;
    msg << "||E||_2 <= " << rep.e_norm_upper << " exceeds gap/5 = " << gap / 5.0;
    out.reason = msg.str();
  } else if (!inf_ok) {
    std::ostringstream msg;
    msg << "||E||_inf = " << e_inf << " exceeds gap/(4+4mu^2) = " << inf_threshold;
    out.reason = msg.str();
  }
  return out;
}

double lemma_y_bound(const SpectralSplit& split, const SymMatrix& e, const NewtonResult& newton) {
  require_same_n(split, e, "lemma_y_bound");
  if (newton.input_fingerprint != hash_combine(split.fingerprint(), fingerprint(e.dense()))) {
    throw StaleResultError("lemma_y_bound: NewtonResult was computed for a different (A, E)");
  }
  if (newton.yhat.rows() != split.n() || newton.yhat.cols() != split.r()) {
    throw DimensionError("lemma_y_bound: Newton solution has the wrong shape");
  }
  const ProjectedPerturbation pert(split, e, ProjectedPerturbation::NormMode::Skip);
  const GapCertificate gc = gap_certificate(split);
  const double ratio = safe_ratio(pert.e21_norm(), gc.sep2);
  const double quad = 8.0 * two_to_inf_norm(split.v1().matrix()) * ratio * ratio;
  // Yhat lies in ran(V2), so V2 E22 V2^T Yhat = P2 E Yhat.
  const Matrix p2ey = project_off_v1(split.v1().matrix(), e.dense() * newton.yhat);
  const double num = two_to_inf_norm(pert.v2e21()) + two_to_inf_norm(p2ey);
  return quad + 2.0 * safe_ratio(num, gc.gap_lower);
}

double two_perturbation_bound(const SpectralSplit& split, const SymMatrix& e,
                              const SymMatrix& etilde, const NewtonResult& newton_tilde) {
  require_same_n(split, e, "two_perturbation_bound");
  require_same_n(split, etilde, "two_perturbation_bound");
  if (newton_tilde.input_fingerprint !=
      hash_combine(split.fingerprint(), fingerprint(etilde.dense()))) {
    throw StaleResultError(
        "two_perturbation_bound: NewtonResult was computed for a different (A, Etilde)");
  }
  const Matrix& v1 = split.v1().matrix();
  const Matrix d = e.dense() - etilde.dense();
  const Matrix dv1 = d * v1;
  const Matrix d11 = v1.transpose() * dv1;
  const Matrix d21 = dv1 - v1 * d11;  // V2 (E21 - Etilde21)
  const double block_tol = 1e-12 * std::max(1.0, std::max(inf_norm(e.dense()), inf_norm(etilde.dense())));
  if (d11.cwiseAbs().maxCoeff() > block_tol || d21.cwiseAbs().maxCoeff() > block_tol) {
    throw PreconditionError("two_perturbation_bound: E and Etilde differ in the (1,1) or (1,2) block");
  }

  const ProjectedPerturbation pert(split, e);
  const ProjectedPerturbation pert_t(split, etilde);
  const GapCertificate gc = gap_certificate(split);
  const double gap = gc.gap_lower;
  const double sep = gc.sep2;
  if (!(gap > 0.0) || pert.e_norm().upper > gap / 5.0 || pert_t.e_norm().upper > gap / 5.0) {
    throw PreconditionError("two_perturbation_bound: need ||E||_2 <= gap/5 and ||Etilde||_2 <= gap/5");
  }

  const double e21 = pert.e21_norm();
  const double ratio = safe_ratio(e21, sep);
  const double t1 = 8.0 * two_to_inf_norm(v1) * ratio * ratio;
  const double t2 = 2.0 * two_to_inf_norm(pert.v2e21()) / gap;
  const Matrix p2ep2 = pert.p2ep2(split);
  const Matrix p2ep2_ytilde = p2ep2 * newton_tilde.yhat;
  const double t3 = 4.0 * two_to_inf_norm(p2ep2_ytilde) / gap;
  if (e21 == 0.0) return t1 + t2 + t3;
  const double p2ep2_2inf = two_to_inf_norm(p2ep2);
  const double e22 = sym_norm2_enclosure(p2ep2).upper;
  const double e22t = sym_norm2_enclosure(pert_t.p2ep2(split)).upper;
  const double t4 = 5.0 * (e22 + e22t) * p2ep2_2inf * e21 / (gap * sep * sep);
  const double t5 = 10.0 * p2ep2_2inf * e21 * e21 * e21 / (gap * sep * sep * sep);
  return t1 + t2 + t3 + t4 + t5;
}

double predicted_rate(double p) {
  return std::max({0.5 - 2.0 * p, -p, 3.0 * (0.5 - p)});
}

RateCheck probg_rate_check(const std::vector<SweepRecord>& sweep, double sigma_exponent) {
  std::map<long, std::vector<double>> by_n;
  for (const auto& rec : sweep) {
    if (rec.n <= 0) throw PreconditionError("probg_rate_check: non-positive n in sweep");
    by_n[rec.n].push_back(rec.err_2inf);
  }
  if (by_n.size() < 4) {
    throw PreconditionError("probg_rate_check: need at least 4 distinct n values");
  }
  std::vector<double> x, y;
  for (const auto& [n, errs] : by_n) {
    const double med = quantile_linear(errs, 0.5);
    if (!(med > 0.0)) throw PreconditionError("probg_rate_check: median error must be positive");
    x.push_back(std::log(static_cast<double>(n)));
    y.push_back(std::log(med));
  }
  RateCheck out;
  out.fitted_slope = ordinary_least_squares(x, y).slope;
  out.predicted_slope = predicted_rate(sigma_exponent);
  return out;
}

}  // namespace spb
