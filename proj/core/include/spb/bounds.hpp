#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spb/linalg.hpp"
#include "spb/newton.hpp"
#include "spb/sweep_record.hpp"

namespace spb {

struct BoundReport {
  double term_quadratic = 0.0;  // 8 ||V1||_{2,inf} (||E21||_2 / sep2)^2
  double term_cross = 0.0;      // 2 ||V2 E21||_{2,inf} / gap
  double term_submult = 0.0;    // 4 ||V2 E22 V2^T||_{2,inf} ||E21||_2 / (gap sep2)
  double total = 0.0;
  double gap_used = 0.0;
  bool assumptions_ok = false;  // ||E||_2 <= gap / 5
  std::optional<double> observed_error;
  double dk_reference = 0.0;  // 2 ||E21||_2 / sep2

  // Diagnostics, serialized to JSON only.
  double e_norm_upper = 0.0;
  double sep2 = 0.0;
  double e21_norm = 0.0;
  std::string gap_method;
  double sep2inf_lower = 0.0;
  std::optional<double> observed_frob_error;
  std::string observed_method;
};

struct Mu {
  double value = 0.0;
};
Mu coherence(const SpectralSplit& split);

struct ObservedError {
  double aligned_error = 0.0;
  double frob_error = 0.0;
  std::string method;  // "newton" or "dense-eigensolver"
  int newton_iters = 0;
  OrthoBasis v1hat;
  std::optional<NewtonResult> newton;
};

// Procrustes-aligned error of the dominant subspace of A + E, via the Newton
// construction when its certificate holds and the dense eigensolver otherwise.
ObservedError observe_error(const SpectralSplit& split, const ProjectedPerturbation& pert,
                            NewtonOptions opts = {});
void attach_observed(BoundReport& report, const ObservedError& obs);

BoundReport theorem_main_bound(const SpectralSplit& split, const ProjectedPerturbation& pert);
BoundReport theorem_main_bound(const SpectralSplit& split, const SymMatrix& e,
                               bool observe = false);
BoundReport theorem_main_bound(const SymMatrix& a, const SymMatrix& e, Index r,
                               bool observe = false);

struct CorollaryBound {
  bool applicable = false;
  BoundReport report;  // filled even when inapplicable
  std::string reason;
};

CorollaryBound corollary_infbound(const SpectralSplit& split, const SymMatrix& e);

double lemma_y_bound(const SpectralSplit& split, const SymMatrix& e, const NewtonResult& newton);

double two_perturbation_bound(const SpectralSplit& split, const SymMatrix& e,
                              const SymMatrix& etilde, const NewtonResult& newton_tilde);

struct RateCheck {
  double fitted_slope = 0.0;
  double predicted_slope = 0.0;
};

// Exponent of the slowest-decaying term among sigma^2 sqrt(n), sigma sqrt(log n)
// and (sigma sqrt(n))^3 for sigma = n^{-p} (log factors ignored).
double predicted_rate(double sigma_exponent);
RateCheck probg_rate_check(const std::vector<SweepRecord>& sweep, double sigma_exponent);

std::string bound_report_json(const BoundReport& report);
std::string bound_report_csv_header();
std::string bound_report_csv_row(const BoundReport& report);

}  // namespace spb
