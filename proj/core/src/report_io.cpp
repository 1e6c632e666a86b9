#include <sstream>

#include "json.hpp"
#include "spb/bounds.hpp"
#include "spb/matrix_io.hpp"

namespace spb {

std::string bound_report_json(const BoundReport& r) {
  nlohmann::ordered_json j;
  j["term_quadratic"] = r.term_quadratic;
  j["term_cross"] = r.term_cross;
  j["term_submult"] = r.term_submult;
  j["total"] = r.total;
  j["gap_used"] = r.gap_used;
  j["assumptions_ok"] = r.assumptions_ok;
  if (r.observed_error) {
    j["observed_error"] = *r.observed_error;
  } else {
    j["observed_error"] = nullptr;
  }
  j["dk_reference"] = r.dk_reference;
  j["dk_reference_formula"] = "2 ||E21||_2 / sep2";
  nlohmann::ordered_json d;
  d["e_norm_upper"] = r.e_norm_upper;
  d["sep2"] = r.sep2;
  d["sep2inf_lower"] = r.sep2inf_lower;
  d["e21_norm"] = r.e21_norm;
  d["gap_method"] = r.gap_method;
  if (r.observed_frob_error) d["observed_frob_error"] = *r.observed_frob_error;
  if (!r.observed_method.empty()) d["observed_method"] = r.observed_method;
  j["diagnostics"] = d;
  return j.dump(2) + "\n";
}

std::string bound_report_csv_header() {
  return "term_quadratic,term_cross,term_submult,total,gap_used,assumptions_ok,observed_error,"
         "dk_reference";
}

std::string bound_report_csv_row(const BoundReport& r) {
  std::ostringstream o;
  o << format_double(r.term_quadratic) << ',' << format_double(r.term_cross) << ','
    << format_double(r.term_submult) << ',' << format_double(r.total) << ','
    << format_double(r.gap_used) << ',' << (r.assumptions_ok ? "true" : "false") << ','
    << (r.observed_error ? format_double(*r.observed_error) : std::string()) << ','
    << format_double(r.dk_reference);
  return o.str();
}

}  // namespace spb
