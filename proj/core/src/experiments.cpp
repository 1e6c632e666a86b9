#include "spb/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

#include "json.hpp"

#include "spb/bounds.hpp"
#include "spb/errors.hpp"
#include "spb/matrix_io.hpp"
#include "spb/parallel.hpp"
#include "spb/rng.hpp"
#include "spb/svg_plot.hpp"

#ifndef SPB_VERSION
#define SPB_VERSION "0.0.0"
#endif

namespace spb {

namespace {

using json = nlohmann::ordered_json;

// Rough per-trial working set in n^2 doubles: A, V2, E, the ambient Newton
// operator, one factorization and a P2 E P2 temporary.
constexpr double kTrialFootprint = 6.0;
constexpr double kMemoryBudgetBytes = 3.0e9;

Index min_n(Family f) { return f == Family::Tightness ? 8 : 4; }

std::optional<Instance> make_instance(Family f, long n) {
  switch (f) {
    case Family::LowRank: return gen_low_rank(n);
    case Family::Coherent: return gen_coherent(n);
    case Family::SepExample: return gen_sep_example(n);
    case Family::Tightness: return std::nullopt;
  }
  return std::nullopt;
}

unsigned workers_for(const SweepConfig& config, long n, int jobs) {
  const unsigned budget = config.threads ? config.threads : thread_budget();
  const double per_trial = kTrialFootprint * 8.0 * static_cast<double>(n) * static_cast<double>(n);
  const auto mem_cap = static_cast<unsigned>(std::max(1.0, kMemoryBudgetBytes / per_trial));
  return std::max(1u, std::min({budget, mem_cap, static_cast<unsigned>(jobs)}));
}

SweepRecord evaluate(const SpectralSplit& split, const SymMatrix& e, const SweepConfig& config) {
  SweepRecord rec;
  const ProjectedPerturbation pert(split, e);
  const BoundReport rep = theorem_main_bound(split, pert);
  const ObservedError obs = observe_error(split, pert, config.newton);
  const ProjectionErrors pe = projection_split_errors(split, obs.v1hat);
  rec.err_2inf = obs.aligned_error;
  rec.err_frob = obs.frob_error;
  rec.bound_total = rep.total;
  rec.term_quadratic = rep.term_quadratic;
  rec.term_cross = rep.term_cross;
  rec.term_submult = rep.term_submult;
  rec.dk_reference = rep.dk_reference;
  rec.gap_used = rep.gap_used;
  rec.assumptions_ok = rep.assumptions_ok;
  rec.newton_iters = obs.newton_iters;
  rec.err_on_v1 = pe.err_on_v1;
  rec.err_on_v2 = pe.err_on_v2;
  return rec;
}

double column_value(const SweepRecord& r, const std::string& c) {
  if (c == "err_2inf") return r.err_2inf;
  if (c == "err_frob") return r.err_frob;
  if (c == "bound_total") return r.bound_total;
  if (c == "term_quadratic") return r.term_quadratic;
  if (c == "term_cross") return r.term_cross;
  if (c == "term_submult") return r.term_submult;
  if (c == "dk_reference") return r.dk_reference;
  if (c == "gap_used") return r.gap_used;
  if (c == "newton_iters") return r.newton_iters;
  if (c == "wall_time_ms") return r.wall_time_ms;
  if (c == "err_on_v1") return r.err_on_v1;
  if (c == "err_on_v2") return r.err_on_v2;
  throw PreconditionError("unknown sweep column '" + c + "'");
}

json sigma_json(const SigmaRule& s) {
  json j;
  if (s.kind == SigmaRule::Kind::Fixed) {
    j["kind"] = "fixed";
    j["sigma"] = s.value;
  } else {
    j["kind"] = "power";
    j["exponent"] = s.value;
    j["coefficient"] = s.coefficient;
  }
  return j;
}

const char* output_name(OutputKind k) {
  switch (k) {
    case OutputKind::Csv: return "csv";
    case OutputKind::Json: return "json";
    case OutputKind::Svg: return "svg";
  }
  return "?";
}

}  // namespace

const char* toolkit_version() { return SPB_VERSION; }

double SigmaRule::sigma(long n) const {
  if (kind == Kind::Fixed) return value;
  return coefficient * std::pow(static_cast<double>(n), -value);
}

void validate(const SweepConfig& c) {
  if (c.trials < 1) throw ConfigError("sweep: trials must be at least 1");
  if (c.n_values.empty()) throw ConfigError("sweep: n_values is empty");
  for (std::size_t i = 1; i < c.n_values.size(); ++i) {
    if (c.n_values[i] <= c.n_values[i - 1]) {
      throw ConfigError("sweep: n_values must be strictly increasing");
    }
  }
  for (long n : c.n_values) {
    if (n < min_n(c.family) || n % 2 != 0) {
      std::ostringstream msg;
      msg << "sweep: n = " << n << " is invalid for family " << to_string(c.family)
          << " (needs even n >= " << min_n(c.family) << ")";
      throw ConfigError(msg.str());
    }
  }
  if (c.family == Family::Tightness) {
    if (!(c.c_cross >= 0.0) || !(c.c_submult >= 0.0) || !std::isfinite(c.c_cross) ||
        !std::isfinite(c.c_submult)) {
      throw ConfigError("sweep: tightness constants must be finite and >= 0");
    }
  } else {
    for (long n : c.n_values) {
      const double s = c.sigma_rule.sigma(n);
      if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("sweep: sigma rule gives an invalid sigma");
    }
  }
  if (!(c.newton.tol > 0.0) || c.newton.max_iters < 1) {
    throw ConfigError("sweep: Newton tolerance and iteration cap must be positive");
  }
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config) {
  validate(config);
  std::vector<SweepRecord> out;
  out.reserve(config.n_values.size() * static_cast<std::size_t>(config.trials));
  for (long n : config.n_values) {
    std::vector<SweepRecord> recs(static_cast<std::size_t>(config.trials));
    if (config.family == Family::Tightness) {
      // Deterministic instance: every trial reproduces the same values.
      const auto t0 = std::chrono::steady_clock::now();
      const TightnessInstance inst = gen_tightness_example(n, config.c_cross, config.c_submult);
      SweepRecord base = evaluate(inst.split, inst.e, config);
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      for (int t = 0; t < config.trials; ++t) {
        SweepRecord& rec = recs[static_cast<std::size_t>(t)];
        rec = base;
        rec.trial = t;
        rec.seed = derive_seed(config.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t));
        rec.wall_time_ms = config.record_timing ? ms : 0.0;
      }
    } else {
      const Instance inst = *make_instance(config.family, n);
      const double sigma = config.sigma_rule.sigma(n);
      parallel_for(
          recs.size(),
          [&](std::size_t t) {
            const auto t0 = std::chrono::steady_clock::now();
            const std::uint64_t seed =
                derive_seed(config.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t));
            const SymMatrix e = gen_gaussian_perturbation(inst.split.n(), sigma, SeededRng(seed, 0));
            SweepRecord rec = evaluate(inst.split, e, config);
            rec.trial = static_cast<int>(t);
            rec.seed = seed;
            if (config.record_timing) {
              rec.wall_time_ms = std::chrono::duration<double, std::milli>(
                                     std::chrono::steady_clock::now() - t0)
                                     .count();
            }
            recs[t] = rec;
          },
          workers_for(config, n, config.trials));
    }
    for (auto& rec : recs) {
      rec.n = n;
      out.push_back(rec);
    }
  }
  std::sort(out.begin(), out.end(), [](const SweepRecord& a, const SweepRecord& b) {
    return a.n != b.n ? a.n < b.n : a.trial < b.trial;
  });
  return out;
}

const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols{
      "err_2inf",     "err_frob", "bound_total",  "term_quadratic", "term_cross", "term_submult",
      "dk_reference", "gap_used", "newton_iters", "wall_time_ms",   "err_on_v1",  "err_on_v2"};
  return cols;
}

std::vector<NSummary> summarize(const std::vector<SweepRecord>& records) {
  if (records.empty()) throw PreconditionError("summarize: no records");
  std::map<long, std::vector<const SweepRecord*>> by_n;
  for (const auto& r : records) by_n[r.n].push_back(&r);
  std::vector<NSummary> out;
  for (const auto& [n, rs] : by_n) {
    NSummary s;
    s.n = n;
    s.count = static_cast<int>(rs.size());
    for (const auto& col : summary_columns()) {
      std::vector<double> v;
      v.reserve(rs.size());
      for (const auto* r : rs) v.push_back(column_value(*r, col));
      ColumnStats cs;
      cs.median = quantile_linear(v, 0.5);
      cs.q05 = quantile_linear(v, 0.05);
      cs.q95 = quantile_linear(v, 0.95);
      cs.mean = mean(v);
      s.columns.emplace(col, cs);
    }
    out.push_back(std::move(s));
  }
  return out;
}

LineFit fit_slope(const std::vector<NSummary>& summary, const std::string& column) {
  if (summary.size() < 3) throw PreconditionError("fit_slope: need at least 3 distinct n");
  std::vector<double> x, y;
  for (const auto& s : summary) {
    const auto it = s.columns.find(column);
    if (it == s.columns.end()) throw PreconditionError("fit_slope: unknown column '" + column + "'");
    if (!(it->second.median > 0.0)) {
      std::ostringstream msg;
      msg << "fit_slope: median of " << column << " at n = " << s.n << " is not positive";
      throw PreconditionError(msg.str());
    }
    x.push_back(std::log(static_cast<double>(s.n)));
    y.push_back(std::log(it->second.median));
  }
  return ordinary_least_squares(x, y);
}

ProjectionErrors projection_split_errors(const SpectralSplit& split, const OrthoBasis& v1hat) {
  const SubspaceError err = two_inf_subspace_error(v1hat, split.v1());
  const Matrix& v1 = split.v1().matrix();
  const Matrix diff = v1hat.matrix() * err.u - v1;
  const Matrix on_v1 = v1 * (v1.transpose() * diff);
  return ProjectionErrors{two_to_inf_norm(on_v1), two_to_inf_norm(diff - on_v1)};
}

ProjectionErrors projection_split_errors(const SpectralSplit& split, const NewtonResult& newton) {
  return projection_split_errors(split, newton.v1hat);
}

std::string sweep_csv(const std::vector<SweepRecord>& records) {
  std::ostringstream out;
  out << "n,trial,seed,err_2inf,err_frob,bound_total,term_quadratic,term_cross,term_submult,"
         "dk_reference,gap_used,assumptions_ok,newton_iters,wall_time_ms,err_on_v1,err_on_v2\n";
  for (const auto& r : records) {
    out << r.n << ',' << r.trial << ',' << r.seed << ',' << format_double(r.err_2inf) << ','
        << format_double(r.err_frob) << ',' << format_double(r.bound_total) << ','
        << format_double(r.term_quadratic) << ',' << format_double(r.term_cross) << ','
        << format_double(r.term_submult) << ',' << format_double(r.dk_reference) << ','
        << format_double(r.gap_used) << ',' << (r.assumptions_ok ? "true" : "false") << ','
        << r.newton_iters << ',' << format_double(r.wall_time_ms) << ','
        << format_double(r.err_on_v1) << ',' << format_double(r.err_on_v2) << '\n';
  }
  return out.str();
}

std::string sweep_json(const SweepConfig& config, const std::vector<SweepRecord>& records) {
  json j;
  j["toolkit"] = "subspace-perturb";
  j["version"] = toolkit_version();
  j["rng"] = SeededRng::algorithm;
  j["seed_derivation"] = "derive_seed(base, n, trial), substream 0";
  json cfg;
  cfg["family"] = to_string(config.family);
  cfg["n_values"] = config.n_values;
  cfg["sigma_rule"] = sigma_json(config.sigma_rule);
  cfg["trials"] = config.trials;
  cfg["seed"] = config.seed;
  if (config.family == Family::Tightness) {
    cfg["c_cross"] = config.c_cross;
    cfg["c_submult"] = config.c_submult;
  }
  cfg["record_timing"] = config.record_timing;
  json outs = json::array();
  for (auto k : config.outputs) outs.push_back(output_name(k));
  cfg["outputs"] = outs;
  j["config"] = cfg;
  j["quantile_method"] = "linear interpolation between order statistics at p(N-1)";
  j["slope_fit"] = "ordinary least squares of log(median) on log(n)";
  j["bound_curve"] = "per-trial bounds summarized by mean and median";

  const std::vector<NSummary> summary = summarize(records);
  json sums = json::array();
  for (const auto& s : summary) {
    json e;
    e["n"] = s.n;
    e["count"] = s.count;
    for (const auto& col : summary_columns()) {
      const ColumnStats& cs = s.columns.at(col);
      e[col] = {{"median", cs.median}, {"q05", cs.q05}, {"q95", cs.q95}, {"mean", cs.mean}};
    }
    sums.push_back(e);
  }
  j["summary"] = sums;
  json slopes = json::object();
  if (summary.size() >= 3) {
    for (const char* col : {"err_2inf", "err_frob", "bound_total", "dk_reference", "err_on_v1",
                            "err_on_v2"}) {
      try {
        const LineFit f = fit_slope(summary, col);
        slopes[col] = {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
      } catch (const PreconditionError&) {
        slopes[col] = nullptr;
      }
    }
  }
  j["slopes"] = slopes;
  long violations = 0;
  for (const auto& r : records) violations += (r.assumptions_ok && r.err_2inf > r.bound_total);
  j["bound_violations"] = violations;
  return j.dump(2) + "\n";
}

std::string sweep_svg(const SweepConfig& config, const std::vector<SweepRecord>& records) {
  const std::vector<NSummary> summary = summarize(records);
  auto series = [&](const std::string& col, const std::string& label, bool dashed, bool band) {
    PlotSeries s;
    s.label = label;
    s.dashed = dashed;
    for (const auto& ns : summary) {
      const ColumnStats& cs = ns.columns.at(col);
      s.x.push_back(static_cast<double>(ns.n));
      s.y.push_back(cs.mean);
      if (band) {
        s.lo.push_back(cs.q05);
        s.hi.push_back(cs.q95);
      }
    }
    return s;
  };
  std::vector<PlotSeries> all;
  if (config.family == Family::Tightness) {
    all.push_back(series("err_on_v1", "error on ran V1", false, false));
    all.push_back(series("err_on_v2", "error on ran V2", false, false));
    all.push_back(series("term_quadratic", "quadratic term", true, false));
    all.push_back(series("term_cross", "cross term", true, false));
    all.push_back(series("term_submult", "submultiplicative term", true, false));
  } else {
    all.push_back(series("err_2inf", "2,inf error", false, true));
    all.push_back(series("err_frob", "Frobenius error", false, true));
    all.push_back(series("bound_total", "2,inf bound", true, true));
    all.push_back(series("dk_reference", "Davis-Kahan reference", true, false));
  }
  std::ostringstream title;
  title << to_string(config.family) << ", " << config.trials << " trial"
        << (config.trials == 1 ? "" : "s") << " per n";
  return render_loglog_svg(title.str(), "n", "error", all);
}

std::vector<std::filesystem::path> write_sweep_outputs(const SweepConfig& config,
                                                       const std::vector<SweepRecord>& records,
                                                       const std::filesystem::path& stem) {
  std::vector<std::filesystem::path> written;
  for (OutputKind k : config.outputs) {
    std::filesystem::path p = stem;
    p += std::string(".") + output_name(k);
    switch (k) {
      case OutputKind::Csv: atomic_write(p, sweep_csv(records)); break;
      case OutputKind::Json: atomic_write(p, sweep_json(config, records)); break;
      case OutputKind::Svg: atomic_write(p, sweep_svg(config, records)); break;
    }
    written.push_back(p);
  }
  return written;
}

}  // namespace spb

namespace spb {

std::vector<SweepRecord> read_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("n,trial,seed,", 0) != 0) {
    throw FormatError("sweep csv: missing or unexpected header");
  }
  std::vector<SweepRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 16) {
      std::ostringstream msg;
      msg << "sweep csv line " << lineno << ": expected 16 fields, got " << f.size();
      throw FormatError(msg.str());
    }
    try {
      SweepRecord r;
      r.n = std::stol(f[0]);
      r.trial = std::stoi(f[1]);
      r.seed = std::stoull(f[2]);
      r.err_2inf = std::stod(f[3]);
      r.err_frob = std::stod(f[4]);
      r.bound_total = std::stod(f[5]);
      r.term_quadratic = std::stod(f[6]);
      r.term_cross = std::stod(f[7]);
      r.term_submult = std::stod(f[8]);
      r.dk_reference = std::stod(f[9]);
      r.gap_used = std::stod(f[10]);
      if (f[11] != "true" && f[11] != "false") throw std::invalid_argument("flag");
      r.assumptions_ok = f[11] == "true";
      r.newton_iters = std::stoi(f[12]);
      r.wall_time_ms = std::stod(f[13]);
      r.err_on_v1 = std::stod(f[14]);
      r.err_on_v2 = std::stod(f[15]);
      out.push_back(r);
    } catch (const std::logic_error&) {
      std::ostringstream msg;
      msg << "sweep csv line " << lineno << ": unparsable field";
      throw FormatError(msg.str());
    }
  }
  return out;
}

SweepConfig sweep_config_from_json(const std::string& text) {
  SweepConfig c;
  try {
    const json j = json::parse(text);
    static const char* const known[] = {"family", "n_values", "sigma", "trials", "seed",
                                        "c_cross", "c_submult", "outputs", "record_timing"};
    for (const auto& [k, v] : j.items()) {
      (void)v;
      if (std::find(std::begin(known), std::end(known), k) == std::end(known)) {
        throw ConfigError("sweep config: unknown key '" + k + "'");
      }
    }
    c.family = family_from_string(j.at("family").get<std::string>());
    c.n_values = j.at("n_values").get<std::vector<long>>();
    if (j.contains("sigma")) {
      const json& s = j.at("sigma");
      const std::string kind = s.at("kind").get<std::string>();
      if (kind == "fixed") {
        c.sigma_rule = SigmaRule::fixed(s.at("sigma").get<double>());
      } else if (kind == "power") {
        c.sigma_rule = SigmaRule::power(s.at("exponent").get<double>(), s.value("coefficient", 1.0));
      } else {
        throw ConfigError("sweep config: sigma kind must be 'fixed' or 'power'");
      }
    }
    c.trials = j.value("trials", 1);
    c.seed = j.value("seed", std::uint64_t{1});
    c.c_cross = j.value("c_cross", 1.0);
    c.c_submult = j.value("c_submult", 1.0);
    c.record_timing = j.value("record_timing", false);
    if (j.contains("outputs")) {
      c.outputs.clear();
      for (const auto& o : j.at("outputs")) {
        const std::string name = o.get<std::string>();
        if (name == "csv") c.outputs.push_back(OutputKind::Csv);
        else if (name == "json") c.outputs.push_back(OutputKind::Json);
        else if (name == "svg") c.outputs.push_back(OutputKind::Svg);
        else throw ConfigError("sweep config: unknown output '" + name + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sweep config: ") + e.what());
  }
  validate(c);
  return c;
}

}  // namespace spb
