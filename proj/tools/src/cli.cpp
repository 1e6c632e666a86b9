#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "spb/bounds.hpp"
#include "spb/errors.hpp"
#include "spb/experiments.hpp"
#include "spb/generators.hpp"
#include "spb/matrix_io.hpp"
#include "spb/newton.hpp"
#include "spb/presets.hpp"
#include "spb/separation.hpp"

namespace spb::cli {

namespace {

using json = nlohmann::ordered_json;

struct Options {
  // shared
  unsigned long long seed = kDefaultSeed;
  std::string format = "json";
  std::string matrix_format = "csv";
  std::string out;
  // gen
  std::string family;
  long n = 0;
  std::optional<double> sigma;
  std::optional<double> sigma_exp;
  std::string part = "a";
  double c_cross = 0.2;
  double c_submult = 0.3;
  // bound / newton / sep
  std::string a_path, e_path, probe_path;
  long r = 0;
  bool observe = false;
  bool corollary = false;
  double tol = 1e-13;
  int max_iters = 50;
  bool check_certificate = false;
  // sweep / plot
  std::string preset, config_path, in_path;
  std::optional<int> trials;
  std::vector<long> n_list;
  bool svg = false;
};

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty() || out_path == "-") {
    out << text;
  } else {
    atomic_write(out_path, text);
  }
}

MatrixFormat parse_matrix_format(const std::string& s) {
  if (s == "csv") return MatrixFormat::Csv;
  if (s == "binary") return MatrixFormat::Binary;
  throw ConfigError("--matrix-format must be csv or binary");
}

void emit_matrix(const Matrix& m, const Options& o, std::ostream& out) {
  const MatrixFormat f = parse_matrix_format(o.matrix_format);
  if (o.out.empty() || o.out == "-") {
    if (f == MatrixFormat::Binary) {
      write_matrix_binary(out, m);
    } else {
      write_matrix_csv(out, m);
    }
  } else {
    write_matrix(o.out, m, f);
  }
}

double sigma_for(const Options& o, long n) {
  if (o.sigma && o.sigma_exp) throw ConfigError("give either --sigma or --sigma-exp, not both");
  if (o.sigma) return *o.sigma;
  if (o.sigma_exp) return std::pow(static_cast<double>(n), -*o.sigma_exp);
  return 0.0;
}

SymMatrix load_sym(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("missing --") + what);
  return SymMatrix(read_matrix(path));
}

int cmd_gen(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.n <= 0) throw ConfigError("gen: --n must be positive");
  if (o.family == "gaussian") {
    emit_matrix(gen_gaussian_perturbation(o.n, sigma_for(o, o.n), SeededRng(o.seed, 0)).dense(), o, out);
    return kOk;
  }
  if (o.family == "tightness") {
    const TightnessInstance t = gen_tightness_example(o.n, o.c_cross, o.c_submult);
    if (o.part == "a") emit_matrix(t.a().dense(), o, out);
    else if (o.part == "e") emit_matrix(t.e.dense(), o, out);
    else throw ConfigError("gen tightness: --part must be a or e");
    return kOk;
  }
  const Family fam = family_from_string(o.family);
  Instance inst = fam == Family::LowRank    ? gen_low_rank(o.n)
                  : fam == Family::Coherent ? gen_coherent(o.n)
                                            : gen_sep_example(o.n);
  if (o.part == "a") {
    emit_matrix(inst.a().dense(), o, out);
  } else if (o.part == "e") {
    emit_matrix(gen_gaussian_perturbation(inst.split.n(), sigma_for(o, o.n), SeededRng(o.seed, 0)).dense(), o, out);
  } else if (o.part == "v1") {
    emit_matrix(inst.split.v1().matrix(), o, out);
  } else if (o.part == "probe" && fam == Family::SepExample) {
    // q = e1 + 2 v2 with v2 = [0; 1_pm] / sqrt(n).
    Matrix q = Matrix::Zero(o.n + 1, 1);
    q(0, 0) = 1.0;
    for (long i = 0; i < o.n; ++i) q(i + 1, 0) = (i < o.n / 2 ? 2.0 : -2.0) / std::sqrt(static_cast<double>(o.n));
    emit_matrix(q, o, out);
  } else {
    throw ConfigError("gen: --part must be a, e, v1 (or probe for sep-example)");
  }
  err << "generated " << o.family << " n=" << o.n << " part=" << o.part << "\n";
  return kOk;
}

int cmd_bound(const Options& o, std::ostream& out, std::ostream& err) {
  const SymMatrix a = load_sym(o.a_path, "a");
  const SymMatrix e = load_sym(o.e_path, "e");
  if (a.n() != e.n()) throw DimensionError("bound: A and E differ in size");
  if (o.r < 1 || o.r >= a.n()) throw ConfigError("bound: need 1 <= --r < n");
  const SpectralSplit split = spectral_split(a, o.r);
  BoundReport rep;
  bool ok = false;
  if (o.corollary) {
    CorollaryBound cb = corollary_infbound(split, e);
    rep = cb.report;
    if (o.observe) {
      const ProjectedPerturbation pert(split, e);
      attach_observed(rep, observe_error(split, pert));
    }
    ok = cb.applicable;
    if (!ok) err << "corollary not applicable: " << cb.reason << "\n";
  } else {
    rep = theorem_main_bound(split, e, o.observe);
    ok = rep.assumptions_ok;
    if (!ok) err << "assumption ||E||_2 <= gap/5 fails (||E||_2 <= " << rep.e_norm_upper << ", gap = " << rep.gap_used << ")\n";
  }
  if (o.format == "json") {
    emit(bound_report_json(rep), o.out, out);
  } else if (o.format == "csv") {
    emit(bound_report_csv_header() + "\n" + bound_report_csv_row(rep) + "\n", o.out, out);
  } else {
    throw ConfigError("--format must be csv or json");
  }
  return ok ? kOk : kAssumptionsFailed;
}

int cmd_newton(const Options& o, std::ostream& out, std::ostream& err) {
  const SymMatrix a = load_sym(o.a_path, "a");
  const SymMatrix e = load_sym(o.e_path, "e");
  if (a.n() != e.n()) throw DimensionError("newton: A and E differ in size");
  if (o.r < 1 || o.r >= a.n()) throw ConfigError("newton: need 1 <= --r < n");
  NewtonOptions opts;
  opts.tol = o.tol;
  opts.max_iters = o.max_iters;
  opts.check_certificate = o.check_certificate;
  opts.build_complement = false;
  const NewtonResult res = newton_subspace(a, e, o.r, opts);
  err << "iterations " << res.iters << ", residual " << format_double(res.residual) << " (scale "
      << format_double(res.scale) << "), certificate h = " << format_double(res.certificate.h)
      << (res.certificate.valid ? " (valid)" : " (not valid)") << ", inclusion "
      << (res.inclusion.ok ? "ok" : "failed") << " [" << res.inclusion.method << "]\n";
  const std::string& part = o.part;
  if (part == "a" || part == "xhat") emit_matrix(res.xhat, o, out);
  else if (part == "yhat") emit_matrix(res.yhat, o, out);
  else if (part == "v1hat") emit_matrix(res.v1hat.matrix(), o, out);
  else throw ConfigError("newton: --part must be xhat, yhat or v1hat");
  return kOk;
}

int cmd_sep(const Options& o, std::ostream& out, std::ostream&) {
  const SymMatrix a = load_sym(o.a_path, "a");
  if (o.r < 1 || o.r >= a.n()) throw ConfigError("sep: need 1 <= --r < n");
  const SpectralSplit split = spectral_split(a, o.r);
  const GapCertificate g = gap_certificate(split);
  json j;
  j["n"] = split.n();
  j["r"] = split.r();
  j["sep2"] = g.sep2;
  j["sepF"] = g.sepF;
  j["sep2inf_lower"] = g.sep2inf_lower;
  j["gap_lower"] = g.gap_lower;
  j["method"] = g.method;
  if (!o.probe_path.empty()) {
    const SepEstimate up = sep_2inf_upper_probe(split, {read_matrix(o.probe_path)});
    j["sep2inf_upper_probe"] = up.value;
    j["probe_kind"] = to_string(up.kind);
  }
  if (o.format != "json") throw ConfigError("sep: only --format json is supported");
  emit(j.dump(2) + "\n", o.out, out);
  return kOk;
}

SweepConfig sweep_config(const Options& o) {
  SweepConfig c;
  if (!o.preset.empty() && !o.config_path.empty()) throw ConfigError("give either --preset or --config");
  if (!o.preset.empty()) {
    c = preset(o.preset);
  } else if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw ConfigError("cannot read " + o.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    c = sweep_config_from_json(ss.str());
  } else if (!o.family.empty()) {
    c.family = family_from_string(o.family);
    c.c_cross = o.c_cross;
    c.c_submult = o.c_submult;
  } else {
    throw ConfigError("sweep: give --preset, --config or --family");
  }
  if (o.trials) c.trials = *o.trials;
  if (!o.n_list.empty()) c.n_values = o.n_list;
  if (o.sigma && o.sigma_exp) throw ConfigError("give either --sigma or --sigma-exp, not both");
  if (o.sigma) c.sigma_rule = SigmaRule::fixed(*o.sigma);
  if (o.sigma_exp) c.sigma_rule = SigmaRule::power(*o.sigma_exp);
  if (o.seed != kDefaultSeed || (o.preset.empty() && o.config_path.empty())) c.seed = o.seed;
  if (o.svg) c.outputs.push_back(OutputKind::Svg);
  return c;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const SweepConfig c = sweep_config(o);
  validate(c);
  const std::string stem = !o.out.empty() ? o.out : (!o.preset.empty() ? o.preset : std::string("sweep"));
  const std::vector<SweepRecord> recs = run_sweep(c);
  for (const auto& p : write_sweep_outputs(c, recs, stem)) out << p.string() << "\n";
  long violations = 0, ok = 0;
  for (const auto& r : recs) {
    ok += r.assumptions_ok;
    violations += r.assumptions_ok && r.err_2inf > r.bound_total;
  }
  err << recs.size() << " records, " << ok << " with assumptions satisfied, " << violations
      << " bound violations\n";
  const auto summary = summarize(recs);
  if (summary.size() >= 3) {
    for (const char* col : {"err_2inf", "err_frob", "bound_total"}) {
      try {
        err << "slope " << col << " " << format_double(fit_slope(summary, col).slope) << "\n";
      } catch (const PreconditionError&) {
      }
    }
  }
  return kOk;
}

int cmd_plot(const Options& o, std::ostream& out, std::ostream&) {
  if (o.in_path.empty()) throw ConfigError("plot: missing --in");
  std::ifstream in(o.in_path);
  if (!in) throw ConfigError("cannot read " + o.in_path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::vector<SweepRecord> recs = read_sweep_csv(ss.str());
  if (recs.empty()) throw FormatError("plot: sweep csv has no records");
  SweepConfig c;
  c.family = o.family.empty() ? Family::LowRank : family_from_string(o.family);
  c.trials = 0;
  for (const auto& r : recs) c.trials = std::max(c.trials, r.trial + 1);
  emit(sweep_svg(c, recs), o.out, out);
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Row-wise perturbation bounds for invariant subspaces", "subspace-perturb"};
  app.require_subcommand(1);
  app.set_version_flag("--version", toolkit_version());

  auto common = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "Random seed (default 1)");
    c->add_option("--out", o.out, "Output path (default stdout)");
  };

  auto* gen = app.add_subcommand("gen", "Generate an instance matrix");
  gen->add_option("family", o.family, "low-rank, coherent, tightness, sep-example or gaussian")->required();
  gen->add_option("--n", o.n, "Dimension parameter")->required();
  gen->add_option("--sigma", o.sigma, "Noise level");
  gen->add_option("--sigma-exp", o.sigma_exp, "Noise level n^-p");
  gen->add_option("--part", o.part, "a, e, v1 or probe");
  gen->add_option("--c-cross", o.c_cross, "Tightness cross weight");
  gen->add_option("--c-submult", o.c_submult, "Tightness submultiplicative weight");
  gen->add_option("--matrix-format", o.matrix_format, "csv or binary");
  common(gen);

  auto* bound = app.add_subcommand("bound", "Evaluate the 2,inf bound for A + E");
  bound->add_option("--a", o.a_path, "Matrix A")->required();
  bound->add_option("--e", o.e_path, "Perturbation E")->required();
  bound->add_option("--r", o.r, "Subspace dimension")->required();
  bound->add_option("--format", o.format, "json or csv");
  bound->add_flag("--observe", o.observe, "Also compute the observed error");
  bound->add_flag("--corollary", o.corollary, "Use the two-term infinity-norm variant");
  common(bound);

  auto* newton = app.add_subcommand("newton", "Run the Newton subspace iteration");
  newton->add_option("--a", o.a_path, "Matrix A")->required();
  newton->add_option("--e", o.e_path, "Perturbation E")->required();
  newton->add_option("--r", o.r, "Subspace dimension")->required();
  newton->add_option("--tol", o.tol, "Relative residual tolerance");
  newton->add_option("--max-iters", o.max_iters, "Iteration cap");
  newton->add_flag("--check-certificate", o.check_certificate, "Fail if the convergence certificate is invalid");
  newton->add_option("--part", o.part, "xhat, yhat or v1hat");
  newton->add_option("--matrix-format", o.matrix_format, "csv or binary");
  common(newton);

  auto* sep = app.add_subcommand("sep", "Separation diagnostics");
  sep->add_option("--a", o.a_path, "Matrix A")->required();
  sep->add_option("--r", o.r, "Subspace dimension")->required();
  sep->add_option("--probe", o.probe_path, "Candidate Z in ran(V2) for the upper probe");
  sep->add_option("--format", o.format, "json");
  common(sep);

  auto* sweep = app.add_subcommand("sweep", "Run an experiment sweep");
  sweep->add_option("--preset", o.preset, "fig1, fig2a, fig2b, fig3a, fig3b or sep-example");
  sweep->add_option("--config", o.config_path, "JSON sweep description");
  sweep->add_option("--family", o.family, "Instance family");
  sweep->add_option("--trials", o.trials, "Trials per n");
  sweep->add_option("--n-list", o.n_list, "Comma-separated dimensions")->delimiter(',');
  sweep->add_option("--sigma", o.sigma, "Fixed noise level");
  sweep->add_option("--sigma-exp", o.sigma_exp, "Noise level n^-p");
  sweep->add_option("--c-cross", o.c_cross, "Tightness cross weight");
  sweep->add_option("--c-submult", o.c_submult, "Tightness submultiplicative weight");
  sweep->add_flag("--svg", o.svg, "Also write an SVG plot");
  sweep->add_option("--out", o.out, "Output stem (default: preset name)");
  sweep->add_option("--seed", o.seed, "Base seed");

  auto* plot = app.add_subcommand("plot", "Render an SVG from a sweep CSV");
  plot->add_option("--in", o.in_path, "Sweep CSV")->required();
  plot->add_option("--family", o.family, "Family, selects the curves");
  plot->add_option("--out", o.out, "SVG path (default stdout)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << toolkit_version() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (*gen) return cmd_gen(o, out, err);
    if (*bound) return cmd_bound(o, out, err);
    if (*newton) return cmd_newton(o, out, err);
    if (*sep) return cmd_sep(o, out, err);
    if (*sweep) return cmd_sweep(o, out, err);
    if (*plot) return cmd_plot(o, out, err);
  } catch (const CertificateError& e) {
    err << "error: " << e.what() << "\n";
    return kAssumptionsFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace spb::cli
