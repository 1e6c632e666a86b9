#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "spb/generators.hpp"
#include "spb/linalg.hpp"
#include "spb/newton.hpp"
#include "spb/stats.hpp"
#include "spb/sweep_record.hpp"

namespace spb {

const char* toolkit_version();

struct SigmaRule {
  enum class Kind { Fixed, Power };
  Kind kind = Kind::Fixed;
  double value = 0.0;        // sigma for Fixed, exponent p for Power
  double coefficient = 1.0;  // Power only: sigma = coefficient * n^{-p}

  static SigmaRule fixed(double sigma) { return {Kind::Fixed, sigma, 1.0}; }
  static SigmaRule power(double p, double coefficient = 1.0) { return {Kind::Power, p, coefficient}; }
  double sigma(long n) const;
};

enum class OutputKind { Csv, Json, Svg };

struct SweepConfig {
  Family family = Family::LowRank;
  std::vector<long> n_values;
  SigmaRule sigma_rule;
  int trials = 1;
  std::uint64_t seed = 1;
  std::vector<OutputKind> outputs{OutputKind::Csv, OutputKind::Json};
  // Tightness family only.
  double c_cross = 1.0;
  double c_submult = 1.0;
  // wall_time_ms stays 0 unless set, keeping output bytes reproducible.
  bool record_timing = false;
  unsigned threads = 0;  // 0 = thread_budget()
  NewtonOptions newton{1e-13, 100, false, false, SylvesterBackend::Auto};
};

// Throws ConfigError describing the first problem found.
void validate(const SweepConfig& config);

std::vector<SweepRecord> run_sweep(const SweepConfig& config);

struct ColumnStats {
  double median = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
  double mean = 0.0;
};

struct NSummary {
  long n = 0;
  int count = 0;
  std::map<std::string, ColumnStats> columns;
};

// Numeric columns summarized per n.
const std::vector<std::string>& summary_columns();
std::vector<NSummary> summarize(const std::vector<SweepRecord>& records);

// OLS of log(median) against log(n).
LineFit fit_slope(const std::vector<NSummary>& summary, const std::string& column);

struct ProjectionErrors {
  double err_on_v1 = 0.0;
  double err_on_v2 = 0.0;
};

// Splits the Procrustes-aligned error V1hat U - V1 along ran V1 and ran V2.
ProjectionErrors projection_split_errors(const SpectralSplit& split, const OrthoBasis& v1hat);
ProjectionErrors projection_split_errors(const SpectralSplit& split, const NewtonResult& newton);

std::string sweep_csv(const std::vector<SweepRecord>& records);
std::string sweep_json(const SweepConfig& config, const std::vector<SweepRecord>& records);
std::string sweep_svg(const SweepConfig& config, const std::vector<SweepRecord>& records);

// Writes <stem>.csv / .json / .svg for the requested outputs, each atomically.
std::vector<std::filesystem::path> write_sweep_outputs(const SweepConfig& config,
                                                       const std::vector<SweepRecord>& records,
                                                       const std::filesystem::path& stem);

}  // namespace spb

namespace spb {

// Parses the output of sweep_csv.
std::vector<SweepRecord> read_sweep_csv(const std::string& text);

// Reads a JSON sweep description: family, n_values, sigma {kind, ...},
// trials, seed, c_cross, c_submult, outputs.
SweepConfig sweep_config_from_json(const std::string& text);

}  // namespace spb
