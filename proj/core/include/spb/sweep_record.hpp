#pragma once

#include <cstdint>

namespace spb {

// One (n, trial) row of an experiment sweep.
struct SweepRecord {
  long n = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double err_2inf = 0.0;
  double err_frob = 0.0;
  double bound_total = 0.0;
  double term_quadratic = 0.0;
  double term_cross = 0.0;
  double term_submult = 0.0;
  double dk_reference = 0.0;
  double gap_used = 0.0;
  bool assumptions_ok = false;
  int newton_iters = 0;
  double wall_time_ms = 0.0;
  double err_on_v1 = 0.0;
  double err_on_v2 = 0.0;
};

}  // namespace spb
