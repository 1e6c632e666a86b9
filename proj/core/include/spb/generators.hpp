#pragma once

#include <cstdint>
#include <string>

#include "spb/linalg.hpp"
#include "spb/rng.hpp"

namespace spb {

enum class Family { LowRank, Coherent, Tightness, SepExample };
const char* to_string(Family f);
Family family_from_string(const std::string& s);

struct InstanceSpec {
  Family family = Family::LowRank;
  Index n = 0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

// A together with its exact spectral split (the split owns A).
struct Instance {
  SpectralSplit split;
  const SymMatrix& a() const { return split.a(); }
};

// A = V1 V1^T with V1 = [1, 1_pm] / sqrt(n).
Instance gen_low_rank(Index n);

// A = 4 V1 V1^T + v2 v2^T with v2 = e1 - e2.
Instance gen_coherent(Index n);

// (n+1) x (n+1): A = 2 v1 v1^T + [e1 v2] [[0,1],[1,0]] [e1 v2]^T.
Instance gen_sep_example(Index n);

// Upper triangle iid N(0, sigma^2) including the diagonal, mirrored.
SymMatrix gen_gaussian_perturbation(Index n, double sigma, const SeededRng& rng);

struct TightnessInstance {
  SpectralSplit split;
  SymMatrix e;
  const SymMatrix& a() const { return split.a(); }
};

// r = 1, A = 1 1^T / n. E = n^{-1/3} (c_submult N / ||N||_2 + c_cross (b v1^T + v1 b^T))
// where N = P2 (e1 1_pm^T + 1_pm e1^T) P2 / sqrt(n) and b is the unit vector
// along P2 (I - M) y for the y with y_1 = 1 solving (I - M) y ~ 0 off e1.
TightnessInstance gen_tightness_example(Index n, double c_cross = 1.0, double c_submult = 1.0);

}  // namespace spb
