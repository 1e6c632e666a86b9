#include "spb/presets.hpp"

#include "spb/errors.hpp"

namespace spb {

namespace {

std::vector<long> powers_of_two(long from, long to) {
  std::vector<long> out;
  for (long n = from; n <= to; n *= 2) out.push_back(n);
  return out;
}

SweepConfig gaussian(Family family, double exponent) {
  SweepConfig c;
  c.family = family;
  c.n_values = powers_of_two(256, 4096);
  c.sigma_rule = SigmaRule::power(exponent);
  c.trials = 30;
  c.seed = 20240601;
  return c;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig1",  "fig2a", "fig2b",
                                              "fig3a", "fig3b", "sep-example"};
  return names;
}

SweepConfig preset(const std::string& name) {
  if (name == "fig1") {
    SweepConfig c;
    c.family = Family::Tightness;
    c.n_values = powers_of_two(16, 4096);
    c.trials = 1;
    c.c_cross = 0.2;
    c.c_submult = 0.3;
    return c;
  }
  if (name == "fig2a") return gaussian(Family::LowRank, 1.0);
  if (name == "fig2b") return gaussian(Family::LowRank, 0.75);
  if (name == "fig3a") return gaussian(Family::Coherent, 1.0);
  if (name == "fig3b") return gaussian(Family::Coherent, 0.75);
  if (name == "sep-example") {
    SweepConfig c;
    c.family = Family::SepExample;
    c.n_values = powers_of_two(4, 1024);
    c.sigma_rule = SigmaRule::power(1.0, 0.05);
    c.trials = 30;
    c.seed = 20240602;
    return c;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace spb
