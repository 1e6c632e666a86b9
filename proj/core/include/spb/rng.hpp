#pragma once

#include <array>
#include <cstdint>

namespace spb {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key);
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

// Random access into the stream keyed by (seed, substream). Values at a given
// index never depend on how many values were drawn before, so parallel
// consumers stay reproducible.
class SeededRng {
 public:
  static constexpr const char* algorithm = "philox4x32-10";

  explicit SeededRng(std::uint64_t seed, std::uint64_t substream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t substream() const { return substream_; }

  // lane 0 feeds uniforms, lane 1 feeds normals.
  Philox4x32::Counter block(std::uint64_t index, std::uint32_t lane) const;

  double uniform_at(std::uint64_t index) const;  // in (0, 1)
  double normal_at(std::uint64_t index) const;
  // Both Box-Muller outputs of block `pair`, i.e. normal_at(2*pair) and
  // normal_at(2*pair + 1).
  std::array<double, 2> normal_pair(std::uint64_t pair) const;

  double uniform() { return uniform_at(next_uniform_++); }
  double normal() { return normal_at(next_normal_++); }

 private:
  std::uint64_t seed_;
  std::uint64_t substream_;
  Philox4x32::Key key_;
  std::uint64_t next_uniform_ = 0;
  std::uint64_t next_normal_ = 0;
};

}  // namespace spb
