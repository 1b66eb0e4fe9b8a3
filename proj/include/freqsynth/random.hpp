#pragma once

#include <cstdint>
#include <random>

namespace freqsynth {

// Deterministic random stream. Distribution transforms are written out here
// rather than taken from <random> so that draws are identical across
// standard library implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  // Independent stream for task `index` of a computation seeded with `seed`.
  static Rng derive(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  // Exponential with the given scale (mean).
  double exponential(double scale);

  double normal();

private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

} // namespace freqsynth
