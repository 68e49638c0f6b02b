#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

namespace pec {

// Named substreams so that, for one seed, the workload and the environment
// are identical regardless of which policy consumes the policy stream.
enum class Stream : std::uint64_t {
  Population = 1,
  Arrivals = 2,
  Mobility = 3,
  Network = 4,
  Policy = 5,
};

// mt19937_64 output is fixed by the standard; the distributions below are
// written out by hand so the sequences do not depend on the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, Stream stream = Stream::Population)
      : engine_(mix(seed ^ (static_cast<std::uint64_t>(stream) * 0x9E3779B97F4A7C15ULL))) {}

  std::uint64_t next() { return engine_(); }

  // [0, 1)
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

  std::size_t index(std::size_t n) {
    auto i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace pec
