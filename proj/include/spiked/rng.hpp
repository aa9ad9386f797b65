#pragma once

#include <cmath>
#include <cstdint>

namespace spiked {

// splitmix64; fully specified so seeded runs are byte-identical everywhere.
struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next_u64() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // standard normal via Box-Muller, spare cached
  double normal() {
    if (has_spare) {
      has_spare = false;
      return spare;
    }
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 6.283185307179586476925286766559 * u2;
    spare = r * std::sin(th);
    has_spare = true;
    return r * std::cos(th);
  }

  double spare = 0.0;
  bool has_spare = false;
};

// Stable per-stream seed derivation (seed, stream) -> sub-seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  Rng r(seed ^ (0xD1B54A32D192ED03ULL * (stream + 0x9E3779B97F4A7C15ULL)));
  return r.next_u64();
}

}  // namespace spiked
