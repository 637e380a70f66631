#pragma once

#include <cstdint>
#include <random>

namespace physlearn {

// All randomness in the library flows through this engine. std::mt19937_64
// has a fixed output sequence per seed on every platform; the distributions
// below are written out by hand because the standard ones are not.
using Rng = std::mt19937_64;

// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

inline bool random_bit(Rng& rng) { return (rng() >> 63) != 0; }

// Standard normal via Box-Muller (one draw per call; the sine branch is
// discarded so the stream position is simple to reason about).
double standard_normal(Rng& rng);

// Log-uniform in [lo, hi]; lo == hi returns lo. Requires 0 < lo <= hi.
double log_uniform(Rng& rng, double lo, double hi);

}  // namespace physlearn
