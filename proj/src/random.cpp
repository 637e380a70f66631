#include "physlearn/random.hpp"

#include <cmath>
#include <numbers>

namespace physlearn {

double standard_normal(Rng& rng) {
  // 1 - u keeps the argument of log in (0, 1].
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double log_uniform(Rng& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

}  // namespace physlearn
