#include <doctest.h>

#include <cmath>
#include <vector>

#include "physlearn/errors.hpp"
#include "physlearn/random.hpp"
#include "physlearn/tuner.hpp"

using namespace physlearn;

namespace {

Plant constant_plant(double value, std::size_t dims) {
  Plant p;
  p.power = [value](const std::vector<double>&) { return value; };
  p.bounds.assign(dims, ParamBound{});
  return p;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS_AS((TunerConfig{0.0, 0.0, 10, 1, 0}).validate(), InputError);
  CHECK_THROWS_AS((TunerConfig{0.1, -1.0, 10, 1, 0}).validate(), InputError);
  CHECK_THROWS_AS((TunerConfig{0.1, 0.0, 0.5, 1, 0}).validate(), InputError);
  CHECK_THROWS_AS((TunerConfig{0.1, 0.0, 10, -1, 0}).validate(), InputError);
  CHECK_NOTHROW((TunerConfig{0.1, 0.0, 1, 0, 0}).validate());
}

TEST_CASE("reflection at bounds") {
  const ParamBound b{0.0, 1.0};
  CHECK(reflect_into(0.5, b) == 0.5);
  CHECK(reflect_into(1.25, b) == doctest::Approx(0.75));
  CHECK(reflect_into(-0.25, b) == doctest::Approx(0.25));
  CHECK(reflect_into(2.5, b) == doctest::Approx(0.5));
  CHECK(reflect_into(-1.75, b) == doctest::Approx(0.25));
  CHECK(reflect_into(5.0, ParamBound{2.0, 2.0}) == 2.0);
  CHECK(reflect_into(-3.0, ParamBound{0.0, INFINITY}) == 3.0);
  CHECK(reflect_into(-3.0, ParamBound{}) == -3.0);
}

TEST_CASE("braking law") {
  const TunerConfig off{0.1, 0.0, 10, 0, 0};
  CHECK(braked_sigma(off, 1e9) == 0.1);
  const TunerConfig on{0.1, 2.0, 10, 0, 0};
  CHECK(braked_sigma(on, -5.0) == 0.1);
  CHECK(braked_sigma(on, 1e300) < 1e-299);
  double previous = INFINITY;
  for (double p = 0.0; p < 100.0; p += 0.37) {
    const double s = braked_sigma(on, p);
    CHECK(s <= previous);
    CHECK(s <= on.sigma0);
    previous = s;
  }
}

TEST_CASE("tuner_step examples") {
  const TunerConfig cfg{0.1, 1.0, 4, 0, 11};
  const auto s0 = initial_tuner_state({0.0, 1.0}, cfg);
  const auto s1 = tuner_step(s0, cfg, 2.0);
  CHECK(s1.p_bar == 2.0);
  CHECK(s1.sigma_eff == doctest::Approx(0.1 / 3.0));
  CHECK(s1.best_power == 2.0);
  CHECK(s1.best_theta == s0.theta);
  CHECK(std::abs(s1.theta[0] - s0.theta[0]) <= s1.sigma_eff);
  const auto s2 = tuner_step(s1, cfg, 6.0);
  CHECK(s2.p_bar == doctest::Approx(3.0));
  CHECK(s2.best_theta == s1.theta);
  const auto s3 = tuner_step(s2, cfg, 1.0);
  CHECK(s3.best_power == 6.0);
  CHECK(s3.best_theta == s1.theta);

  CHECK(tuner_step(s0, cfg, 2.0) == s1);
  CHECK_THROWS_AS(tuner_step(s0, cfg, NAN), InputError);
  CHECK_THROWS_AS(tuner_step(s0, cfg, 1.0, {ParamBound{}}), InputError);
}

TEST_CASE("with the brake off the walk is a plain seeded random walk") {
  const TunerConfig cfg{0.2, 0.0, 10, 500, 99};
  Plant hill;
  hill.power = [](const std::vector<double>& t) { return 10.0 - t[0] * t[0] - t[1] * t[1]; };
  const auto r = tune(hill, {1.0, -1.0}, cfg);
  REQUIRE(r.history.size() == 500);

  Rng rng(99);
  std::vector<double> theta{1.0, -1.0};
  for (const auto& rec : r.history) {
    CHECK(rec.theta == theta);
    CHECK(rec.sigma_eff == 0.2);
    for (double& x : theta) x += uniform(rng, -0.2, 0.2);
  }
}

TEST_CASE("incumbent never decreases and marks improvements") {
  const TunerConfig cfg{0.3, 0.5, 5, 400, 3};
  Plant bumpy;
  bumpy.power = [](const std::vector<double>& t) { return std::sin(3 * t[0]) + std::cos(t[0]); };
  const auto r = tune(bumpy, {0.0}, cfg);
  double best = -INFINITY;
  for (const auto& rec : r.history) {
    CHECK(rec.is_incumbent == (rec.power > best));
    best = std::max(best, rec.power);
  }
  CHECK(r.best_power == best);
}

TEST_CASE("budget zero returns the start point") {
  Plant p;
  p.power = [](const std::vector<double>& t) { return 2.0 * t[0]; };
  const auto r = tune(p, {1.5}, TunerConfig{0.1, 0.0, 10, 0, 1});
  CHECK(r.best_theta == std::vector<double>{1.5});
  CHECK(r.best_power == 3.0);
  CHECK(r.history.empty());
}

TEST_CASE("non-finite evaluations are skipped and logged") {
  Plant p;
  int calls = 0;
  p.power = [&calls](const std::vector<double>&) { return (calls++ % 3 == 1) ? NAN : 1.0; };
  const auto r = tune(p, {0.0}, TunerConfig{0.1, 0.0, 10, 30, 1});
  CHECK(r.skipped.size() == 10);
  CHECK(r.history.size() == 20);
  CHECK(r.skipped.front() == 1);
}

TEST_CASE("flat landscape walk variance follows the uniform step law") {
  const double sigma0 = 0.1;
  const long long n = 400;
  const int seeds = 400;
  double sum_sq = 0.0;
  for (int s = 0; s < seeds; ++s) {
    TunerConfig cfg{sigma0, 1.0, 10, n + 1, static_cast<std::uint64_t>(s)};
    const auto r = tune(constant_plant(3.0, 1), {0.0}, cfg);
    // Constant power keeps the brake at sigma0 / (1 + beta * 3).
    const double x = r.history.back().theta[0];
    sum_sq += x * x;
  }
  const double sigma = sigma0 / 4.0;
  const double expected = static_cast<double>(n) * sigma * sigma / 3.0;
  const double var = sum_sq / seeds;
  // Sample variance of a Gaussian sum has relative spread sqrt(2 / seeds).
  CHECK(std::abs(var / expected - 1.0) <= 3.0 * std::sqrt(2.0 / seeds));
}

TEST_CASE("fixed seed gives identical runs") {
  OscillatorPlantOptions o;
  o.simulated = false;
  const auto plant = oscillator_plant(o);
  const TunerConfig cfg{0.1, 0.5, 10, 300, 5};
  const auto a = tune(plant, {std::log(4.0)}, cfg);
  const auto b = tune(plant, {std::log(4.0)}, cfg);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].theta == b.history[i].theta);
    CHECK(a.history[i].power == b.history[i].power);
  }
}

TEST_CASE("tuning the closed-form oscillator finds resonance") {
  OscillatorPlantOptions o;
  o.simulated = false;
  const auto plant = oscillator_plant(o);
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto r = tune(plant, {std::log(4.0)}, TunerConfig{0.1, 0.5, 10, 2000, seed});
    for (const auto& rec : r.history) {
      CHECK(rec.theta[0] >= std::log(0.25) - 1e-12);
      CHECK(rec.theta[0] <= std::log(4.0) + 1e-12);
    }
    if (std::abs(std::sqrt(std::exp(r.best_theta[0])) - 1.0) <= 0.05) ++hits;
  }
  CHECK(hits >= 19);
}
