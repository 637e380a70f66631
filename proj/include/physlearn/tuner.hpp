#pragma once

// Noise-driven tuner: a seeded random walk over plant parameters whose step
// scale shrinks as the smoothed extracted power grows.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "physlearn/analog.hpp"
#include "physlearn/random.hpp"

namespace physlearn {

struct TunerConfig {
  double sigma0 = 0.1;
  double beta = 0.0;     // 1/W
  double window = 10.0;  // evaluations
  long long budget = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ParamBound {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

// Folds x back into [lower, upper] by mirror reflection at the bounds.
double reflect_into(double x, const ParamBound& bound);

struct TunerState {
  std::vector<double> theta;
  double sigma_eff = 0.0;
  double p_bar = 0.0;
  std::vector<double> best_theta;
  double best_power = -std::numeric_limits<double>::infinity();
  long long measurements = 0;  // finite powers folded into p_bar
  Rng rng;

  friend bool operator==(const TunerState&, const TunerState&) = default;
};

TunerState initial_tuner_state(std::vector<double> theta0, const TunerConfig& cfg);

// Braking law sigma0 / (1 + beta max(p_bar, 0)).
double braked_sigma(const TunerConfig& cfg, double p_bar);

// One tuner update with the power measured at state.theta. The first
// measurement seeds p_bar directly. `bounds` is empty (unbounded) or has one
// entry per coordinate.
TunerState tuner_step(const TunerState& state, const TunerConfig& cfg, double measured_power,
                      const std::vector<ParamBound>& bounds = {});

struct Plant {
  std::function<double(const std::vector<double>&)> power;  // W
  std::vector<ParamBound> bounds;                          // one per coordinate
};

struct TuneRecord {
  long long step = 0;
  std::vector<double> theta;
  double power = 0.0;
  double sigma_eff = 0.0;
  bool is_incumbent = false;
};

struct TuneResult {
  std::vector<double> best_theta;
  double best_power = -std::numeric_limits<double>::infinity();
  std::vector<TuneRecord> history;
  std::vector<long long> skipped;  // steps whose evaluation was non-finite
};

// budget x {evaluate plant, tuner_step}. Non-finite evaluations are skipped:
// the walk still moves with the current step scale but p_bar and the
// incumbent are untouched.
TuneResult tune(const Plant& plant, const std::vector<double>& theta0, const TunerConfig& cfg);

struct OscillatorPlantOptions {
  double mass = 1.0;
  double friction = 0.5;
  double amplitude = 1.0;
  double omega = 1.0;
  double min_stiffness = 0.25;
  double max_stiffness = 4.0;
  bool simulated = true;  // false: closed-form steady state
  SweepOptions sim;
};

// theta = {ln k_spring}; power is the steady-state mean absorbed power at the
// fixed drive frequency.
Plant oscillator_plant(const OscillatorPlantOptions& options);

}  // namespace physlearn
