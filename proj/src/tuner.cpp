#include "physlearn/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "physlearn/errors.hpp"

namespace physlearn {

void TunerConfig::validate() const {
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) throw InputError("sigma0 must be positive");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw InputError("beta must be nonnegative");
  if (!(window >= 1.0) || !std::isfinite(window)) throw InputError("window must be at least 1");
  if (budget < 0) throw InputError("budget must be nonnegative");
}

double reflect_into(double x, const ParamBound& b) {
  if (!(b.lower <= b.upper)) throw InputError("parameter bound has lower > upper");
  if (b.lower == b.upper) return b.lower;
  if (std::isinf(b.lower) && std::isinf(b.upper)) return x;
  if (std::isinf(b.upper)) return x < b.lower ? 2.0 * b.lower - x : x;
  if (std::isinf(b.lower)) return x > b.upper ? 2.0 * b.upper - x : x;
  if (x >= b.lower && x <= b.upper) return x;
  const double width = b.upper - b.lower;
  if (x > b.upper && x - b.upper <= width) return 2.0 * b.upper - x;
  if (x < b.lower && b.lower - x <= width) return 2.0 * b.lower - x;
  // Unfold onto a circle of circumference twice the width.
  double r = std::fmod(x - b.lower, 2.0 * width);
  if (r < 0.0) r += 2.0 * width;
  return r <= width ? b.lower + r : b.upper - (r - width);
}

double braked_sigma(const TunerConfig& cfg, double p_bar) {
  return cfg.sigma0 / (1.0 + cfg.beta * std::max(p_bar, 0.0));
}

TunerState initial_tuner_state(std::vector<double> theta0, const TunerConfig& cfg) {
  cfg.validate();
  if (theta0.empty()) throw InputError("theta0 must have at least one coordinate");
  TunerState s;
  s.theta = std::move(theta0);
  s.best_theta = s.theta;
  s.sigma_eff = cfg.sigma0;
  s.rng.seed(cfg.seed);
  return s;
}

namespace {

void explore(TunerState& s, const std::vector<ParamBound>& bounds) {
  if (!bounds.empty() && bounds.size() != s.theta.size()) {
    throw InputError("expected " + std::to_string(s.theta.size()) + " bounds, got " +
                     std::to_string(bounds.size()));
  }
  for (std::size_t i = 0; i < s.theta.size(); ++i) {
    const double next = s.theta[i] + uniform(s.rng, -s.sigma_eff, s.sigma_eff);
    s.theta[i] = bounds.empty() ? next : reflect_into(next, bounds[i]);
  }
}

}  // namespace

TunerState tuner_step(const TunerState& state, const TunerConfig& cfg, double measured_power,
                      const std::vector<ParamBound>& bounds) {
  if (!std::isfinite(measured_power)) throw InputError("measured power must be finite");
  TunerState s = state;
  if (measured_power > s.best_power) {
    s.best_power = measured_power;
    s.best_theta = s.theta;
  }
  s.p_bar = s.measurements == 0 ? measured_power : s.p_bar + (measured_power - s.p_bar) / cfg.window;
  ++s.measurements;
  s.sigma_eff = braked_sigma(cfg, s.p_bar);
  explore(s, bounds);
  return s;
}

TuneResult tune(const Plant& plant, const std::vector<double>& theta0, const TunerConfig& cfg) {
  if (!plant.power) throw InputError("plant has no power oracle");
  TunerState s = initial_tuner_state(theta0, cfg);
  TuneResult r;
  if (cfg.budget == 0) {
    r.best_theta = theta0;
    r.best_power = plant.power(theta0);
    return r;
  }
  for (long long step = 0; step < cfg.budget; ++step) {
    const double p = plant.power(s.theta);
    if (!std::isfinite(p)) {
      r.skipped.push_back(step);
      explore(s, plant.bounds);
      continue;
    }
    TuneRecord rec{step, s.theta, p, s.sigma_eff, p > s.best_power};
    s = tuner_step(s, cfg, p, plant.bounds);
    r.history.push_back(std::move(rec));
  }
  r.best_theta = s.best_theta;
  r.best_power = s.best_power;
  return r;
}

Plant oscillator_plant(const OscillatorPlantOptions& o) {
  if (!(o.min_stiffness > 0.0 && o.min_stiffness <= o.max_stiffness)) {
    throw InputError("stiffness bounds must satisfy 0 < min <= max");
  }
  Plant plant;
  plant.bounds = {{std::log(o.min_stiffness), std::log(o.max_stiffness)}};
  plant.power = [o](const std::vector<double>& theta) {
    const OscillatorParams p{o.mass, std::exp(theta.at(0)), o.friction};
    if (!o.simulated) return analytic_steady_state(p, o.amplitude, o.omega).mean_power;
    return steady_state_point(p, o.amplitude, o.omega, o.sim).mean_power_sim;
  };
  return plant;
}

}  // namespace physlearn
