#include "physlearn/analog.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "physlearn/errors.hpp"
#include "physlearn/parallel.hpp"

namespace physlearn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

void OscillatorParams::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw InputError("mass must be positive");
  if (!(stiffness >= 0.0) || !std::isfinite(stiffness)) throw InputError("stiffness must be nonnegative");
  if (!(friction >= 0.0) || !std::isfinite(friction)) throw InputError("friction must be nonnegative");
}

double OscillatorParams::natural_frequency() const { return std::sqrt(stiffness / mass); }

ForceSignal::ForceSignal(Sinusoid s) : kind_(s) {
  if (!std::isfinite(s.amplitude) || !std::isfinite(s.omega) || !std::isfinite(s.phase)) {
    throw InputError("sinusoid parameters must be finite");
  }
}

ForceSignal::ForceSignal(SampledSignal s) : kind_(std::move(s)) {
  const auto& sampled = std::get<SampledSignal>(kind_);
  if (!(sampled.dt > 0.0)) throw InputError("sampled signal dt must be positive");
  if (sampled.values.empty()) throw InputError("sampled signal needs at least one sample");
  for (double v : sampled.values)
    if (!std::isfinite(v)) throw InputError("sampled signal contains non-finite values");
}

ForceSignal::ForceSignal(ConstantSignal c) : kind_(c) {
  if (!std::isfinite(c.value)) throw InputError("constant signal must be finite");
}

double ForceSignal::operator()(double t) const {
  struct Eval {
    double t;
    double operator()(const Sinusoid& s) const { return s.amplitude * std::cos(s.omega * t + s.phase); }
    double operator()(const ConstantSignal& c) const { return c.value; }
    double operator()(const SampledSignal& s) const {
      const double pos = t / s.dt;
      if (pos <= 0.0) return s.values.front();
      const auto i = static_cast<std::size_t>(pos);
      if (i + 1 >= s.values.size()) return s.values.back();
      const double w = pos - static_cast<double>(i);
      return (1.0 - w) * s.values[i] + w * s.values[i + 1];
    }
  };
  return std::visit(Eval{t}, kind_);
}

bool ForceSignal::is_zero() const {
  struct Zero {
    bool operator()(const Sinusoid& s) const { return s.amplitude == 0.0; }
    bool operator()(const ConstantSignal& c) const { return c.value == 0.0; }
    bool operator()(const SampledSignal& s) const {
      return std::all_of(s.values.begin(), s.values.end(), [](double v) { return v == 0.0; });
    }
  };
  return std::visit(Zero{}, kind_);
}

double net_power(double force, double velocity, double friction) {
  return force * velocity - friction * velocity * velocity;
}

double mechanical_energy(const OscillatorParams& params, double x, double v) {
  return 0.5 * params.mass * v * v + 0.5 * params.stiffness * x * x;
}

double default_dt(const OscillatorParams& params, double drive_omega) {
  const double w = std::max(params.natural_frequency(), std::abs(drive_omega));
  if (!(w > 0.0)) throw InputError("default_dt needs a nonzero natural or drive frequency");
  return kTwoPi / w / 1000.0;
}

PowerTrace simulate(const OscillatorParams& params, const ForceSignal& force, double x0, double v0,
                    double dt, double duration) {
  params.validate();
  if (!(dt > 0.0)) throw InputError("dt must be positive");
  if (!(duration >= dt)) throw InputError("duration must be at least dt");
  if (!std::isfinite(x0) || !std::isfinite(v0)) throw InputError("initial state must be finite");

  const auto steps = static_cast<std::size_t>(std::floor(duration / dt * (1.0 + 1e-12)));
  const double m = params.mass, k = params.stiffness, g = params.friction;

  using State = std::array<double, 3>;  // x, v, e_net
  auto deriv = [&](double t, const State& s) -> State {
    const double f = force(t);
    return {s[1], (f - k * s[0] - g * s[1]) / m, net_power(f, s[1], g)};
  };

  PowerTrace tr;
  const std::size_t n = steps + 1;
  for (auto* col : {&tr.t, &tr.x, &tr.v, &tr.f, &tr.p_in, &tr.p_out, &tr.e_net}) col->reserve(n);
  auto record = [&](double t, const State& s) {
    const double f = force(t);
    tr.t.push_back(t);
    tr.x.push_back(s[0]);
    tr.v.push_back(s[1]);
    tr.f.push_back(f);
    tr.p_in.push_back(f * s[1]);
    tr.p_out.push_back(g * s[1] * s[1]);
    tr.e_net.push_back(s[2]);
  };

  State s{x0, v0, 0.0};
  record(0.0, s);
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    const State k1 = deriv(t, s);
    State tmp;
    for (int j = 0; j < 3; ++j) tmp[j] = s[j] + 0.5 * dt * k1[j];
    const State k2 = deriv(t + 0.5 * dt, tmp);
    for (int j = 0; j < 3; ++j) tmp[j] = s[j] + 0.5 * dt * k2[j];
    const State k3 = deriv(t + 0.5 * dt, tmp);
    for (int j = 0; j < 3; ++j) tmp[j] = s[j] + dt * k3[j];
    const State k4 = deriv(t + dt, tmp);
    for (int j = 0; j < 3; ++j) s[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    if (!std::isfinite(s[0]) || !std::isfinite(s[1]) || !std::isfinite(s[2])) {
      throw NumericalError("oscillator state became non-finite at step " + std::to_string(i + 1));
    }
    record(static_cast<double>(i + 1) * dt, s);
  }
  return tr;
}

SteadyState analytic_steady_state(const OscillatorParams& params, double amplitude, double omega) {
  params.validate();
  const double detune = params.stiffness - params.mass * omega * omega;
  const double damping = params.friction * omega;
  if (detune == 0.0 && damping == 0.0) {
    if (omega == 0.0 && params.stiffness > 0.0) return {};
    throw InputError("undamped oscillator driven exactly at resonance has no bounded steady state");
  }
  SteadyState s;
  s.velocity_amplitude = std::abs(amplitude) * std::abs(omega) / std::hypot(detune, damping);
  // v = V cos(omega t + phase): the velocity leads the force by atan2(k - m w^2, gamma w).
  s.phase = std::atan2(detune, damping);
  s.mean_power = 0.5 * params.friction * s.velocity_amplitude * s.velocity_amplitude;
  return s;
}

double mean_absorbed_power(const PowerTrace& trace, double fraction) {
  if (trace.size() < 2) throw InputError("trace too short");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw InputError("fraction must be in (0, 1]");
  // Samples [first, steps) cover the trailing fraction of the integration
  // interval with one sample per step.
  const std::size_t steps = trace.size() - 1;
  const auto window = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(steps))));
  double sum = 0.0;
  for (std::size_t i = steps - window; i < steps; ++i) sum += trace.p_in[i];
  return sum / static_cast<double>(window);
}

ResonanceResidual resonance_residual(const PowerTrace& trace, const ForceSignal& force,
                                     double friction) {
  if (!(friction > 0.0)) throw InputError("resonance residual needs friction > 0");
  if (trace.size() < 2) throw InputError("trace too short");
  const std::size_t steps = trace.size() - 1;
  const std::size_t first = steps - steps / 2;
  double diff2 = 0.0, ref2 = 0.0, v2 = 0.0;
  for (std::size_t i = first; i < steps; ++i) {
    const double target = force(trace.t[i]) / friction;
    diff2 += (trace.v[i] - target) * (trace.v[i] - target);
    ref2 += target * target;
    v2 += trace.v[i] * trace.v[i];
  }
  const double count = static_cast<double>(steps - first);
  if (ref2 == 0.0) return {std::sqrt(v2 / count) * friction, true};
  return {std::sqrt(diff2 / ref2), false};
}

SweepPoint steady_state_point(const OscillatorParams& params, double amplitude, double omega,
                              const SweepOptions& options) {
  params.validate();
  if (!(params.friction > 0.0)) throw InputError("frequency sweep needs friction > 0");
  if (!(omega > 0.0)) throw InputError("sweep frequencies must be positive");
  if (options.steps_per_period == 0) throw InputError("steps_per_period must be positive");
  const double drive_period = kTwoPi / omega;
  const double w0 = params.natural_frequency();
  const double fastest_period = w0 > 0.0 ? std::min(drive_period, kTwoPi / w0) : drive_period;
  const auto steps_per_drive = static_cast<std::size_t>(
      std::ceil(options.steps_per_period * drive_period / fastest_period - 1e-9));
  const double settle = options.settle_damping_times * params.mass / params.friction;
  const auto periods = std::max<std::size_t>(options.min_window_periods,
                                             static_cast<std::size_t>(std::ceil(settle / drive_period)));
  const double dt = drive_period / static_cast<double>(steps_per_drive);
  const double duration = 2.0 * static_cast<double>(periods) * drive_period;

  const ForceSignal force(Sinusoid{amplitude, omega, 0.0});
  const auto trace = simulate(params, force, 0.0, 0.0, dt, duration);
  SweepPoint p;
  p.omega = omega;
  p.mean_power_sim = mean_absorbed_power(trace, 0.5);
  p.mean_power_analytic = analytic_steady_state(params, amplitude, omega).mean_power;
  p.residual = resonance_residual(trace, force, params.friction).value;
  return p;
}

std::vector<SweepPoint> frequency_sweep(const OscillatorParams& params, double amplitude,
                                        const std::vector<double>& omegas,
                                        const SweepOptions& options) {
  return parallel_map(omegas.size(), options.threads, [&](std::size_t i) {
    return steady_state_point(params, amplitude, omegas[i], options);
  });
}

}  // namespace physlearn
