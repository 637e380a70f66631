#pragma once

// Analog resonance: a driven damped harmonic oscillator
//
//   m x'' = -k x - gamma x' + f(t)
//
// whose mechanical energy E = m v^2 / 2 + k x^2 / 2 changes at the rate
// dE/dt = f v - gamma v^2. Net intake is zero exactly at v = f / gamma and
// maximal at v = f / (2 gamma).

#include <cstddef>
#include <variant>
#include <vector>

namespace physlearn {

struct OscillatorParams {
  double mass = 1.0;       // kg
  double stiffness = 1.0;  // N/m
  double friction = 0.0;   // kg/s

  // Throws InputError unless mass > 0, stiffness >= 0, friction >= 0.
  void validate() const;
  // sqrt(k / m); zero for a free mass.
  double natural_frequency() const;
};

struct OscillatorState {
  double x = 0.0;  // m
  double v = 0.0;  // m/s
  double t = 0.0;  // s
};

struct Sinusoid {
  double amplitude = 1.0;  // N (A when used as a current drive)
  double omega = 1.0;      // rad/s
  double phase = 0.0;      // rad; f(t) = amplitude cos(omega t + phase)
};

// Samples held on a uniform grid; linear interpolation between samples and
// the last sample held beyond the end.
struct SampledSignal {
  std::vector<double> values;
  double dt = 1.0;
};

struct ConstantSignal {
  double value = 0.0;
};

class ForceSignal {
 public:
  ForceSignal(Sinusoid s);
  ForceSignal(SampledSignal s);
  ForceSignal(ConstantSignal c);

  double operator()(double t) const;
  bool is_zero() const;
  const std::variant<Sinusoid, SampledSignal, ConstantSignal>& kind() const { return kind_; }

 private:
  std::variant<Sinusoid, SampledSignal, ConstantSignal> kind_;
};

// Per-sample record on the integration grid t_i = t0 + i dt.
struct PowerTrace {
  std::vector<double> t, x, v, f;
  std::vector<double> p_in;   // f v
  std::vector<double> p_out;  // gamma v^2
  std::vector<double> e_net;  // integral of p_in - p_out, integrated with the state

  std::size_t size() const { return t.size(); }
  double dt() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
};

double net_power(double force, double velocity, double friction);

double mechanical_energy(const OscillatorParams& params, double x, double v);

// dt = min(2 pi / omega0, 2 pi / omega_drive) / 1000; either frequency may be
// zero (ignored).
double default_dt(const OscillatorParams& params, double drive_omega);

// Fixed-step RK4 over the augmented state (x, v, e_net). The trace holds
// floor(duration / dt) + 1 samples including the initial state.
PowerTrace simulate(const OscillatorParams& params, const ForceSignal& force, double x0, double v0,
                    double dt, double duration);

struct SteadyState {
  double velocity_amplitude = 0.0;  // m/s
  double phase = 0.0;               // rad, velocity relative to force
  double mean_power = 0.0;          // W
};

// Closed-form periodic response to amplitude cos(omega t).
SteadyState analytic_steady_state(const OscillatorParams& params, double amplitude, double omega);

// Mean of p_in over the trailing `fraction` of the trace's steps.
double mean_absorbed_power(const PowerTrace& trace, double fraction = 0.5);

struct ResonanceResidual {
  double value = 0.0;
  // Set when the force is identically zero; value is then RMS(v) gamma,
  // unnormalized.
  bool zero_force = false;
};

// RMS of v - f / gamma over the trailing half of the trace, relative to the
// RMS of f / gamma.
ResonanceResidual resonance_residual(const PowerTrace& trace, const ForceSignal& force,
                                     double friction);

struct SweepOptions {
  double settle_damping_times = 20.0;  // first half of each run spans >= this many m / gamma
  unsigned steps_per_period = 1000;    // per period of the faster of drive and oscillator
  unsigned min_window_periods = 4;     // trailing window spans >= this many drive periods
  unsigned threads = 1;
};

struct SweepPoint {
  double omega = 0.0;
  double mean_power_sim = 0.0;
  double mean_power_analytic = 0.0;
  double residual = 0.0;
};

// Drives the oscillator from rest at each frequency. The trailing window is
// a whole number of drive periods. Requires friction > 0.
std::vector<SweepPoint> frequency_sweep(const OscillatorParams& params, double amplitude,
                                        const std::vector<double>& omegas,
                                        const SweepOptions& options = {});

// Simulated steady-state mean power at one drive frequency, as in the sweep.
SweepPoint steady_state_point(const OscillatorParams& params, double amplitude, double omega,
                              const SweepOptions& options = {});

}  // namespace physlearn
