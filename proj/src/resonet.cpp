#include "physlearn/resonet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "physlearn/errors.hpp"
#include "physlearn/parallel.hpp"
#include "physlearn/random.hpp"

namespace physlearn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_range(const ValueRange& r, const char* name, bool allow_zero) {
  const bool zero = allow_zero && r.lo == 0.0 && r.hi == 0.0;
  if (!zero && !(r.lo > 0.0 && r.lo <= r.hi && std::isfinite(r.hi))) {
    throw InputError(std::string(name) + " range must satisfy 0 < lo <= hi" +
                     (allow_zero ? " (or be 0..0)" : ""));
  }
}

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

// Ground becomes vertex V when present.
int vertex_of(const CircuitGraph& g, int node) { return node == kGround ? g.node_count() : node; }

}  // namespace

CircuitGraph::CircuitGraph(std::vector<double> node_capacitance, std::vector<Branch> branches)
    : capacitance_(std::move(node_capacitance)), branches_(std::move(branches)) {
  if (capacitance_.empty()) throw InputError("network needs at least one node");
  for (std::size_t i = 0; i < capacitance_.size(); ++i) {
    if (!(capacitance_[i] > 0.0) || !std::isfinite(capacitance_[i])) {
      throw InputError("capacitance of node " + std::to_string(i) + " must be positive");
    }
  }
  const int n = node_count();
  for (std::size_t e = 0; e < branches_.size(); ++e) {
    const auto& br = branches_[e];
    const std::string where = "branch " + std::to_string(e);
    auto valid = [n](int v) { return v == kGround || (v >= 0 && v < n); };
    if (!valid(br.a) || !valid(br.b)) throw InputError(where + " references a missing node");
    if (br.a == br.b) throw InputError(where + " is a self-loop");
    if (!(br.inductance > 0.0) || !std::isfinite(br.inductance)) throw InputError(where + " needs L > 0");
    if (!(br.resistance >= 0.0) || !std::isfinite(br.resistance)) throw InputError(where + " needs R >= 0");
  }
}

bool CircuitGraph::touches_ground() const {
  return std::any_of(branches_.begin(), branches_.end(),
                     [](const Branch& b) { return b.a == kGround || b.b == kGround; });
}

CircuitGraph CircuitGraph::disjoint_union(const CircuitGraph& other) const {
  auto caps = capacitance_;
  caps.insert(caps.end(), other.capacitance_.begin(), other.capacitance_.end());
  auto branches = branches_;
  const int shift = node_count();
  for (Branch b : other.branches_) {
    if (b.a != kGround) b.a += shift;
    if (b.b != kGround) b.b += shift;
    branches.push_back(b);
  }
  return CircuitGraph(std::move(caps), std::move(branches));
}

CircuitGraph build_random_network(int nodes, double edge_prob, const NetworkRanges& ranges,
                                  std::uint64_t seed) {
  if (nodes < 1) throw InputError("network needs at least one node");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) throw InputError("edge_prob must be in [0, 1]");
  check_range(ranges.capacitance, "capacitance", false);
  check_range(ranges.inductance, "inductance", false);
  check_range(ranges.resistance, "resistance", true);

  Rng rng(seed);
  std::vector<double> caps(static_cast<std::size_t>(nodes));
  for (double& c : caps) c = log_uniform(rng, ranges.capacitance.lo, ranges.capacitance.hi);
  std::vector<Branch> branches;
  for (int i = 0; i < nodes; ++i) {
    for (int j = i + 1; j < nodes; ++j) {
      if (!(uniform01(rng) < edge_prob)) continue;
      Branch b{i, j, log_uniform(rng, ranges.inductance.lo, ranges.inductance.hi), 0.0};
      if (ranges.resistance.hi > 0.0) b.resistance = log_uniform(rng, ranges.resistance.lo, ranges.resistance.hi);
      branches.push_back(b);
    }
  }
  return CircuitGraph(std::move(caps), std::move(branches));
}

long long connected_components(const CircuitGraph& g) {
  const int vertices = g.node_count() + (g.touches_ground() ? 1 : 0);
  DisjointSets sets(g.node_count() + 1);
  long long components = vertices;
  for (const auto& b : g.branches()) {
    if (sets.unite(vertex_of(g, b.a), vertex_of(g, b.b))) --components;
  }
  return components;
}

long long cycle_rank(const CircuitGraph& g) {
  const long long vertices = g.node_count() + (g.touches_ground() ? 1 : 0);
  return static_cast<long long>(g.branch_count()) - vertices + connected_components(g);
}

namespace {

// S - R in the unscaled variables.
Eigen::MatrixXd coupling_matrix(const CircuitGraph& g) {
  const int n = g.node_count(), e = g.branch_count();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n + e, n + e);
  for (int j = 0; j < e; ++j) {
    const auto& b = g.branches()[static_cast<std::size_t>(j)];
    if (b.a != kGround) {
      k(b.a, n + j) -= 1.0;
      k(n + j, b.a) += 1.0;
    }
    if (b.b != kGround) {
      k(b.b, n + j) += 1.0;
      k(n + j, b.b) -= 1.0;
    }
    k(n + j, n + j) = -b.resistance;
  }
  return k;
}

Eigen::VectorXd mass_diagonal(const CircuitGraph& g) {
  Eigen::VectorXd m(g.node_count() + g.branch_count());
  for (int i = 0; i < g.node_count(); ++i) m(i) = g.capacitance()[static_cast<std::size_t>(i)];
  for (int j = 0; j < g.branch_count(); ++j) m(g.node_count() + j) = g.branches()[static_cast<std::size_t>(j)].inductance;
  return m;
}

}  // namespace

Eigen::MatrixXd state_matrix(const CircuitGraph& g) {
  return mass_diagonal(g).cwiseInverse().asDiagonal() * coupling_matrix(g);
}

Eigen::VectorXcd state_eigenvalues(const CircuitGraph& g) {
  const Eigen::VectorXd s = mass_diagonal(g).cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd scaled = s.asDiagonal() * coupling_matrix(g) * s.asDiagonal();
  // Off the diagonal the scaled matrix is skew up to rounding; make it exact.
  Eigen::MatrixXd k = 0.5 * (scaled - scaled.transpose());
  k.diagonal() = scaled.diagonal();
  Eigen::EigenSolver<Eigen::MatrixXd> solver(k, false);
  if (solver.info() != Eigen::Success) throw NumericalError("eigenvalue solver did not converge");
  return solver.eigenvalues();
}

ModalSpectrum modal_spectrum(const CircuitGraph& g) {
  const Eigen::VectorXcd ev = state_eigenvalues(g);
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  const double tol = 1e-9 * scale;
  std::vector<std::pair<double, double>> modes;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double im = ev(i).imag();
    if (im < -tol) continue;
    modes.emplace_back(im > tol ? im : 0.0, -ev(i).real());
  }
  std::sort(modes.begin(), modes.end());
  ModalSpectrum out;
  for (const auto& [w, d] : modes) {
    out.omega.push_back(w);
    out.damping.push_back(d);
  }
  return out;
}

double spectral_radius(const CircuitGraph& g) { return state_eigenvalues(g).cwiseAbs().maxCoeff(); }

double max_stable_dt(const CircuitGraph& g) {
  const double r = spectral_radius(g);
  return r > 0.0 ? kTwoPi / (20.0 * r) : std::numeric_limits<double>::infinity();
}

DriveResult drive_response(const CircuitGraph& g, int drive_node, const ForceSignal& current,
                           double duration, double dt, bool keep_trace) {
  if (drive_node < 0 || drive_node >= g.node_count()) {
    throw InputError("drive node " + std::to_string(drive_node) + " does not exist");
  }
  if (!(dt > 0.0)) throw InputError("dt must be positive");
  if (!(duration >= dt)) throw InputError("duration must be at least dt");
  const double limit = max_stable_dt(g);
  if (dt > limit) {
    throw InputError("dt " + std::to_string(dt) + " is too coarse for the spectrum; need dt <= " +
                     std::to_string(limit));
  }
  const Eigen::MatrixXd a = state_matrix(g);
  const double inv_c = 1.0 / g.capacitance()[static_cast<std::size_t>(drive_node)];
  const auto steps = static_cast<std::size_t>(std::floor(duration / dt * (1.0 + 1e-12)));
  const std::size_t first = steps - steps / 2;

  auto deriv = [&](double t, const Eigen::VectorXd& x) {
    Eigen::VectorXd d = a * x;
    d(drive_node) += current(t) * inv_c;
    return d;
  };

  DriveResult r;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(a.rows());
  double sum = 0.0;
  auto record = [&](std::size_t i, double t) {
    const double u = current(t);
    if (i >= first && i < steps) sum += u * x(drive_node);
    if (keep_trace) {
      r.t.push_back(t);
      r.node_voltage.push_back(x(drive_node));
      r.injected.push_back(u);
    }
  };
  record(0, 0.0);
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    const Eigen::VectorXd k1 = deriv(t, x);
    const Eigen::VectorXd k2 = deriv(t + 0.5 * dt, x + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = deriv(t + 0.5 * dt, x + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = deriv(t + dt, x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite()) throw NumericalError("network state became non-finite at step " + std::to_string(i + 1));
    record(i + 1, static_cast<double>(i + 1) * dt);
  }
  r.mean_power = sum / static_cast<double>(steps - first);
  return r;
}

std::complex<double> driving_point_impedance(const CircuitGraph& g, int drive_node, double omega) {
  if (drive_node < 0 || drive_node >= g.node_count()) {
    throw InputError("drive node " + std::to_string(drive_node) + " does not exist");
  }
  using C = std::complex<double>;
  const int n = g.node_count();
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) y(i, i) = C(0.0, omega * g.capacitance()[static_cast<std::size_t>(i)]);
  for (const auto& b : g.branches()) {
    const C admittance = 1.0 / C(b.resistance, omega * b.inductance);
    if (b.a != kGround) y(b.a, b.a) += admittance;
    if (b.b != kGround) y(b.b, b.b) += admittance;
    if (b.a != kGround && b.b != kGround) {
      y(b.a, b.b) -= admittance;
      y(b.b, b.a) -= admittance;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(y);
  if (!lu.isInvertible()) throw NumericalError("nodal admittance matrix is singular at this frequency");
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
  rhs(drive_node) = 1.0;
  return lu.solve(rhs)(drive_node);
}

double phasor_power(const CircuitGraph& g, int drive_node, double amplitude, double omega) {
  return 0.5 * amplitude * amplitude * driving_point_impedance(g, drive_node, omega).real();
}

std::vector<NetworkSweepPoint> drive_sweep(const CircuitGraph& g, int drive_node, double amplitude,
                                           const std::vector<double>& omegas,
                                           const NetworkSweepOptions& o) {
  if (o.steps_per_period < 20) throw InputError("steps_per_period must be at least 20");
  const auto spec = modal_spectrum(g);
  double slowest = 0.0;
  for (double d : spec.damping) {
    if (d > 1e-12 && (slowest == 0.0 || d < slowest)) slowest = d;
  }
  const double settle = slowest > 0.0 ? std::min(o.settle_damping_times / slowest, o.max_settle_time) : 0.0;
  const double fastest = std::max(spectral_radius(g), 1e-300);
  return parallel_map(omegas.size(), o.threads, [&](std::size_t i) {
    const double w = omegas[i];
    if (!(w > 0.0)) throw InputError("sweep frequencies must be positive");
    const double period = kTwoPi / w;
    const double fast_period = std::min(period, kTwoPi / fastest);
    const auto per_period = static_cast<std::size_t>(std::ceil(o.steps_per_period * period / fast_period - 1e-9));
    const auto periods = std::max<std::size_t>(o.min_window_periods, static_cast<std::size_t>(std::ceil(settle / period)));
    const double dt = period / static_cast<double>(per_period);
    const auto r = drive_response(g, drive_node, Sinusoid{amplitude, w, 0.0},
                                  2.0 * static_cast<double>(periods) * period, dt);
    return NetworkSweepPoint{w, r.mean_power};
  });
}

std::vector<std::size_t> sweep_peaks(const std::vector<NetworkSweepPoint>& s) {
  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i].mean_power > s[i - 1].mean_power && s[i].mean_power > s[i + 1].mean_power) peaks.push_back(i);
  }
  return peaks;
}

ScalingFit cycle_rank_scaling(const std::vector<int>& sizes, double edge_prob, std::uint64_t seed) {
  ScalingFit fit;
  NetworkRanges ranges;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const auto g = build_random_network(sizes[i], edge_prob, ranges, seed + i);
    const long long r = cycle_rank(g);
    fit.points.push_back({sizes[i], g.branch_count(), r});
    if (r <= 0) continue;
    const double x = std::log(static_cast<double>(sizes[i])), y = std::log(static_cast<double>(r));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) throw InputError("scaling fit needs at least two sizes with loops");
  const double denom = count * sxx - sx * sx;
  if (!(denom > 0.0)) throw InputError("scaling fit needs at least two distinct sizes");
  fit.exponent = (count * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.exponent * sx) / count;
  return fit;
}

}  // namespace physlearn
