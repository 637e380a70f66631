#pragma once

// Random Kirchhoff networks: node capacitances to ground joined by series
// R-L branches. State is the node voltages followed by the branch currents:
//
//   C_i dV_i/dt = -sum_{e out of i} I_e + sum_{e into i} I_e + injected_i
//   L_e dI_e/dt = V_a - V_b - R_e I_e
//
// A branch may end on ground (index kGround, voltage 0).

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "physlearn/analog.hpp"

namespace physlearn {

inline constexpr int kGround = -1;

struct Branch {
  int a = 0;
  int b = kGround;
  double inductance = 1.0;  // H
  double resistance = 0.0;  // ohm
};

class CircuitGraph {
 public:
  CircuitGraph(std::vector<double> node_capacitance, std::vector<Branch> branches);

  int node_count() const { return static_cast<int>(capacitance_.size()); }
  int branch_count() const { return static_cast<int>(branches_.size()); }
  const std::vector<double>& capacitance() const { return capacitance_; }
  const std::vector<Branch>& branches() const { return branches_; }
  bool touches_ground() const;

  // Disjoint union; the second graph's nodes are renumbered after ours.
  CircuitGraph disjoint_union(const CircuitGraph& other) const;

 private:
  std::vector<double> capacitance_;
  std::vector<Branch> branches_;
};

struct ValueRange {
  double lo = 1.0;
  double hi = 1.0;
};

struct NetworkRanges {
  ValueRange capacitance{0.1, 10.0};
  ValueRange inductance{0.1, 10.0};
  ValueRange resistance{0.01, 1.0};  // {0, 0} for a lossless network
};

// Every unordered node pair becomes a branch with probability edge_prob;
// values are log-uniform in their ranges. Nothing attaches to ground.
CircuitGraph build_random_network(int nodes, double edge_prob, const NetworkRanges& ranges,
                                  std::uint64_t seed);

// E - V + C. Ground counts as a vertex only when some branch touches it.
long long cycle_rank(const CircuitGraph& graph);

long long connected_components(const CircuitGraph& graph);

// A = M^{-1} (S - R) of dimension V + E.
Eigen::MatrixXd state_matrix(const CircuitGraph& graph);

// Eigenvalues of the state matrix, computed on the similar matrix
// M^{-1/2} (S - R) M^{-1/2} whose skew part is exact.
Eigen::VectorXcd state_eigenvalues(const CircuitGraph& graph);

struct ModalSpectrum {
  std::vector<double> omega;    // rad/s, ascending
  std::vector<double> damping;  // 1/s, paired with omega
};

// One entry per conjugate pair plus one per real eigenvalue (omega = 0).
ModalSpectrum modal_spectrum(const CircuitGraph& graph);

// Largest eigenvalue magnitude of the state matrix.
double spectral_radius(const CircuitGraph& graph);

// dt <= 2 pi / (20 spectral radius).
double max_stable_dt(const CircuitGraph& graph);

struct DriveResult {
  double mean_power = 0.0;  // W, trailing half of the run
  std::vector<double> t;
  std::vector<double> node_voltage;
  std::vector<double> injected;
};

// RK4 from rest with current injected at drive_node.
DriveResult drive_response(const CircuitGraph& graph, int drive_node, const ForceSignal& current,
                           double duration, double dt, bool keep_trace = false);

// Driving-point impedance at drive_node from nodal analysis.
std::complex<double> driving_point_impedance(const CircuitGraph& graph, int drive_node, double omega);

// 1/2 I0^2 Re Z.
double phasor_power(const CircuitGraph& graph, int drive_node, double amplitude, double omega);

struct NetworkSweepOptions {
  double settle_damping_times = 10.0;  // in units of the slowest nonzero decay time
  double max_settle_time = 1e4;        // s
  unsigned steps_per_period = 40;      // per period of the faster of drive and fastest mode
  unsigned min_window_periods = 8;
  unsigned threads = 1;
};

struct NetworkSweepPoint {
  double omega = 0.0;
  double mean_power = 0.0;
};

std::vector<NetworkSweepPoint> drive_sweep(const CircuitGraph& graph, int drive_node, double amplitude,
                                           const std::vector<double>& omegas,
                                           const NetworkSweepOptions& options = {});

// Indices of strict interior local maxima of mean_power.
std::vector<std::size_t> sweep_peaks(const std::vector<NetworkSweepPoint>& sweep);

struct ScalingPoint {
  int nodes = 0;
  long long edges = 0;
  long long cycle_rank = 0;
};

struct ScalingFit {
  std::vector<ScalingPoint> points;
  double exponent = 0.0;   // slope of log(cycle_rank) on log(V)
  double intercept = 0.0;
};

// One random graph per size, seeded seed + index. Sizes with zero cycle rank
// are kept in points but left out of the fit.
ScalingFit cycle_rank_scaling(const std::vector<int>& sizes, double edge_prob, std::uint64_t seed);

}  // namespace physlearn
