#pragma once

// Several parroting agents listening to each other.
//
// Agent k turns an external frame F into a secondary signal D_k E_k F, which
// every agent i (including k itself) hears as f_ik = E_i D_k E_k F. Agents
// adjust only their decoders so that what they hear from themselves matches
// what they hear from others. The average of all cross-heard codes is the
// ensemble's shared image of F.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "physlearn/autoencoder.hpp"

namespace physlearn {

struct Agent {
  int id = 0;
  LinearCoder encoder;
  LinearCoder decoder;
};

// Agents sharing one external dimension and one code dimension. Encoders may
// be wider than their input here: a scalar-to-vector agent is legal.
class Ensemble {
 public:
  explicit Ensemble(std::vector<Agent> agents);

  std::size_t size() const { return agents_.size(); }
  std::size_t external_dim() const { return agents_.front().encoder.cols(); }
  std::size_t code_dim() const { return agents_.front().encoder.rows(); }
  const std::vector<Agent>& agents() const { return agents_; }
  const Agent& operator[](std::size_t i) const { return agents_[i]; }

 private:
  std::vector<Agent> agents_;
};

// Gaussian encoders and decoders; decoders are scaled by decoder_scale.
Ensemble random_ensemble(std::size_t agents, std::size_t external_dim, std::size_t code_dim,
                         std::uint64_t seed, double decoder_scale = 1.0);

// N x N codes; entry (i, k) is what agent i hears from agent k.
class RoundMatrix {
 public:
  RoundMatrix(std::size_t n, std::vector<Frame> entries);

  std::size_t size() const { return n_; }
  const Frame& operator()(std::size_t i, std::size_t k) const { return entries_[i * n_ + k]; }

 private:
  std::size_t n_;
  std::vector<Frame> entries_;
};

RoundMatrix broadcast_round(const Ensemble& ensemble, const Frame& signal);

struct Discrepancy {
  std::size_t round = 0;
  double max_pairwise = 0.0;   // max over i != k of d(f_ii, f_ik)
  double mean_pairwise = 0.0;  // mean over i != k
};

// Pairwise self-versus-other discrepancy, averaged over the frames.
Discrepancy pairwise_discrepancy(const Ensemble& ensemble, const Dataset& signals);

struct AlignmentOptions {
  std::size_t rounds = 1000;
  double tol = 1e-8;
  double damping = 0.5;      // fraction of the least-squares step taken, in (0, 1]
  double self_weight = 0.5;  // weight of the self-parroting anchor d(f_ii, f_i)
};

struct AlignmentResult {
  Ensemble ensemble;
  std::vector<Discrepancy> history;  // entry 0 is the input ensemble
  bool converged = false;
  std::size_t rounds_run = 0;
};

// Synchronous rounds. In each round every agent moves its decoder a damped
// step toward the least-squares minimizer of
//   self_weight * d(f_ii, f_i) + (1 - self_weight) * mean_{k != i} d(f_ii, f_ik)
// computed against the previous round's decoders. The step is the
// minimal-norm correction, so decoder components the agent cannot hear are
// left untouched. Stops once max_pairwise <= tol.
AlignmentResult align_decoders(const Ensemble& ensemble, const Dataset& signals,
                               const AlignmentOptions& options = {});
AlignmentResult align_decoders(const Ensemble& ensemble, const Frame& signal,
                               const AlignmentOptions& options = {});

// One synchronous round of the update above, regardless of the current
// discrepancy. The round and agent of a non-finite update are reported in the
// thrown NumericalError; `round` only labels that message.
Ensemble alignment_step(const Ensemble& ensemble, const Dataset& signals,
                        const AlignmentOptions& options = {}, std::size_t round = 1);

// Mean of f_ik over all N^2 ordered pairs. Each component is summed in sorted
// order, so the result is bit-identical under any reordering of the agents.
Frame objective_image(const Ensemble& ensemble, const Frame& signal);

}  // namespace physlearn
