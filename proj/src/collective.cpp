#include "physlearn/collective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "physlearn/errors.hpp"
#include "physlearn/random.hpp"

namespace physlearn {

namespace {

Eigen::MatrixXd pinv(const Eigen::MatrixXd& m) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(m);
  return cod.pseudoInverse();
}

void require_signal_dim(const Ensemble& ensemble, std::size_t dim) {
  if (dim != ensemble.external_dim()) {
    throw InputError("signal dim " + std::to_string(dim) + " does not match ensemble external dim " +
                     std::to_string(ensemble.external_dim()));
  }
}

// heard[i][k] = E_i D_k E_k X, one column per frame.
std::vector<std::vector<Eigen::MatrixXd>> hear_all(const Ensemble& ensemble,
                                                   const Eigen::MatrixXd& frames) {
  const auto n = ensemble.size();
  std::vector<Eigen::MatrixXd> spoken(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& a = ensemble[k];
    spoken[k] = a.decoder.weights() * (a.encoder.weights() * frames);
  }
  std::vector<std::vector<Eigen::MatrixXd>> heard(n, std::vector<Eigen::MatrixXd>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) heard[i][k] = ensemble[i].encoder.weights() * spoken[k];
  return heard;
}

Discrepancy discrepancy_of(const std::vector<std::vector<Eigen::MatrixXd>>& heard) {
  const auto n = heard.size();
  Discrepancy d;
  if (n < 2) return d;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (i == k) continue;
      const auto& self = heard[i][i];
      // Mean over frames of the per-frame mean squared error.
      const double e = (self - heard[i][k]).squaredNorm() / static_cast<double>(self.size());
      d.max_pairwise = std::max(d.max_pairwise, e);
      sum += e;
    }
  }
  d.mean_pairwise = sum / static_cast<double>(n * (n - 1));
  return d;
}

}  // namespace

Ensemble::Ensemble(std::vector<Agent> agents) : agents_(std::move(agents)) {
  if (agents_.empty()) throw InputError("ensemble needs at least one agent");
  const auto& first = agents_.front();
  for (const auto& a : agents_) {
    if (a.encoder.role() != CoderRole::encoder || a.decoder.role() != CoderRole::decoder) {
      throw InputError("agent " + std::to_string(a.id) + " has coder roles swapped");
    }
    if (a.encoder.cols() != first.encoder.cols() || a.encoder.rows() != first.encoder.rows()) {
      throw InputError("agent " + std::to_string(a.id) + " encoder shape differs from agent " +
                       std::to_string(first.id));
    }
    if (a.decoder.rows() != a.encoder.cols() || a.decoder.cols() != a.encoder.rows()) {
      throw InputError("agent " + std::to_string(a.id) + " decoder does not compose with its encoder");
    }
  }
}

Ensemble random_ensemble(std::size_t agents, std::size_t external_dim, std::size_t code_dim,
                         std::uint64_t seed, double decoder_scale) {
  Rng rng(seed);
  auto gaussian = [&rng](std::size_t r, std::size_t c, double scale) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * standard_normal(rng);
    return m;
  };
  std::vector<Agent> out;
  for (std::size_t i = 0; i < agents; ++i) {
    auto enc = LinearCoder::encoder(gaussian(code_dim, external_dim, 1.0));
    auto dec = LinearCoder::decoder(gaussian(external_dim, code_dim, decoder_scale));
    out.push_back({static_cast<int>(i + 1), std::move(enc), std::move(dec)});
  }
  return Ensemble(std::move(out));
}

RoundMatrix::RoundMatrix(std::size_t n, std::vector<Frame> entries)
    : n_(n), entries_(std::move(entries)) {
  if (entries_.size() != n_ * n_) throw InputError("round matrix needs N^2 entries");
}

RoundMatrix broadcast_round(const Ensemble& ensemble, const Frame& signal) {
  require_signal_dim(ensemble, signal.dim());
  const auto n = ensemble.size();
  std::vector<Frame> entries;
  entries.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      entries.push_back(encode(ensemble[i].encoder,
                               decode(ensemble[k].decoder, encode(ensemble[k].encoder, signal))));
  return RoundMatrix(n, std::move(entries));
}

Discrepancy pairwise_discrepancy(const Ensemble& ensemble, const Dataset& signals) {
  require_signal_dim(ensemble, signals.dim());
  return discrepancy_of(hear_all(ensemble, signals.as_columns()));
}

namespace {

void validate(const Ensemble& ensemble, const Dataset& signals, const AlignmentOptions& options) {
  require_signal_dim(ensemble, signals.dim());
  if (!(options.tol > 0.0)) throw InputError("tol must be positive");
  if (!(options.damping > 0.0 && options.damping <= 1.0)) {
    throw InputError("damping must be in (0, 1]");
  }
  if (!(options.self_weight >= 0.0 && options.self_weight <= 1.0)) {
    throw InputError("self_weight must be in [0, 1]");
  }
}

Ensemble step_from(const Ensemble& ensemble, const Eigen::MatrixXd& frames,
                   const std::vector<std::vector<Eigen::MatrixXd>>& heard,
                   const AlignmentOptions& options, std::size_t round) {
  const auto n = ensemble.size();
  // A lone agent has nobody to listen to and just parrots.
  const double self_weight = n > 1 ? options.self_weight : 1.0;
  const double other_weight = 1.0 - self_weight;
  std::vector<Agent> next;
  next.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& agent = ensemble[i];
    const Eigen::MatrixXd codes = agent.encoder.weights() * frames;
    // Both terms share the left-hand side E_i D_i C_i, so the weighted sum of
    // squared distances is minimized by fitting the weighted mean target.
    Eigen::MatrixXd target = self_weight * codes;
    if (n > 1) {
      Eigen::MatrixXd others = Eigen::MatrixXd::Zero(codes.rows(), codes.cols());
      for (std::size_t k = 0; k < n; ++k)
        if (k != i) others += heard[i][k];
      target += other_weight / static_cast<double>(n - 1) * others;
    }
    const Eigen::MatrixXd correction =
        pinv(agent.encoder.weights()) * (target - heard[i][i]) * pinv(codes);
    Eigen::MatrixXd decoder = agent.decoder.weights() + options.damping * correction;
    if (!decoder.allFinite()) {
      throw NumericalError("non-finite decoder update in round " + std::to_string(round) +
                           " for agent " + std::to_string(agent.id));
    }
    next.push_back({agent.id, agent.encoder, LinearCoder::decoder(std::move(decoder))});
  }
  return Ensemble(std::move(next));
}

}  // namespace

Ensemble alignment_step(const Ensemble& ensemble, const Dataset& signals,
                        const AlignmentOptions& options, std::size_t round) {
  validate(ensemble, signals, options);
  const Eigen::MatrixXd frames = signals.as_columns();
  return step_from(ensemble, frames, hear_all(ensemble, frames), options, round);
}

AlignmentResult align_decoders(const Ensemble& ensemble, const Dataset& signals,
                               const AlignmentOptions& options) {
  validate(ensemble, signals, options);
  const Eigen::MatrixXd frames = signals.as_columns();

  AlignmentResult result{ensemble, {}, false, 0};
  auto heard = hear_all(ensemble, frames);
  Discrepancy d = discrepancy_of(heard);
  result.history.push_back(d);

  std::size_t round = 0;
  while (d.max_pairwise > options.tol && round < options.rounds) {
    ++round;
    result.ensemble = step_from(result.ensemble, frames, heard, options, round);
    heard = hear_all(result.ensemble, frames);
    d = discrepancy_of(heard);
    d.round = round;
    result.history.push_back(d);
  }
  result.rounds_run = round;
  result.converged = d.max_pairwise <= options.tol;
  return result;
}

AlignmentResult align_decoders(const Ensemble& ensemble, const Frame& signal,
                               const AlignmentOptions& options) {
  return align_decoders(ensemble, Dataset({signal}), options);
}

Frame objective_image(const Ensemble& ensemble, const Frame& signal) {
  const auto round = broadcast_round(ensemble, signal);
  const auto n = round.size();
  const auto dim = ensemble.code_dim();
  Eigen::VectorXd mean(static_cast<Eigen::Index>(dim));
  std::vector<double> column(n * n);
  for (std::size_t c = 0; c < dim; ++c) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) column[i * n + k] = round(i, k)[c];
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (double v : column) sum += v;
    mean(static_cast<Eigen::Index>(c)) = sum / static_cast<double>(n * n);
  }
  return Frame(std::move(mean));
}

}  // namespace physlearn
