#pragma once

// Linear classical and parroting autoencoders.
//
// A classical autoencoder maps an external frame F to a code f = E(a)F and
// back to F' = D(b)f, and is trained on the external discrepancy d(F, F').
// The parroting variant re-hears its own output, f' = E(a)F', and trains the
// decoder on the internal discrepancy d(f', f) alone, while the encoder is
// trained on a property of the external signal only (retained variance).

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace physlearn {

// Fixed-length vector of finite real samples.
class Frame {
 public:
  Frame() = default;
  explicit Frame(Eigen::VectorXd samples);
  Frame(std::initializer_list<double> samples);
  explicit Frame(const std::vector<double>& samples);

  std::size_t dim() const { return static_cast<std::size_t>(samples_.size()); }
  double operator[](std::size_t i) const { return samples_[static_cast<Eigen::Index>(i)]; }
  const Eigen::VectorXd& samples() const { return samples_; }

  friend bool operator==(const Frame& a, const Frame& b) {
    return a.samples_.size() == b.samples_.size() && a.samples_ == b.samples_;
  }

 private:
  Eigen::VectorXd samples_;
};

enum class CoderRole { encoder, decoder };

std::string to_string(CoderRole role);

// Real matrix with tunable entries. Encoders hold the parameter set a,
// decoders the parameter set b.
class LinearCoder {
 public:
  LinearCoder(Eigen::MatrixXd weights, CoderRole role);

  static LinearCoder encoder(Eigen::MatrixXd weights) {
    return LinearCoder(std::move(weights), CoderRole::encoder);
  }
  static LinearCoder decoder(Eigen::MatrixXd weights) {
    return LinearCoder(std::move(weights), CoderRole::decoder);
  }

  const Eigen::MatrixXd& weights() const { return weights_; }
  CoderRole role() const { return role_; }
  std::size_t rows() const { return static_cast<std::size_t>(weights_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(weights_.cols()); }

  // Whether the coder reduces dimension (rows <= cols). Training an encoder
  // always yields a bottleneck; hand-built encoders may expand (see
  // collective.hpp).
  bool is_bottleneck() const { return weights_.rows() <= weights_.cols(); }

 private:
  Eigen::MatrixXd weights_;
  CoderRole role_;
};

// Nonempty population of frames of one dimension.
class Dataset {
 public:
  explicit Dataset(std::vector<Frame> frames);

  std::size_t size() const { return frames_.size(); }
  std::size_t dim() const { return frames_.front().dim(); }
  const std::vector<Frame>& frames() const { return frames_; }
  const Frame& operator[](std::size_t i) const { return frames_[i]; }

  // dim x size matrix with one frame per column.
  Eigen::MatrixXd as_columns() const;

  // Population covariance (1/n normalization) about the sample mean.
  Eigen::MatrixXd covariance() const;

 private:
  std::vector<Frame> frames_;
};

// Mean squared difference; the discrepancy d(., .) used throughout.
double mean_squared_error(const Frame& a, const Frame& b);

Frame encode(const LinearCoder& coder, const Frame& signal);
Frame decode(const LinearCoder& coder, const Frame& code);

struct ParrotReport {
  Frame f;        // code of the external frame
  Frame f_prime;  // code of the re-heard reconstruction
  Frame F_prime;  // reconstruction
  double external_error = 0.0;
  double internal_error = 0.0;
};

// One pass around the internal learning loop: f = E F, F' = D f, f' = E F'.
ParrotReport parrot_cycle(const LinearCoder& encoder, const LinearCoder& decoder,
                          const Frame& signal);

// Classical autoencoder objective, d(F, F') averaged over the dataset.
double mean_external_error(const LinearCoder& encoder, const LinearCoder& decoder,
                           const Dataset& data);

// Parroting objective, d(f', f) averaged over the dataset.
double mean_internal_error(const LinearCoder& encoder, const LinearCoder& decoder,
                           const Dataset& data);

enum class DecoderTrainingMode { closed_form, gradient };

struct DecoderTraining {
  explicit DecoderTraining(LinearCoder trained) : decoder(std::move(trained)) {}

  LinearCoder decoder;
  double objective = 0.0;            // mean internal error of `decoder`
  std::size_t iterations = 0;        // gradient steps taken (0 in closed form)
  bool converged = false;
  bool degenerate_data = false;      // every code was zero
  // Objective before gradient steps history_steps[i]: every step up to
  // kDenseHistory, then every kSparseStride-th.
  std::vector<double> history;
  std::vector<std::size_t> history_steps;

  static constexpr std::size_t kDenseHistory = 100000;
  static constexpr std::size_t kSparseStride = 1000;
};

struct DecoderTrainingOptions {
  DecoderTrainingMode mode = DecoderTrainingMode::closed_form;
  double step = 0.0;                 // gradient step; <= 0 picks stable_step()
  std::size_t max_iterations = 100000000;
  // Stop once a step improves by less than this fraction of the initial
  // objective.
  double improvement_tol = 1e-16;
};

// Decoder minimizing the mean internal error for a fixed encoder. The closed
// form is the minimal-norm least-squares solution b = a^+ C C^+ over the code
// matrix C; gradient mode starts from b = 0 and therefore converges to the
// same minimal-norm point.
DecoderTraining train_decoder(const LinearCoder& encoder, const Dataset& data,
                              const DecoderTrainingOptions& options = {});

// Largest step for which gradient descent on the internal objective is
// guaranteed to decrease it monotonically (1 / Lipschitz constant).
double stable_step(const LinearCoder& encoder, const Dataset& data);

// Encoder with orthonormal rows spanning the top-`bottleneck` principal
// subspace of the dataset covariance. Each row's largest-magnitude entry is
// positive.
LinearCoder train_encoder(const Dataset& data, std::size_t bottleneck);

// Fraction of total dataset variance captured by the encoder row space.
// A zero-variance dataset has nothing to lose and scores 1.
double compression_rate(const LinearCoder& encoder, const Dataset& data);

// Orthogonal projector onto the row space of `m`.
Eigen::MatrixXd row_space_projector(const Eigen::MatrixXd& m);

}  // namespace physlearn
