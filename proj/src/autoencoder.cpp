#include "physlearn/autoencoder.hpp"

#include <algorithm>
#include <cmath>

#include "physlearn/errors.hpp"

namespace physlearn {

namespace {

void require_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw InputError(std::string(what) + " contains non-finite entries");
}

std::string shape(const LinearCoder& c) {
  return std::to_string(c.rows()) + "x" + std::to_string(c.cols());
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return Eigen::MatrixXd::Zero(m.cols(), m.rows());
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(m);
  return cod.pseudoInverse();
}

// Codes of every frame, one per column.
Eigen::MatrixXd code_matrix(const LinearCoder& encoder, const Dataset& data) {
  if (encoder.cols() != data.dim()) {
    throw InputError("encoder " + shape(encoder) + " does not accept frames of dim " +
                     std::to_string(data.dim()));
  }
  return encoder.weights() * data.as_columns();
}

// Mean internal error expressed on the code matrix: ||A B C - C||^2 / (n k).
double internal_objective(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                          const Eigen::MatrixXd& codes) {
  const double n = static_cast<double>(codes.cols());
  const double k = static_cast<double>(codes.rows());
  return (a * b * codes - codes).squaredNorm() / (n * k);
}

}  // namespace

Frame::Frame(Eigen::VectorXd samples) : samples_(std::move(samples)) {
  if (samples_.size() == 0) throw InputError("frame must have positive dimension");
  require_finite(samples_, "frame");
}

Frame::Frame(std::initializer_list<double> samples)
    : Frame(std::vector<double>(samples)) {}

Frame::Frame(const std::vector<double>& samples)
    : Frame(Eigen::Map<const Eigen::VectorXd>(samples.data(),
                                              static_cast<Eigen::Index>(samples.size()))) {}

std::string to_string(CoderRole role) {
  return role == CoderRole::encoder ? "encoder" : "decoder";
}

LinearCoder::LinearCoder(Eigen::MatrixXd weights, CoderRole role)
    : weights_(std::move(weights)), role_(role) {
  if (weights_.rows() == 0 || weights_.cols() == 0) {
    throw InputError(to_string(role_) + " must have nonzero shape");
  }
  require_finite(weights_, "coder weights");
}

Dataset::Dataset(std::vector<Frame> frames) : frames_(std::move(frames)) {
  if (frames_.empty()) throw InputError("dataset must contain at least one frame");
  const auto d = frames_.front().dim();
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    if (frames_[i].dim() != d) {
      throw InputError("frame " + std::to_string(i) + " has dim " +
                       std::to_string(frames_[i].dim()) + ", expected " + std::to_string(d));
    }
  }
}

Eigen::MatrixXd Dataset::as_columns() const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) m.col(static_cast<Eigen::Index>(i)) = frames_[i].samples();
  return m;
}

Eigen::MatrixXd Dataset::covariance() const {
  const Eigen::MatrixXd x = as_columns();
  const Eigen::VectorXd mean = x.rowwise().mean();
  const Eigen::MatrixXd centered = x.colwise() - mean;
  return centered * centered.transpose() / static_cast<double>(size());
}

double mean_squared_error(const Frame& a, const Frame& b) {
  if (a.dim() != b.dim()) {
    throw InputError("cannot compare frames of dim " + std::to_string(a.dim()) + " and " +
                     std::to_string(b.dim()));
  }
  return (a.samples() - b.samples()).squaredNorm() / static_cast<double>(a.dim());
}

Frame encode(const LinearCoder& coder, const Frame& signal) {
  if (coder.role() != CoderRole::encoder) throw InputError("encode requires an encoder");
  if (coder.cols() != signal.dim()) {
    throw InputError("encoder " + shape(coder) + " cannot encode a frame of dim " +
                     std::to_string(signal.dim()));
  }
  return Frame(Eigen::VectorXd(coder.weights() * signal.samples()));
}

Frame decode(const LinearCoder& coder, const Frame& code) {
  if (coder.role() != CoderRole::decoder) throw InputError("decode requires a decoder");
  if (coder.cols() != code.dim()) {
    throw InputError("decoder " + shape(coder) + " cannot decode a code of dim " +
                     std::to_string(code.dim()));
  }
  return Frame(Eigen::VectorXd(coder.weights() * code.samples()));
}

ParrotReport parrot_cycle(const LinearCoder& encoder, const LinearCoder& decoder,
                          const Frame& signal) {
  if (decoder.cols() != encoder.rows() || decoder.rows() != signal.dim()) {
    throw InputError("encoder " + shape(encoder) + " and decoder " + shape(decoder) +
                     " do not compose over frames of dim " + std::to_string(signal.dim()));
  }
  ParrotReport r;
  r.f = encode(encoder, signal);
  r.F_prime = decode(decoder, r.f);
  r.f_prime = encode(encoder, r.F_prime);
  r.external_error = mean_squared_error(signal, r.F_prime);
  r.internal_error = mean_squared_error(r.f, r.f_prime);
  return r;
}

double mean_external_error(const LinearCoder& encoder, const LinearCoder& decoder,
                           const Dataset& data) {
  double sum = 0.0;
  for (const auto& frame : data.frames()) sum += parrot_cycle(encoder, decoder, frame).external_error;
  return sum / static_cast<double>(data.size());
}

double mean_internal_error(const LinearCoder& encoder, const LinearCoder& decoder,
                           const Dataset& data) {
  double sum = 0.0;
  for (const auto& frame : data.frames()) sum += parrot_cycle(encoder, decoder, frame).internal_error;
  return sum / static_cast<double>(data.size());
}

double stable_step(const LinearCoder& encoder, const Dataset& data) {
  const Eigen::MatrixXd codes = code_matrix(encoder, data);
  const double n = static_cast<double>(codes.cols());
  const double k = static_cast<double>(codes.rows());
  Eigen::JacobiSVD<Eigen::MatrixXd> sa(encoder.weights());
  Eigen::JacobiSVD<Eigen::MatrixXd> sc(codes);
  const double a2 = sa.singularValues()(0) * sa.singularValues()(0);
  const double c2 = sc.singularValues()(0) * sc.singularValues()(0);
  const double lipschitz = 2.0 * a2 * c2 / (n * k);
  return lipschitz > 0.0 ? 1.0 / lipschitz : 1.0;
}

DecoderTraining train_decoder(const LinearCoder& encoder, const Dataset& data,
                              const DecoderTrainingOptions& options) {
  const Eigen::MatrixXd codes = code_matrix(encoder, data);
  const Eigen::MatrixXd& a = encoder.weights();
  const auto out_dim = a.cols();
  const auto code_dim = a.rows();

  if (codes.isZero(0.0)) {
    DecoderTraining t{LinearCoder::decoder(Eigen::MatrixXd::Zero(out_dim, code_dim))};
    t.converged = true;
    t.degenerate_data = true;
    return t;
  }

  if (options.mode == DecoderTrainingMode::closed_form) {
    Eigen::MatrixXd b = pseudo_inverse(a) * codes * pseudo_inverse(codes);
    DecoderTraining t{LinearCoder::decoder(std::move(b))};
    t.objective = internal_objective(a, t.decoder.weights(), codes);
    t.converged = true;
    return t;
  }

  const double step = options.step > 0.0 ? options.step : stable_step(encoder, data);
  const double nk = static_cast<double>(codes.cols()) * static_cast<double>(code_dim);
  const Eigen::MatrixXd code_gram = codes * codes.transpose();
  const Eigen::MatrixXd enc_gram = a * a.transpose();

  // Every gradient 2 A^T (A B - I) C C^T / (n k) lies in the row space of A,
  // so from B = 0 the iterate stays B = A^T Y and the descent runs on the
  // k x k matrix Y. The objective is |(A A^T Y - I) H|^2 / (n k) with H H^T = C C^T.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram_eig(code_gram);
  const Eigen::MatrixXd half =
      gram_eig.eigenvectors() * gram_eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(code_dim, code_dim);
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(code_dim, code_dim);
  Eigen::MatrixXd err = -identity;
  double objective = (err * half).squaredNorm() / nk;
  const double initial = objective;
  const double stop_below = options.improvement_tol * initial;

  std::vector<double> history;
  std::vector<std::size_t> history_steps;
  std::size_t it = 0;
  bool converged = false;
  for (; it < options.max_iterations; ++it) {
    if (it < DecoderTraining::kDenseHistory || it % DecoderTraining::kSparseStride == 0) {
      history.push_back(objective);
      history_steps.push_back(it);
    }
    y.noalias() -= (2.0 * step / nk) * (err * code_gram);
    err.noalias() = enc_gram * y;
    err -= identity;
    const double next = (err * half).squaredNorm() / nk;
    if (!std::isfinite(next)) {
      throw NumericalError("decoder gradient diverged at iteration " + std::to_string(it) +
                           " (step " + std::to_string(step) + ")");
    }
    const double improvement = objective - next;
    // Rounding can lift a converged objective by a few ulps of the start value.
    if (improvement < -1e-12 * initial) {
      throw NumericalError("decoder objective increased at iteration " + std::to_string(it) +
                           " (step " + std::to_string(step) + " too large)");
    }
    objective = next;
    if (improvement < stop_below) {
      ++it;
      converged = true;
      break;
    }
  }
  Eigen::MatrixXd b = a.transpose() * y;
  objective = internal_objective(a, b, codes);
  DecoderTraining t{LinearCoder::decoder(std::move(b))};
  t.objective = objective;
  t.iterations = it;
  t.converged = converged;
  t.history = std::move(history);
  t.history_steps = std::move(history_steps);
  return t;
}

LinearCoder train_encoder(const Dataset& data, std::size_t bottleneck) {
  if (bottleneck == 0 || bottleneck > data.dim()) {
    throw InputError("bottleneck must be in [1, " + std::to_string(data.dim()) + "], got " +
                     std::to_string(bottleneck));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(data.covariance());
  if (eig.info() != Eigen::Success) throw NumericalError("covariance eigendecomposition failed");
  // Eigenvalues ascend; the principal directions are the trailing columns.
  const auto d = static_cast<Eigen::Index>(data.dim());
  const auto k = static_cast<Eigen::Index>(bottleneck);
  Eigen::MatrixXd rows(k, d);
  for (Eigen::Index r = 0; r < k; ++r) {
    Eigen::VectorXd v = eig.eigenvectors().col(d - 1 - r);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    rows.row(r) = v.transpose();
  }
  return LinearCoder::encoder(std::move(rows));
}

Eigen::MatrixXd row_space_projector(const Eigen::MatrixXd& m) {
  return pseudo_inverse(m) * m;
}

double compression_rate(const LinearCoder& encoder, const Dataset& data) {
  if (encoder.cols() != data.dim()) {
    throw InputError("encoder " + shape(encoder) + " does not accept frames of dim " +
                     std::to_string(data.dim()));
  }
  const Eigen::MatrixXd cov = data.covariance();
  const double total = cov.trace();
  if (total <= 0.0) return 1.0;
  const Eigen::MatrixXd p = row_space_projector(encoder.weights());
  const double retained = (p * cov).trace();
  return std::clamp(retained / total, 0.0, 1.0);
}

}  // namespace physlearn
