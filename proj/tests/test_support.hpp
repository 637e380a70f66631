#pragma once

// Shared generators for the unit and acceptance suites.

#include <Eigen/Dense>

#include "physlearn/random.hpp"

namespace physlearn::testing {

inline Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = standard_normal(rng);
  return m;
}

// Haar-ish random orthogonal matrix from the QR factorization of a Gaussian.
inline Eigen::MatrixXd random_orthogonal(Rng& rng, Eigen::Index n) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(rng, n, n));
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace physlearn::testing
