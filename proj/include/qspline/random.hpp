#pragma once

#include <random>

#include <Eigen/Dense>

#include "qspline/statevector.hpp"

namespace qspline {

// Seeded generators for states and operators. All functions consume the
// passed engine deterministically, so a fixed seed fixes the output.

inline Eigen::VectorXcd random_unit_vector(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = cplx(g(rng), g(rng));
  v.normalize();
  return v;
}

inline Statevector random_state(int num_qubits, std::mt19937_64& rng) {
  const Eigen::VectorXcd v = random_unit_vector(1 << num_qubits, rng);
  std::vector<cplx> amps(v.data(), v.data() + v.size());
  return Statevector::from_amplitudes(std::move(amps), true);
}

// Haar-distributed unitary via QR of a Gaussian matrix with the standard
// phase correction on R's diagonal.
inline Eigen::MatrixXcd haar_unitary(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd z(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) z(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const cplx d = r(j, j);
    const cplx ph = (std::abs(d) > 0) ? d / std::abs(d) : cplx(1.0, 0.0);
    q.col(j) *= ph;
  }
  return q;
}

inline Eigen::MatrixXcd random_hermitian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd z(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) z(i, j) = cplx(g(rng), g(rng));
  return 0.5 * (z + z.adjoint());
}

}  // namespace qspline
