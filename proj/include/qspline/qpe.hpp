#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qspline/statevector.hpp"

namespace qspline {

// Phase estimation reads an n-bit register as y/2^n ~ theta where
// U|u> = exp(2*pi*i*theta)|u>.  The register splits into m accuracy bits
// and p = n - m confidence bits; outcomes within the truncation window of
// the m-bit value concentrate most of the probability mass once p >= 2.
struct PhaseEstimationConfig {
  int n = 0;  // total register bits
  int m = 0;  // accuracy bits, 0 < m <= n
  double delta = 0.25;  // failure budget used by from_precision

  int p() const { return n - m; }

  // Smallest register meeting |theta - y/2^n| <= epsilon with failure
  // probability at most delta.
  static PhaseEstimationConfig from_precision(double epsilon, double delta);
};

// Register width chosen by from_precision, exposed for sizing estimates.
int required_qubits(double epsilon, double delta);

struct GoodSet {
  std::vector<std::uint64_t> outcomes;  // truncation window, mod 2^n
  double probability = 0.0;             // mass of the window
  double lower_bound = 0.0;             // 1 - 1/(2*(2^p - 2)), needs p >= 2
  bool bound_satisfied = false;
};

struct PhaseOutcome {
  int n = 0;
  int m = 0;
  double delta = 0.0;
  std::vector<double> distribution;  // P(y), length 2^n
  std::optional<GoodSet> good;       // present when a reference theta is known
};

// Exact register distribution after phase estimation of `u` applied to
// `eigenstate`.  The operator must carry the unitary flag.  For a true
// eigenstate the distribution is the single-phase kernel; otherwise it is
// the eigenweight mixture.
PhaseOutcome run_qpe(const Operator& u, const Statevector& eigenstate,
                     const PhaseEstimationConfig& config,
                     Exec how = Exec::automatic);

// Joint post-circuit state for a (possibly non-eigen) input.  System
// occupies the low qubits, the phase register the high ones.
Statevector run_qpe_superposed(const Operator& u, const Statevector& input,
                               const PhaseEstimationConfig& config,
                               Exec how = Exec::automatic);

// Distribution and truncation-window mass for the rank-1 phase theta in
// [0,1), simulated through the full circuit on diag(1, e^{2 pi i theta}).
// Throws bound_inapplicable_error when p < 2.
PhaseOutcome good_set_outcome(double theta, const PhaseEstimationConfig& config);
double good_set_probability(double theta, const PhaseEstimationConfig& config);

// Dense transform matrix, F[x][y] = exp(2*pi*i*x*y/2^n)/sqrt(2^n).  Kept
// as a cross-check for the gate decomposition; infeasible past ~12 qubits.
Eigen::MatrixXcd qft_matrix(int n);

// In-place Fourier transform of qubits [first, first + n) using the gate
// decomposition (Hadamard, two-qubit phase, reversal swaps).
void apply_qft_register(Statevector& state, int first, int n, bool inverse,
                        Exec how = Exec::automatic);

namespace detail {

// Phase-estimation forward pass: Hadamards on the register, controlled
// powers u^(2^k) on the system qubits [0, first_phase), inverse Fourier
// transform.  `backward` undoes it exactly.
void qpe_forward(Statevector& state, const Eigen::MatrixXcd& u,
                 int first_phase, int n, Exec how);
void qpe_backward(Statevector& state, const Eigen::MatrixXcd& u,
                  int first_phase, int n, Exec how);

void swap_qubits(Statevector& state, int a, int b, Exec how);

}  // namespace detail

}  // namespace qspline
