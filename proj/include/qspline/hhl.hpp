#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qspline/stateprep.hpp"
#include "qspline/statevector.hpp"

namespace qspline {

// Quantum linear-system solver on the dense simulator: phase estimation over
// exact Hamiltonian evolution, a conditional eigenvalue-inversion rotation on
// one ancilla, uncomputation, postselection. Non-hermitian inputs run through
// the standard hermitian embedding. A polynomial variant applies p(A) instead
// of A^{-1} on the same registers.

// Square system Ax = b, stored padded to a power-of-two dimension. Padding
// adds identity rows and zero rhs entries; `original_dim` is how many
// coordinates of the unpadded problem exist, and results are stripped back to
// them.
struct LinearSystem {
  Operator a;
  TargetVector b;
  bool hermitian = false;
  int original_dim = 0;
};

// Validates shapes, detects hermiticity within 1e-12, pads to the next power
// of two (minimum dimension 2). Throws input_error for a non-square matrix,
// mismatched sizes, non-finite entries, or an all-zero rhs.
LinearSystem make_linear_system(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& b);

// [[0, A], [A^dagger, 0]]. Hermitian by construction; the spectrum is the
// singular values of A in +/- pairs. Solving the embedded system with rhs
// (b, 0) leaves the solution in the second block of coordinates.
Eigen::MatrixXcd hermitian_embed(const Eigen::MatrixXcd& a);

// exp(iAt) through an exact eigendecomposition. The operator must carry the
// hermitian flag (build it with Operator::hermitian); t may be any finite
// real, t = 0 gives the identity.
Operator evolve(const Operator& a, double t);

// Eigenvalue encoded by a phase-register basis value under evolution time t:
// 2*pi*wrap(value / 2^n) / t, where wrap maps fractions in [1/2, 1) to
// [-1/2, 0). Value 0 decodes to 0; value 2^{n-1} decodes to the most negative
// representable eigenvalue.
double signed_phase_decode(std::uint64_t value, int phase_bits, double evolution_time);

struct HHLConfig {
  int phase_bits = 6;
  // 0 derives the time from the spectral bound so the largest eigenvalue
  // sits on the edge of the signed phase window, one bin inside +/- 1/2.
  double evolution_time = 0.0;
  // Upper bound on |eigenvalue| of the matrix actually solved (singular
  // values for a non-hermitian input). 0 uses the Gershgorin row estimate.
  double spectral_bound = 0.0;
  // Smallest |eigenvalue| treated as invertible, in units of the spectral
  // bound. Register values decoding below the floor leave the ancilla
  // unrotated, so those components drop out of the postselected solution.
  double eigenvalue_floor = 0.0;
  // Amplitude scale of the inversion rotation, same units as the floor.
  // 0 means equal to eigenvalue_floor; larger values are rejected because
  // the rotation amplitude C/eigenvalue must stay within 1.
  double inversion_constant = 0.0;
  // Maximum input weight tolerated on eigenvectors below the floor before
  // solve refuses the system. Raise to 1.0 to accept rank-deficient systems
  // and get the least-squares (pseudoinverse) solution.
  double floor_weight_gate = 1e-8;
  std::uint64_t shots = 0;  // 0 reads exact probabilities, else sampled
  std::uint64_t seed = 0;
  Exec how = Exec::automatic;
};

struct HHLResult {
  // System register after postselecting ancilla and phase register, still in
  // the embedded / padded layout.
  Statevector solution_state;
  // The same state stripped to the original coordinates, unit norm.
  Eigen::VectorXcd solution;
  // P(ancilla = 0); sampled estimate when shots > 0, exact otherwise.
  double success_probability = 0.0;
  // ||A^{-1} b|| / ||b|| for solve, ||p(A) b|| / ||b|| for polynomials,
  // reconstructed from the success probability. Exact when every eigenphase
  // is representable and probabilities are read exactly.
  double norm_estimate = 0.0;
  // Weight left outside phase value 0 after uncomputation; zero only when
  // every eigenphase is exactly representable.
  double phase_residual = 0.0;
  // Expected preparations until a success: 1/p unassisted, 1/sqrt(p) with
  // amplitude amplification.
  double repetitions_naive = 0.0;
  double repetitions_amplified = 0.0;
};

// Solves Ax = b. Requires eigenvalue_floor in (0, 1); refuses inputs whose
// weight below the floor exceeds floor_weight_gate (ill_conditioned_error)
// and evolution times that alias the spectrum (input_error). Throws
// degenerate_postselection_error when the success branch carries no weight.
HHLResult solve(const LinearSystem& system, const HHLConfig& config = {});

// Same, with the rhs register state supplied already prepared. Its qubit
// count must match the padded system dimension; for a non-hermitian system
// it is placed in the first block of the embedding.
HHLResult solve(const LinearSystem& system, const Statevector& prepared_b,
                const HHLConfig& config = {});

// Applies p(A) instead of A^{-1}: the ancilla rotation amplitude at register
// value y is p(eigenvalue decoded at y), coefficients low to high. Hermitian
// systems only. The polynomial must stay within 1 in magnitude on every
// decodable eigenvalue (input_error otherwise); no floor is applied, and
// norm_estimate reports ||p(A) b|| / ||b||.
HHLResult apply_matrix_function(const LinearSystem& system,
                                const std::vector<double>& poly_coefficients,
                                const HHLConfig& config = {});
HHLResult apply_matrix_function(const LinearSystem& system, const Statevector& prepared_b,
                                const std::vector<double>& poly_coefficients,
                                const HHLConfig& config = {});

}  // namespace qspline
