#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qspline/errors.hpp"

namespace qspline {

using cplx = std::complex<double>;

// Hard cap on simulated register width (amplitude array of 2^24 doubles pairs).
inline constexpr int kMaxQubits = 24;

// Norm tolerance for states returned by public operations.
inline constexpr double kNormTol = 1e-10;

// Branch probabilities below this are treated as numerically zero.
inline constexpr double kDegenerateProb = 1e-14;

// Execution policy for the amplitude kernels. `automatic` picks parallel for
// large states when OpenMP is available. Serial and parallel paths produce
// bit-for-bit identical results; `serial` is kept as the reference path.
enum class Exec { automatic, serial, parallel };

// Dense complex state over `num_qubits` qubits, little-endian: qubit 0 is the
// least significant bit of the amplitude index.
class Statevector {
 public:
  Statevector() = default;

  // |0...0> on `num_qubits`.
  explicit Statevector(int num_qubits);

  // Takes ownership of raw amplitudes; length must be a power of two and the
  // norm must be 1 within kNormTol unless `renormalize` is set.
  static Statevector from_amplitudes(std::vector<cplx> amps, bool renormalize = false);

  int num_qubits() const { return num_qubits_; }
  std::uint64_t size() const { return amps_.size(); }
  const std::vector<cplx>& amps() const { return amps_; }
  std::vector<cplx>& amps() { return amps_; }
  cplx amp(std::uint64_t i) const { return amps_[i]; }

  double norm() const;
  void normalize();

  bool operator==(const Statevector&) const = default;

 private:
  int num_qubits_ = 0;
  std::vector<cplx> amps_;
};

// Dense operator on a power-of-two dimensional space. Unitarity/Hermiticity
// are declared through the named factories and validated at construction with
// tolerance 1e-10; the plain factory leaves both flags unset.
class Operator {
 public:
  Operator() = default;

  static Operator unitary(Eigen::MatrixXcd m);
  static Operator hermitian(Eigen::MatrixXcd m);
  static Operator general(Eigen::MatrixXcd m);

  const Eigen::MatrixXcd& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  int num_qubits() const { return num_qubits_; }
  bool is_unitary() const { return unitary_; }
  bool is_hermitian() const { return hermitian_; }

  Operator adjoint() const;

 private:
  Operator(Eigen::MatrixXcd m, bool unitary, bool hermitian);

  Eigen::MatrixXcd m_;
  int num_qubits_ = 0;
  bool unitary_ = false;
  bool hermitian_ = false;
};

// |index> on `num_qubits` qubits.
Statevector make_basis_state(int num_qubits, std::uint64_t index);

// Applies `op` to the listed target qubits, in place; bit j of the operator's
// index space corresponds to targets[j]. Returns the mutated state.
Statevector& apply_operator(Statevector& state, const Operator& op,
                            const std::vector<int>& targets, Exec how = Exec::automatic);

// Applies `op` to `targets` on the subspace where every control qubit is 1.
Statevector& apply_controlled(Statevector& state, const Operator& op,
                              const std::vector<int>& controls,
                              const std::vector<int>& targets, Exec how = Exec::automatic);

// Applies `op` to `targets` on the subspace where the control register reads
// exactly `value` (bit j of `value` sits on controls[j]); other control
// patterns are untouched. Empty controls with value 0 degenerate to
// apply_operator.
Statevector& apply_controlled_on_value(Statevector& state, const Operator& op,
                                       const std::vector<int>& controls,
                                       std::uint64_t value,
                                       const std::vector<int>& targets,
                                       Exec how = Exec::automatic);

// <a|b>, conjugate-linear in the first argument. Deterministic reduction:
// fixed block partials accumulated in index order regardless of thread count.
cplx inner_product(const Statevector& a, const Statevector& b);

// Marginal distribution over the listed qubits; bit j of the outcome index is
// qubits[j]. Sums to 1 within 1e-10 for a normalized state.
std::vector<double> probabilities_on(const Statevector& state, const std::vector<int>& qubits);

// Projects `qubit` onto `outcome` (0 or 1) and renormalizes. Returns the
// projected state together with the branch probability. Throws
// degenerate_postselection_error when the branch probability is < 1e-14.
std::pair<Statevector, double> postselect(const Statevector& state, int qubit, int outcome);

// Projects a whole register onto a basis value. Same degeneracy rule as
// postselect; the register keeps its qubits (amplitudes elsewhere are zeroed).
std::pair<Statevector, double> postselect_register(const Statevector& state,
                                                   const std::vector<int>& qubits,
                                                   std::uint64_t value);

// Seeded measurement histogram over the listed qubits: outcome -> count.
// Same seed, same histogram, independent of execution policy.
std::map<std::uint64_t, std::uint64_t> sample(const Statevector& state,
                                              const std::vector<int>& qubits,
                                              std::uint64_t shots, std::uint64_t seed);

namespace detail {

// In-place single-qubit gate, hand-rolled 2x2 kernel.
void apply_1q(std::vector<cplx>& amps, int num_qubits, const cplx u[2][2], int target, Exec how);

// Multiplies amplitudes whose index has all bits of `mask` set by `phase`.
void apply_phase_on_mask(std::vector<cplx>& amps, std::uint64_t mask, cplx phase, Exec how);

// Multiplies amplitudes whose index matches `sel` on the bits of `mask`.
void apply_phase_on_pattern(std::vector<cplx>& amps, std::uint64_t mask, std::uint64_t sel,
                            cplx phase, Exec how);

// Keeps amplitudes of the subspace where the register `qubits` equals `value`,
// drops those qubits from the state. Weight outside the subspace is discarded;
// the result is renormalized. Used to strip ancilla/index registers.
Statevector extract_register_complement(const Statevector& state, const std::vector<int>& qubits,
                                        std::uint64_t value);

bool exec_parallel(std::uint64_t work, Exec how);

// Smallest k >= 0 with 2^k >= x, exact near powers of two.
int ceil_log2(double x);

}  // namespace detail

}  // namespace qspline
