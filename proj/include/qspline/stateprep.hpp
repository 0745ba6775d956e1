#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qspline/statevector.hpp"

namespace qspline {

// Amplitude-encoding state preparation: a rotation-tree encoder for a single
// vector, linear combination of prepared components with postselection, and
// two vector loaders built from them. The flat loader uses one component per
// nonzero entry; the binned loader groups entries by magnitude octave first,
// trading the loader's repetition factor down to sqrt(#bins).

struct TargetVector {
  std::vector<cplx> entries;

  std::uint64_t nonzero_count() const;
  double norm() const;
  double max_magnitude() const;
  // Smallest nonzero magnitude; throws input_error when all entries vanish.
  double min_nonzero_magnitude() const;
  // max_magnitude / min_nonzero_magnitude, always >= 1.
  double kappa() const;
};

// Binary rotation tree for one amplitude-encoded vector. Level l holds one
// Y-rotation angle per l-bit prefix of the high qubits; a final diagonal
// applies the entry phases. Depth equals the register width.
struct PrepPlan {
  int num_qubits = 0;
  std::vector<std::vector<double>> angles;  // angles[l].size() == 1 << l
  std::vector<double> phases;               // one per basis state, radians
  double norm = 0.0;                        // Euclidean norm of the source
};

// Plan for `entries` padded with zeros to the next power of two.
PrepPlan build_prep_plan(const std::vector<cplx>& entries);

// Runs the plan on qubits [first, first + plan.num_qubits) of `state`,
// assuming that register currently holds |0..0> on every branch the plan
// touches. `inverse` undoes a previous application.
void apply_prep(Statevector& state, const PrepPlan& plan, int first,
                bool inverse = false, Exec how = Exec::automatic);

// Same, restricted to the branch where the control register reads `value`.
void apply_prep_controlled(Statevector& state, const PrepPlan& plan, int first,
                           const std::vector<int>& controls, std::uint64_t value,
                           bool inverse = false, Exec how = Exec::automatic);

// Encodes x (zero-padded to a power of two) as a quantum state by running
// its rotation tree on |0..0>. The returned state equals x / ||x|| entrywise.
std::pair<PrepPlan, Statevector> amplitude_encode(const TargetVector& x,
                                                  Exec how = Exec::automatic);

// A weighted combination sum_j alpha_j |x_j>. Coefficients must be nonzero;
// components share one register width and are unit vectors by construction.
struct LcuSpec {
  std::vector<cplx> coefficients;
  std::vector<Statevector> components;
};

// Prepares the normalized combination y / ||y||, y = sum_j alpha_j |x_j>, by
// the three-step index-register procedure: encode sqrt(|alpha_j|) on the
// index, prepare component j controlled on index value j (coefficient phases
// ride along here), invert the index encoding, postselect index 0. Returns
// the system state and the postselection probability ||y||^2 / s^2 with
// s = sum_j |alpha_j|. Exact cancellation (y = 0) raises
// degenerate_postselection_error.
std::pair<Statevector, double> lcu_combine(const LcuSpec& spec,
                                           Exec how = Exec::automatic);

// Work accounting for one combination-based loader run.
struct PrepCostReport {
  double s = 0.0;                    // 1-norm of the coefficients
  double norm = 0.0;                 // 2-norm of the target vector
  double kappa = 1.0;
  std::uint64_t nonzeros = 0;
  double repetition_ratio = 0.0;     // s / norm, expected amplification rounds
  double ratio_bound = 0.0;          // kappa * sqrt(nonzeros)
  bool ratio_within_bound = false;
  double success_probability = 0.0;  // norm^2 / s^2, measured
  double expected_repetitions = 0.0; // 1 / success_probability
};

// Loads x / ||x|| with one basis-state component per nonzero entry. Cheap
// per round; the repetition ratio degrades with spread-out magnitudes.
std::pair<Statevector, PrepCostReport> prepare_flat(const TargetVector& x,
                                                    Exec how = Exec::automatic);

// Magnitude-octave split of a vector: bin j holds the entries whose
// magnitude falls in [2^(j-1) b, 2^j b) with b the smallest nonzero
// magnitude; the last bin is closed on the right so the maximum is never
// orphaned. Bins sum to x entrywise; each bin has kappa <= 2; bins with no
// entries stay zero vectors with zero weight.
struct BinDecomposition {
  double base = 0.0;  // smallest nonzero magnitude
  int q = 1;          // bin count, max(1, ceil(log2 kappa))
  std::vector<std::vector<cplx>> bins;
  std::vector<double> weights;  // ||y_j|| / ||x||, sum of squares = 1
};

BinDecomposition bin_decompose(const TargetVector& x);

struct BinnedCostReport {
  int q = 0;
  double weight_sum = 0.0;           // sum_j ||y_j|| / ||x||
  double weight_bound = 0.0;         // sqrt(q)
  bool weight_within_bound = false;
  double success_probability = 0.0;  // outer combination postselection rate
  double expected_repetitions = 0.0;
  std::vector<PrepCostReport> bins;  // one per nonempty bin, in bin order
};

// Loads x / ||x|| by flat-loading each magnitude bin (kappa <= 2 apiece) and
// combining the bins with weights ||y_j|| / ||x||. The combination's
// repetition ratio is bounded by sqrt(q) regardless of kappa(x).
std::pair<Statevector, BinnedCostReport> prepare_binned(const TargetVector& x,
                                                        Exec how = Exec::automatic);

// Unitary whose first column is exactly the unit vector v; the remaining
// columns are an arbitrary orthonormal completion.
Eigen::MatrixXcd unitary_from_first_column(const Eigen::VectorXcd& v);

}  // namespace qspline
