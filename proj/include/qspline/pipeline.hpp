#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qspline/hhl.hpp"
#include "qspline/spline.hpp"
#include "qspline/stateprep.hpp"
#include "qspline/statevector.hpp"

namespace qspline {

// End-to-end quantum spline engine.  quantum_fit loads the curvature
// right-hand side with the magnitude-binned preparation, runs the phase
// estimation solver for the curvature direction, and recovers the lost
// normalization from one matched row of the tridiagonal system.
// quantum_evaluate then reads S, S', S'' at a point as inner products
// between the curvature state and two-amplitude feature states, either
// exactly or through swap-test estimates.

struct PipelineConfig {
  int phase_bits = 8;
  // Assembled spline systems keep every row sum within 4 and singular
  // values within [1/sqrt(2), 4]; the defaults bake those constants in.
  // eigenvalue_floor = 0 selects 1/(4*sqrt(2)), the smallest normalized
  // eigenvalue the solver must still invert.
  double spectral_bound = 4.0;
  double eigenvalue_floor = 0.0;
  // Additive error for the row-amplitude swap tests used to recover the
  // normalization when shots > 0; the exact register is read otherwise.
  double recovery_epsilon = 1e-2;
  std::uint64_t shots = 0;  // 0 reads exact probabilities end to end
  std::uint64_t seed = 0;
  Exec how = Exec::automatic;
};

struct QuantumFit {
  // Solver register after postselection, still in the embedded layout.
  Statevector solution_state;
  // Unit curvature direction with the global phase fixed so the largest
  // component is real positive.  Zero vector on the flat path.
  Eigen::VectorXd direction;
  double scale = 0.0;          // signed multiplier from the recovery row
  double norm_estimate = 0.0;  // |scale|, the estimated curvature norm
  int scale_row = -1;          // row used for the recovery, -1 on the flat path
  // Every right-hand side entry vanished; the spline is the piecewise
  // linear interpolant and no quantum machinery ran.
  bool zero_curvature = false;
  // Wrapped system: one unknown per interval, knot k reading coordinate
  // k-1 and knot 0 sharing the last one.  Open fits carry one per knot.
  bool periodic = false;
  double success_probability = 0.0;  // solver postselection rate
  double phase_residual = 0.0;
  double fit_fidelity = 0.0;  // squared overlap with the direct banded solve
  double max_imag = 0.0;      // largest imaginary residue dropped by the fix
  double stray_weight = 0.0;  // weight outside the solution coordinates
  // Expected preparation * solve repetitions per accepted curvature state,
  // unassisted and with amplitude amplification.
  double repetitions_naive = 0.0;
  double repetitions_amplified = 0.0;
  BinnedCostReport prep;
  HHLConfig solver;  // exact configuration the solver ran with
};

// Fit the curvatures of the interpolating cubic through the dataset under
// the given boundary condition.  Throws solver_error when the register
// keeps more than 1e-8 weight outside the solution coordinates or the
// recovery row degenerates.
QuantumFit quantum_fit(const SplineDataset& data, const BoundaryCondition& bc,
                       const PipelineConfig& config = {});

struct EvalOptions {
  double epsilon = 1e-3;   // additive error per estimated inner product
  bool swap_tests = false; // false reads exact inner products
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;  // the three estimates use seed, seed+1, seed+2
  Exec how = Exec::automatic;
};

struct QuantumEvaluation {
  double value = 0.0;
  double slope = 0.0;
  double curvature = 0.0;
  // |scale| * ||feature|| * epsilon, the additive error bound on the value
  // in swap-test mode; zero when the register is read exactly.
  double error_budget = 0.0;
  int interval = 0;
};

// Evaluate the fitted spline and its first two derivatives at xt.  Exact
// knot hits bypass the estimate: both value features vanish there and the
// result is the tabulated ordinate.  Throws domain_error outside the knot
// range and input_error when the fit does not match the dataset.
QuantumEvaluation quantum_evaluate(const QuantumFit& fit,
                                   const SplineDataset& data, double xt,
                                   const EvalOptions& options = {});

struct ComparePoint {
  double x = 0.0;
  SplineValue classical;
  QuantumEvaluation quantum;
};

struct CompareReport {
  std::vector<ComparePoint> points;
  double max_value_error = 0.0;
  double max_slope_error = 0.0;
  double max_curvature_error = 0.0;
  double fit_fidelity = 0.0;
  double scale_recovered = 0.0;  // |scale| from the quantum fit
  double scale_classical = 0.0;  // curvature norm of the direct solve
  double success_probability = 0.0;
  double repetitions_naive = 0.0;
  double repetitions_amplified = 0.0;
  BinnedCostReport prep;
};

// Fit once, evaluate the grid both classically and through the quantum
// path, and aggregate the worst-case errors.  Grid points must lie inside
// the knot range.  Each point evaluates with seed + 1000 * index so shot
// noise is independent across the grid yet reruns are bit identical.
CompareReport compare_report(const SplineDataset& data,
                             const BoundaryCondition& bc,
                             const std::vector<double>& grid,
                             const PipelineConfig& config = {},
                             const EvalOptions& eval_options = {});

}  // namespace qspline
