#include "qspline/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <utility>
#include <vector>

#include "qspline/errors.hpp"
#include "qspline/estimation.hpp"

namespace qspline {

namespace {

constexpr double kStrayTol = 1e-8;
constexpr double kZeroRhsTol = 1e-12;
constexpr double kDegenerateRowTol = 1e-9;
// Both value features vanish exactly at a knot; below this the estimate
// would divide by a zero feature norm.
constexpr double kKnotFeatureTol = 1e-14;

std::uint64_t next_pow2(std::uint64_t v) {
  std::uint64_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

double pick_floor(const PipelineConfig& config) {
  if (config.eigenvalue_floor != 0.0) return config.eigenvalue_floor;
  return 1.0 / (4.0 * std::sqrt(2.0));
}

HHLConfig solver_config(const PipelineConfig& config) {
  HHLConfig h;
  h.phase_bits = config.phase_bits;
  h.spectral_bound = config.spectral_bound;
  h.eigenvalue_floor = pick_floor(config);
  h.shots = config.shots;
  h.seed = config.seed;
  h.how = config.how;
  return h;
}

// Nonzero couplings of one system row as (column, coefficient) pairs.
// Periodic corners append; a repeated column is summed, matching dense().
std::vector<std::pair<int, double>> row_support(const TridiagonalSystem& t,
                                                int r) {
  const int size = t.size();
  std::vector<std::pair<int, double>> terms;
  terms.emplace_back(r, t.diag[r]);
  if (r > 0) terms.emplace_back(r - 1, t.sub[r - 1]);
  if (r + 1 < size) terms.emplace_back(r + 1, t.super[r]);
  if (t.periodic) {
    if (r == 0) terms.emplace_back(size - 1, t.corner_top);
    if (r == size - 1) terms.emplace_back(0, t.corner_bottom);
  }
  return terms;
}

// Row to divide out of the right-hand side: the largest interior entry,
// falling back to the global maximum when the interior vanishes.  Periodic
// systems have no boundary rows, so every row qualifies.
int recovery_row(const TridiagonalSystem& t) {
  const int size = t.size();
  const bool restrict_interior = !t.periodic && size >= 3;
  int best = -1;
  double mag = -1.0;
  const int lo = restrict_interior ? 1 : 0;
  const int hi = restrict_interior ? size - 1 : size;
  for (int r = lo; r < hi; ++r) {
    const double a = std::abs(t.rhs[r]);
    if (a > mag) {
      mag = a;
      best = r;
    }
  }
  if (mag < kZeroRhsTol) {
    for (int r = 0; r < size; ++r) {
      const double a = std::abs(t.rhs[r]);
      if (a > mag) {
        mag = a;
        best = r;
      }
    }
  }
  return best;
}

Statevector state_from_direction(const Eigen::VectorXd& dir,
                                 std::uint64_t padded) {
  std::vector<cplx> amps(padded, cplx(0.0, 0.0));
  for (Eigen::Index i = 0; i < dir.size(); ++i) amps[i] = cplx(dir(i), 0.0);
  return Statevector::from_amplitudes(std::move(amps));
}

// Re<direction|e_j>: the register amplitude, either read exactly or
// estimated with one swap test against the basis state.
double row_amplitude(const Statevector& mstate, const Eigen::VectorXd& dir,
                     int j, const PipelineConfig& config) {
  if (config.shots == 0) return dir(j);
  EstimationOptions opt;
  opt.shots = config.shots;
  opt.seed = config.seed + 101 + static_cast<std::uint64_t>(j);
  opt.how = config.how;
  const Statevector basis =
      make_basis_state(mstate.num_qubits(), static_cast<std::uint64_t>(j));
  return swap_test_real(mstate, basis, config.recovery_epsilon, opt);
}

// Re<curvature|feature> for a two-amplitude feature state on the same
// register.  Exact mode reads the overlap; swap-test mode estimates it
// within options.epsilon.
double component_estimate(const Statevector& mstate, std::uint64_t padded,
                          int j0, double a0, int j1, double a1, double fnorm,
                          const EvalOptions& options, std::uint64_t seed) {
  std::vector<cplx> amps(padded, cplx(0.0, 0.0));
  amps[static_cast<std::uint64_t>(j0)] = cplx(a0 / fnorm, 0.0);
  amps[static_cast<std::uint64_t>(j1)] = cplx(a1 / fnorm, 0.0);
  const Statevector fstate = Statevector::from_amplitudes(std::move(amps));
  if (!options.swap_tests) return inner_product(mstate, fstate).real();
  EstimationOptions opt;
  opt.shots = options.shots;
  opt.seed = seed;
  opt.how = options.how;
  return swap_test_real(mstate, fstate, options.epsilon, opt);
}

}  // namespace

QuantumFit quantum_fit(const SplineDataset& data, const BoundaryCondition& bc,
                       const PipelineConfig& config) {
  const TridiagonalSystem tri = build_system(data, bc);
  const int size = tri.size();
  const SplineSolution direct = thomas_solve(tri);
  // Periodic solutions carry the wrapped knot up front; the system
  // unknowns start at m[1].
  const int moff = static_cast<int>(direct.m.size()) - size;
  const Eigen::Map<const Eigen::VectorXd> oracle(direct.m.data() + moff, size);

  QuantumFit fit;
  fit.solver = solver_config(config);
  fit.periodic = tri.periodic;

  double dmax = 0.0;
  for (double d : tri.rhs) dmax = std::max(dmax, std::abs(d));
  if (dmax < kZeroRhsTol) {
    fit.zero_curvature = true;
    fit.direction = Eigen::VectorXd::Zero(size);
    fit.fit_fidelity = 1.0;
    fit.success_probability = 1.0;
    fit.repetitions_naive = 1.0;
    fit.repetitions_amplified = 1.0;
    return fit;
  }

  const std::uint64_t padded =
      next_pow2(std::max<std::uint64_t>(2, static_cast<std::uint64_t>(size)));
  TargetVector dvec;
  dvec.entries.assign(padded, cplx(0.0, 0.0));
  for (int r = 0; r < size; ++r) dvec.entries[r] = cplx(tri.rhs[r], 0.0);
  auto prepared = prepare_binned(dvec, config.how);
  fit.prep = prepared.second;

  Eigen::MatrixXcd dense = tri.dense().cast<cplx>();
  Eigen::VectorXcd bvec(size);
  for (int r = 0; r < size; ++r) bvec(r) = cplx(tri.rhs[r], 0.0);
  const LinearSystem sys = make_linear_system(dense, bvec);
  const HHLResult res = solve(sys, prepared.first, fit.solver);

  fit.success_probability = res.success_probability;
  fit.phase_residual = res.phase_residual;

  const std::uint64_t block = sys.a.dim();
  const std::uint64_t off = sys.hermitian ? 0 : block;
  double kept = 0.0;
  for (int r = 0; r < size; ++r)
    kept += std::norm(res.solution_state.amp(off + static_cast<std::uint64_t>(r)));
  fit.stray_weight = std::clamp(1.0 - kept, 0.0, 1.0);
  fit.solution_state = res.solution_state;
  if (fit.stray_weight > kStrayTol)
    throw solver_error(
        "quantum_fit: register kept too much weight outside the solution "
        "coordinates");

  Eigen::Index peak = 0;
  res.solution.cwiseAbs().maxCoeff(&peak);
  const cplx phase = res.solution(peak) / std::abs(res.solution(peak));
  const Eigen::VectorXcd fixed = res.solution * std::conj(phase);
  fit.max_imag = fixed.imag().cwiseAbs().maxCoeff();
  Eigen::VectorXd dir = fixed.real();
  dir.normalize();
  fit.direction = dir;
  const double overlap = dir.dot(oracle) / oracle.norm();
  fit.fit_fidelity = overlap * overlap;

  const int row = recovery_row(tri);
  const Statevector mstate = config.shots > 0
                                 ? state_from_direction(dir, padded)
                                 : Statevector();
  double den = 0.0;
  for (const auto& term : row_support(tri, row))
    den += term.second * row_amplitude(mstate, dir, term.first, config);
  if (std::abs(den) < kDegenerateRowTol)
    throw solver_error("quantum_fit: normalization recovery row degenerated");
  fit.scale = tri.rhs[row] / den;
  fit.norm_estimate = std::abs(fit.scale);
  fit.scale_row = row;

  fit.repetitions_naive =
      fit.prep.expected_repetitions * res.repetitions_naive;
  fit.repetitions_amplified = std::sqrt(fit.repetitions_naive);
  return fit;
}

QuantumEvaluation quantum_evaluate(const QuantumFit& fit,
                                   const SplineDataset& data, double xt,
                                   const EvalOptions& options) {
  const int n = data.intervals();
  const int dim = static_cast<int>(fit.direction.size());
  const bool periodic = fit.periodic;
  if (dim != (periodic ? n : n + 1))
    throw input_error("quantum_evaluate: fit does not match the dataset");

  QuantumEvaluation out;
  if (fit.zero_curvature) {
    SplineSolution flat;
    flat.m.assign(data.x.size(), 0.0);
    const SplineValue v = evaluate(data, flat, xt);
    out.value = v.value;
    out.slope = v.slope;
    out.curvature = v.curvature;
    out.interval = v.interval;
    return out;
  }

  const SplineFeatures f = eval_features(data, xt);
  const int i = f.interval;
  out.interval = i;
  const double h = data.h(i);
  const double t1 = data.x[i + 1] - xt;
  const double t0 = xt - data.x[i];

  const auto midx = [&](int k) { return periodic ? (k == 0 ? n - 1 : k - 1) : k; };
  const int j0 = midx(i);
  const int j1 = midx(i + 1);

  const std::uint64_t padded =
      next_pow2(std::max<std::uint64_t>(2, static_cast<std::uint64_t>(dim)));
  const Statevector mstate = state_from_direction(fit.direction, padded);

  const double vnorm = std::hypot(f.curv_left, f.curv_right);
  if (vnorm < kKnotFeatureTol) {
    out.value = f.linear;
  } else {
    const double ip = component_estimate(mstate, padded, j0, f.curv_left, j1,
                                         f.curv_right, vnorm, options,
                                         options.seed);
    out.value = fit.scale * vnorm * ip + f.linear;
    if (options.swap_tests)
      out.error_budget = fit.norm_estimate * vnorm * options.epsilon;
  }

  const double s0 = h / 6.0 - t1 * t1 / (2.0 * h);
  const double s1 = t0 * t0 / (2.0 * h) - h / 6.0;
  const double snorm = std::hypot(s0, s1);
  const double sip = component_estimate(mstate, padded, j0, s0, j1, s1, snorm,
                                        options, options.seed + 1);
  out.slope = fit.scale * snorm * sip + (data.y[i + 1] - data.y[i]) / h;

  const double c0 = t1 / h;
  const double c1 = t0 / h;
  const double cnorm = std::hypot(c0, c1);
  const double cip = component_estimate(mstate, padded, j0, c0, j1, c1, cnorm,
                                        options, options.seed + 2);
  out.curvature = fit.scale * cnorm * cip;
  return out;
}

CompareReport compare_report(const SplineDataset& data,
                             const BoundaryCondition& bc,
                             const std::vector<double>& grid,
                             const PipelineConfig& config,
                             const EvalOptions& eval_options) {
  for (double g : grid)
    if (!(g >= data.x.front() && g <= data.x.back()))
      throw input_error("compare_report: grid point outside the knot range");

  const QuantumFit fit = quantum_fit(data, bc, config);
  const SplineSolution direct = fit_spline(data, bc);

  CompareReport rep;
  rep.points.resize(grid.size());
  std::exception_ptr failure = nullptr;
  const std::int64_t count = static_cast<std::int64_t>(grid.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t idx = 0; idx < count; ++idx) {
    try {
      EvalOptions per = eval_options;
      per.seed = eval_options.seed + 1000 * static_cast<std::uint64_t>(idx);
      ComparePoint& p = rep.points[static_cast<std::size_t>(idx)];
      p.x = grid[static_cast<std::size_t>(idx)];
      p.classical = evaluate(data, direct, p.x);
      p.quantum = quantum_evaluate(fit, data, p.x, per);
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical(qspline_compare_capture)
#endif
      {
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (const ComparePoint& p : rep.points) {
    rep.max_value_error = std::max(rep.max_value_error,
                                   std::abs(p.quantum.value - p.classical.value));
    rep.max_slope_error = std::max(rep.max_slope_error,
                                   std::abs(p.quantum.slope - p.classical.slope));
    rep.max_curvature_error =
        std::max(rep.max_curvature_error,
                 std::abs(p.quantum.curvature - p.classical.curvature));
  }

  const int size = static_cast<int>(fit.direction.size());
  const int moff = static_cast<int>(direct.m.size()) - size;
  const Eigen::Map<const Eigen::VectorXd> oracle(direct.m.data() + moff, size);
  rep.fit_fidelity = fit.fit_fidelity;
  rep.scale_recovered = fit.norm_estimate;
  rep.scale_classical = oracle.norm();
  rep.success_probability = fit.success_probability;
  rep.repetitions_naive = fit.repetitions_naive;
  rep.repetitions_amplified = fit.repetitions_amplified;
  rep.prep = fit.prep;
  return rep;
}

}  // namespace qspline
