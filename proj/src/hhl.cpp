#include "qspline/hhl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "qspline/errors.hpp"
#include "qspline/qpe.hpp"

namespace qspline {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHermTol = 1e-12;
constexpr double kAliasTol = 1e-9;
// Below this rotation amplitude the ancilla is left alone (no-rotation
// sentinel in the per-value table).
constexpr double kSkipRotation = std::numeric_limits<double>::quiet_NaN();

std::uint64_t next_pow2(std::uint64_t v) {
  std::uint64_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

int exact_log2(std::uint64_t v) {
  int n = 0;
  while ((std::uint64_t{1} << n) < v) ++n;
  return n;
}

// Fractions in [1/2, 1) represent negative phases.
double wrap_fraction(double f) { return f >= 0.5 ? f - 1.0 : f; }

// Largest |phase fraction| a signed n-bit register can hold.
double phase_window(int n) { return 0.5 - std::ldexp(1.0, -n); }

double gershgorin_row_bound(const Eigen::MatrixXcd& h) {
  double bound = 0.0;
  for (Eigen::Index i = 0; i < h.rows(); ++i) bound = std::max(bound, h.row(i).cwiseAbs().sum());
  return bound;
}

double horner(const std::vector<double>& coeffs, double x) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

void validate_config_common(const HHLConfig& cfg) {
  if (cfg.phase_bits < 1) throw input_error("hhl: phase_bits must be at least 1");
  if (!(cfg.evolution_time >= 0.0) || !std::isfinite(cfg.evolution_time))
    throw input_error("hhl: evolution_time must be finite and non-negative");
  if (!(cfg.spectral_bound >= 0.0) || !std::isfinite(cfg.spectral_bound))
    throw input_error("hhl: spectral_bound must be finite and non-negative");
  if (!(cfg.floor_weight_gate >= 0.0 && cfg.floor_weight_gate <= 1.0))
    throw input_error("hhl: floor_weight_gate must lie in [0, 1]");
}

Eigen::VectorXcd normalized_rhs(const LinearSystem& system) {
  Eigen::VectorXcd b(static_cast<Eigen::Index>(system.b.entries.size()));
  for (Eigen::Index i = 0; i < b.size(); ++i)
    b(i) = system.b.entries[static_cast<std::size_t>(i)];
  const double nrm = b.norm();
  if (nrm <= 0.0) throw input_error("hhl: rhs has zero norm");
  return b / nrm;
}

Eigen::VectorXcd rhs_from_state(const LinearSystem& system, const Statevector& prepared) {
  if (prepared.size() != static_cast<std::uint64_t>(system.a.dim()))
    throw input_error("hhl: prepared rhs dimension does not match the system");
  Eigen::VectorXcd b(system.a.dim());
  for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = prepared.amp(static_cast<std::uint64_t>(i));
  return b;
}

// [[cos, a], [-a, cos]] on the ancilla; takes |1> to a|0> + cos|1>, so the
// unrotated ancilla stays on the failure branch.
Operator inversion_rotation(double a) {
  const double c = std::sqrt(std::max(0.0, 1.0 - a * a));
  Eigen::MatrixXcd r(2, 2);
  r << c, a, -a, c;
  return Operator::unitary(std::move(r));
}

struct CircuitSetup {
  Eigen::MatrixXcd h;           // hermitian matrix actually solved
  Eigen::VectorXcd b;           // unit-norm rhs in the solve coordinates
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig;
  double t = 0.0;
  double lambda_eff = 0.0;      // eigenvalue decoding at the window edge
  int system_qubits = 0;
};

CircuitSetup prepare_setup(const LinearSystem& system, const Eigen::VectorXcd& rhs,
                           const HHLConfig& cfg) {
  CircuitSetup s;
  if (system.hermitian) {
    s.h = system.a.matrix();
    s.b = rhs;
  } else {
    s.h = hermitian_embed(system.a.matrix());
    s.b = Eigen::VectorXcd::Zero(s.h.rows());
    s.b.head(rhs.size()) = rhs;
  }
  s.system_qubits = exact_log2(static_cast<std::uint64_t>(s.h.rows()));
  const int total = s.system_qubits + cfg.phase_bits + 1;
  if (total > kMaxQubits) throw resource_error("hhl: register layout exceeds the qubit limit");

  s.eig.compute(s.h);
  if (s.eig.info() != Eigen::Success) throw solver_error("hhl: eigendecomposition failed");

  double bound = cfg.spectral_bound;
  if (bound == 0.0) bound = gershgorin_row_bound(s.h);
  if (bound <= 0.0) throw input_error("hhl: system matrix is zero");

  const double window = phase_window(cfg.phase_bits);
  s.t = cfg.evolution_time > 0.0 ? cfg.evolution_time : 2.0 * kPi * window / bound;
  s.lambda_eff = 2.0 * kPi * window / s.t;

  const double top = s.eig.eigenvalues().cwiseAbs().maxCoeff();
  if (top > s.lambda_eff * (1.0 + kAliasTol))
    throw input_error("hhl: evolution time aliases the spectrum");
  return s;
}

struct CircuitOutcome {
  Statevector system_state;
  double success_exact = 0.0;
  double success_reported = 0.0;
  double residual = 0.0;
};

// Runs [system][phase][ancilla] with the ancilla starting in |1>, applying
// the per-value rotation table between phase estimation and uncomputation.
CircuitOutcome run_circuit(const CircuitSetup& s, const std::vector<double>& rotation,
                           const HHLConfig& cfg) {
  const int sq = s.system_qubits;
  const int n = cfg.phase_bits;
  const int anc = sq + n;
  const std::uint64_t joint = std::uint64_t{1} << (sq + n + 1);

  Eigen::VectorXcd phases(s.eig.eigenvalues().size());
  for (Eigen::Index j = 0; j < phases.size(); ++j)
    phases(j) = std::exp(cplx(0.0, s.t * s.eig.eigenvalues()(j)));
  const Eigen::MatrixXcd u =
      s.eig.eigenvectors() * phases.asDiagonal() * s.eig.eigenvectors().adjoint();

  std::vector<cplx> amps(joint, cplx{});
  const std::uint64_t base = std::uint64_t{1} << anc;
  for (Eigen::Index i = 0; i < s.b.size(); ++i)
    amps[base + static_cast<std::uint64_t>(i)] = s.b(i);
  Statevector state = Statevector::from_amplitudes(std::move(amps));

  detail::qpe_forward(state, u, sq, n, cfg.how);

  std::vector<int> phase_qubits(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) phase_qubits[static_cast<std::size_t>(k)] = sq + k;
  for (std::uint64_t y = 0; y < (std::uint64_t{1} << n); ++y) {
    const double a = rotation[y];
    if (std::isnan(a)) continue;
    apply_controlled_on_value(state, inversion_rotation(a), phase_qubits, y, {anc}, cfg.how);
  }

  detail::qpe_backward(state, u, sq, n, cfg.how);

  CircuitOutcome out;
  out.success_exact = probabilities_on(state, {anc})[0];
  out.success_reported = out.success_exact;
  if (cfg.shots > 0) {
    const auto hist = sample(state, {anc}, cfg.shots, cfg.seed);
    const auto hit = hist.find(0);
    const auto count = hit == hist.end() ? std::uint64_t{0} : hit->second;
    out.success_reported = static_cast<double>(count) / static_cast<double>(cfg.shots);
  }

  auto [kept, p_anc] = postselect(state, anc, 0);
  out.residual = std::clamp(1.0 - probabilities_on(kept, phase_qubits)[0], 0.0, 1.0);
  auto [cleared, p_phase] = postselect_register(kept, phase_qubits, 0);

  std::vector<int> aux(phase_qubits);
  aux.push_back(anc);
  out.system_state = detail::extract_register_complement(cleared, aux, 0);
  return out;
}

Eigen::VectorXcd strip_solution(const Statevector& sys_state, const LinearSystem& system) {
  const Eigen::Index pad = system.a.dim();
  const Eigen::Index offset = system.hermitian ? 0 : pad;
  Eigen::VectorXcd out(system.original_dim);
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out(i) = sys_state.amp(static_cast<std::uint64_t>(offset + i));
  const double nrm = out.norm();
  if (nrm < 1e-12)
    throw degenerate_postselection_error("hhl: solution has no weight on the original coordinates");
  return out / nrm;
}

HHLResult finish(CircuitOutcome&& out, const LinearSystem& system, double norm_scale) {
  HHLResult res;
  res.solution = strip_solution(out.system_state, system);
  res.solution_state = std::move(out.system_state);
  res.success_probability = out.success_reported;
  res.phase_residual = out.residual;
  res.norm_estimate = std::sqrt(out.success_reported) / norm_scale;
  if (out.success_reported > 0.0) {
    res.repetitions_naive = 1.0 / out.success_reported;
    res.repetitions_amplified = 1.0 / std::sqrt(out.success_reported);
  } else {
    res.repetitions_naive = std::numeric_limits<double>::infinity();
    res.repetitions_amplified = std::numeric_limits<double>::infinity();
  }
  return res;
}

HHLResult solve_impl(const LinearSystem& system, const Eigen::VectorXcd& rhs,
                     const HHLConfig& cfg) {
  validate_config_common(cfg);
  if (!(cfg.eigenvalue_floor > 0.0 && cfg.eigenvalue_floor < 1.0))
    throw input_error("hhl: eigenvalue_floor must lie in (0, 1)");
  double c = cfg.inversion_constant;
  if (c == 0.0) c = cfg.eigenvalue_floor;
  if (!(c > 0.0) || c > cfg.eigenvalue_floor * (1.0 + 1e-12))
    throw input_error("hhl: inversion_constant must lie in (0, eigenvalue_floor]");

  CircuitSetup s = prepare_setup(system, rhs, cfg);

  // Input weight on eigenvectors the floor declares non-invertible.
  const Eigen::VectorXcd overlaps = s.eig.eigenvectors().adjoint() * s.b;
  double below = 0.0;
  for (Eigen::Index j = 0; j < overlaps.size(); ++j) {
    if (std::abs(s.eig.eigenvalues()(j)) / s.lambda_eff < cfg.eigenvalue_floor)
      below += std::norm(overlaps(j));
  }
  if (below > cfg.floor_weight_gate)
    throw ill_conditioned_error("hhl: rhs weight below the eigenvalue floor exceeds the gate");

  const double window = phase_window(cfg.phase_bits);
  const std::uint64_t values = std::uint64_t{1} << cfg.phase_bits;
  std::vector<double> rotation(values, kSkipRotation);
  for (std::uint64_t y = 1; y < values; ++y) {
    const double u = wrap_fraction(std::ldexp(static_cast<double>(y), -cfg.phase_bits)) / window;
    if (std::abs(u) < cfg.eigenvalue_floor) continue;
    rotation[y] = c / u;
  }

  CircuitOutcome out = run_circuit(s, rotation, cfg);
  return finish(std::move(out), system, c * s.lambda_eff);
}

HHLResult matrix_function_impl(const LinearSystem& system, const Eigen::VectorXcd& rhs,
                               const std::vector<double>& poly, const HHLConfig& cfg) {
  validate_config_common(cfg);
  if (!system.hermitian)
    throw input_error("hhl: polynomial application needs a hermitian system");
  if (poly.empty()) throw input_error("hhl: polynomial has no coefficients");
  for (const double coeff : poly)
    if (!std::isfinite(coeff)) throw input_error("hhl: polynomial coefficient is not finite");

  CircuitSetup s = prepare_setup(system, rhs, cfg);

  const std::uint64_t values = std::uint64_t{1} << cfg.phase_bits;
  std::vector<double> rotation(values);
  for (std::uint64_t y = 0; y < values; ++y) {
    const double sigma = signed_phase_decode(y, cfg.phase_bits, s.t);
    const double a = horner(poly, sigma);
    if (std::abs(a) > 1.0 + 1e-12)
      throw input_error("hhl: polynomial exceeds unit magnitude on the decodable range");
    rotation[y] = std::clamp(a, -1.0, 1.0);
  }

  CircuitOutcome out = run_circuit(s, rotation, cfg);
  return finish(std::move(out), system, 1.0);
}

}  // namespace

LinearSystem make_linear_system(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& b) {
  if (a.rows() == 0 || a.rows() != a.cols())
    throw input_error("make_linear_system: matrix must be square and non-empty");
  if (b.size() != a.rows())
    throw input_error("make_linear_system: rhs length does not match the matrix");
  if (!a.allFinite() || !b.allFinite())
    throw input_error("make_linear_system: entries must be finite");
  if (b.norm() <= 0.0) throw input_error("make_linear_system: rhs is zero");

  const Eigen::Index dim = a.rows();
  const Eigen::Index padded =
      static_cast<Eigen::Index>(next_pow2(static_cast<std::uint64_t>(std::max<Eigen::Index>(dim, 2))));
  Eigen::MatrixXcd ap = Eigen::MatrixXcd::Identity(padded, padded);
  ap.topLeftCorner(dim, dim) = a;

  const bool hermitian = (a - a.adjoint()).cwiseAbs().maxCoeff() <= kHermTol;

  LinearSystem sys;
  sys.a = hermitian ? Operator::hermitian(std::move(ap)) : Operator::general(std::move(ap));
  sys.b.entries.assign(static_cast<std::size_t>(padded), cplx{});
  for (Eigen::Index i = 0; i < dim; ++i) sys.b.entries[static_cast<std::size_t>(i)] = b(i);
  sys.hermitian = hermitian;
  sys.original_dim = static_cast<int>(dim);
  return sys;
}

Eigen::MatrixXcd hermitian_embed(const Eigen::MatrixXcd& a) {
  if (a.rows() == 0 || a.rows() != a.cols())
    throw input_error("hermitian_embed: matrix must be square and non-empty");
  const Eigen::Index dim = a.rows();
  Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(2 * dim, 2 * dim);
  e.topRightCorner(dim, dim) = a;
  e.bottomLeftCorner(dim, dim) = a.adjoint();
  return e;
}

Operator evolve(const Operator& a, double t) {
  if (!a.is_hermitian()) throw input_error("evolve: generator must carry the hermitian flag");
  if (!std::isfinite(t)) throw input_error("evolve: time must be finite");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(a.matrix());
  if (eig.info() != Eigen::Success) throw solver_error("evolve: eigendecomposition failed");
  Eigen::VectorXcd phases(eig.eigenvalues().size());
  for (Eigen::Index j = 0; j < phases.size(); ++j)
    phases(j) = std::exp(cplx(0.0, t * eig.eigenvalues()(j)));
  return Operator::unitary(eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint());
}

double signed_phase_decode(std::uint64_t value, int phase_bits, double evolution_time) {
  if (phase_bits < 1 || phase_bits > 62)
    throw input_error("signed_phase_decode: phase_bits out of range");
  if (value >= (std::uint64_t{1} << phase_bits))
    throw input_error("signed_phase_decode: value does not fit the register");
  if (evolution_time == 0.0 || !std::isfinite(evolution_time))
    throw input_error("signed_phase_decode: evolution time must be finite and nonzero");
  const double f = wrap_fraction(std::ldexp(static_cast<double>(value), -phase_bits));
  return 2.0 * kPi * f / evolution_time;
}

HHLResult solve(const LinearSystem& system, const HHLConfig& config) {
  return solve_impl(system, normalized_rhs(system), config);
}

HHLResult solve(const LinearSystem& system, const Statevector& prepared_b,
                const HHLConfig& config) {
  return solve_impl(system, rhs_from_state(system, prepared_b), config);
}

HHLResult apply_matrix_function(const LinearSystem& system,
                                const std::vector<double>& poly_coefficients,
                                const HHLConfig& config) {
  return matrix_function_impl(system, normalized_rhs(system), poly_coefficients, config);
}

HHLResult apply_matrix_function(const LinearSystem& system, const Statevector& prepared_b,
                                const std::vector<double>& poly_coefficients,
                                const HHLConfig& config) {
  return matrix_function_impl(system, rhs_from_state(system, prepared_b), poly_coefficients,
                              config);
}

}  // namespace qspline
