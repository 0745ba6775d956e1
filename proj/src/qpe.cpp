#include "qspline/qpe.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <utility>

#include "qspline/errors.hpp"

namespace qspline {

namespace {

constexpr double kPi = std::numbers::pi;

void check_config(const PhaseEstimationConfig& c, const char* where) {
  if (c.n < 1 || c.m < 1 || c.m > c.n)
    throw input_error(std::string(where) + ": need 1 <= m <= n");
}

}  // namespace

namespace detail {

void swap_qubits(Statevector& state, int a, int b, Exec how) {
  if (a == b) return;
  if (a > b) std::swap(a, b);
  auto& amps = state.amps();
  const std::uint64_t pairs = state.size() >> 2;
  const std::uint64_t bita = std::uint64_t{1} << a;
  const std::uint64_t bitb = std::uint64_t{1} << b;
  const bool par = exec_parallel(pairs, how);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(pairs); ++c) {
    std::uint64_t i = static_cast<std::uint64_t>(c);
    std::uint64_t low = i & (bita - 1);
    i = ((i >> a) << (a + 1)) | low;
    low = i & (bitb - 1);
    i = ((i >> b) << (b + 1)) | low;
    std::swap(amps[i | bita], amps[i | bitb]);
  }
  (void)par;
}

void qpe_forward(Statevector& state, const Eigen::MatrixXcd& u, int first_phase,
                 int n, Exec how) {
  const int sys = first_phase;
  if (sys < 1 || n < 1 || sys + n > state.num_qubits())
    throw input_error("qpe_forward: register layout does not fit the state");
  if (u.rows() != u.cols() ||
      u.rows() != static_cast<Eigen::Index>(std::uint64_t{1} << sys))
    throw input_error("qpe_forward: operator dimension does not match the system");

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const cplx h[2][2] = {{inv_sqrt2, inv_sqrt2}, {inv_sqrt2, -inv_sqrt2}};
  for (int k = 0; k < n; ++k)
    apply_1q(state.amps(), state.num_qubits(), h, first_phase + k, how);

  std::vector<int> sys_q(static_cast<std::size_t>(sys));
  std::iota(sys_q.begin(), sys_q.end(), 0);
  Eigen::MatrixXcd upow = u;
  for (int k = 0; k < n; ++k) {
    if (k > 0) upow = (upow * upow).eval();
    apply_controlled(state, Operator::general(upow), {first_phase + k}, sys_q, how);
  }

  apply_qft_register(state, first_phase, n, true, how);
}

void qpe_backward(Statevector& state, const Eigen::MatrixXcd& u, int first_phase,
                  int n, Exec how) {
  const int sys = first_phase;
  if (sys < 1 || n < 1 || sys + n > state.num_qubits())
    throw input_error("qpe_backward: register layout does not fit the state");

  apply_qft_register(state, first_phase, n, false, how);

  std::vector<int> sys_q(static_cast<std::size_t>(sys));
  std::iota(sys_q.begin(), sys_q.end(), 0);
  Eigen::MatrixXcd upow = u;
  for (int k = 0; k < n; ++k) {
    if (k > 0) upow = (upow * upow).eval();
    apply_controlled(state, Operator::general(upow.adjoint()), {first_phase + k},
                     sys_q, how);
  }

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const cplx h[2][2] = {{inv_sqrt2, inv_sqrt2}, {inv_sqrt2, -inv_sqrt2}};
  for (int k = 0; k < n; ++k)
    apply_1q(state.amps(), state.num_qubits(), h, first_phase + k, how);
}

}  // namespace detail

void apply_qft_register(Statevector& state, int first, int n, bool inverse,
                        Exec how) {
  if (first < 0 || n < 1 || first + n > state.num_qubits())
    throw input_error("apply_qft_register: register does not fit the state");
  auto& amps = state.amps();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const cplx h[2][2] = {{inv_sqrt2, inv_sqrt2}, {inv_sqrt2, -inv_sqrt2}};
  // Two-qubit phase on (first+j, first+k) by 2*pi/2^(j-k+1); diagonal, so
  // the ordering inside one layer is immaterial.
  const auto cphase = [&](int j, int k, double sign) {
    const std::uint64_t mask = (std::uint64_t{1} << (first + j)) |
                               (std::uint64_t{1} << (first + k));
    const double ang = sign * 2.0 * kPi / std::ldexp(1.0, j - k + 1);
    detail::apply_phase_on_mask(amps, mask, std::polar(1.0, ang), how);
  };
  if (!inverse) {
    for (int j = n - 1; j >= 0; --j) {
      detail::apply_1q(amps, state.num_qubits(), h, first + j, how);
      for (int k = j - 1; k >= 0; --k) cphase(j, k, 1.0);
    }
    for (int j = 0; j < n / 2; ++j)
      detail::swap_qubits(state, first + j, first + n - 1 - j, how);
  } else {
    for (int j = 0; j < n / 2; ++j)
      detail::swap_qubits(state, first + j, first + n - 1 - j, how);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < j; ++k) cphase(j, k, -1.0);
      detail::apply_1q(amps, state.num_qubits(), h, first + j, how);
    }
  }
}

Eigen::MatrixXcd qft_matrix(int n) {
  if (n < 1) throw input_error("qft_matrix: need at least one qubit");
  if (n > 12) throw resource_error("qft_matrix: dense transform capped at 12 qubits");
  const std::uint64_t dim = std::uint64_t{1} << n;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  Eigen::MatrixXcd f(dim, dim);
  for (std::uint64_t x = 0; x < dim; ++x) {
    for (std::uint64_t y = 0; y < dim; ++y) {
      const std::uint64_t r = (x * y) % dim;
      f(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) =
          scale * std::polar(1.0, 2.0 * kPi * static_cast<double>(r) /
                                      static_cast<double>(dim));
    }
  }
  return f;
}

int required_qubits(double epsilon, double delta) {
  if (!std::isfinite(epsilon) || epsilon <= 0.0 || epsilon >= 1.0)
    throw input_error("required_qubits: precision must lie in (0, 1)");
  if (!std::isfinite(delta) || delta <= 0.0 || delta >= 1.0)
    throw input_error("required_qubits: failure budget must lie in (0, 1)");
  return detail::ceil_log2(1.0 / epsilon) +
         detail::ceil_log2(2.0 + 1.0 / (2.0 * delta));
}

PhaseEstimationConfig PhaseEstimationConfig::from_precision(double epsilon,
                                                            double delta) {
  if (!std::isfinite(epsilon) || epsilon <= 0.0 || epsilon >= 1.0)
    throw input_error("from_precision: precision must lie in (0, 1)");
  if (!std::isfinite(delta) || delta <= 0.0 || delta >= 1.0)
    throw input_error("from_precision: failure budget must lie in (0, 1)");
  PhaseEstimationConfig c;
  c.m = detail::ceil_log2(1.0 / epsilon);
  c.n = c.m + detail::ceil_log2(2.0 + 1.0 / (2.0 * delta));
  c.delta = delta;
  return c;
}

Statevector run_qpe_superposed(const Operator& u, const Statevector& input,
                               const PhaseEstimationConfig& config, Exec how) {
  check_config(config, "run_qpe_superposed");
  if (!u.is_unitary())
    throw input_error("run_qpe_superposed: operator must be unitary");
  if (input.num_qubits() != u.num_qubits())
    throw input_error("run_qpe_superposed: state does not match the operator");
  const int sys = u.num_qubits();
  if (sys + config.n > kMaxQubits)
    throw resource_error("run_qpe_superposed: register exceeds the qubit cap");
  Statevector joint(sys + config.n);
  for (std::uint64_t i = 0; i < input.size(); ++i) joint.amps()[i] = input.amp(i);
  detail::qpe_forward(joint, u.matrix(), sys, config.n, how);
  return joint;
}

PhaseOutcome run_qpe(const Operator& u, const Statevector& eigenstate,
                     const PhaseEstimationConfig& config, Exec how) {
  const Statevector joint = run_qpe_superposed(u, eigenstate, config, how);
  std::vector<int> phase_q(static_cast<std::size_t>(config.n));
  std::iota(phase_q.begin(), phase_q.end(), u.num_qubits());
  PhaseOutcome out;
  out.n = config.n;
  out.m = config.m;
  out.delta = config.delta;
  out.distribution = probabilities_on(joint, phase_q);
  return out;
}

PhaseOutcome good_set_outcome(double theta, const PhaseEstimationConfig& config) {
  check_config(config, "good_set_outcome");
  if (!std::isfinite(theta) || theta < 0.0 || theta >= 1.0)
    throw input_error("good_set_outcome: phase must lie in [0, 1)");
  const int p = config.p();
  if (p < 2)
    throw bound_inapplicable_error(
        "good_set_outcome: the window bound needs at least two confidence bits");

  Eigen::MatrixXcd u(2, 2);
  u.setZero();
  u(0, 0) = 1.0;
  u(1, 1) = std::polar(1.0, 2.0 * kPi * theta);
  PhaseOutcome out =
      run_qpe(Operator::unitary(u), make_basis_state(1, 1), config);

  const std::uint64_t big_n = std::uint64_t{1} << config.n;
  const std::uint64_t window = std::uint64_t{1} << p;
  std::uint64_t alpha =
      static_cast<std::uint64_t>(std::floor(theta * std::ldexp(1.0, config.m)));
  const std::uint64_t alpha_max = (std::uint64_t{1} << config.m) - 1;
  if (alpha > alpha_max) alpha = alpha_max;

  GoodSet good;
  good.outcomes.reserve(window + 1);
  double mass = 0.0;
  for (std::uint64_t t = 0; t <= window; ++t) {
    const std::uint64_t y = (window * alpha + t) % big_n;
    good.outcomes.push_back(y);
    mass += out.distribution[y];
  }
  good.probability = mass;
  good.lower_bound = 1.0 - 1.0 / (2.0 * (std::ldexp(1.0, p) - 2.0));
  good.bound_satisfied = good.probability >= good.lower_bound - 1e-12;
  out.good = std::move(good);
  return out;
}

double good_set_probability(double theta, const PhaseEstimationConfig& config) {
  return good_set_outcome(theta, config).good->probability;
}

}  // namespace qspline
