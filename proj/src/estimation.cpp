#include "qspline/estimation.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qspline/errors.hpp"
#include "qspline/qpe.hpp"

namespace qspline {

namespace {

constexpr double kPi = std::numbers::pi;

void check_instance(const AmplitudeInstance& instance) {
  if (instance.flag < 0 || instance.flag >= instance.state.num_qubits())
    throw input_error("flag qubit index out of range");
}

std::uint64_t argmax_index(const std::vector<double>& dist) {
  std::uint64_t best = 0;
  for (std::uint64_t y = 1; y < dist.size(); ++y)
    if (dist[y] > dist[best]) best = y;
  return best;
}

}  // namespace

AmplitudeInstance hadamard_test_instance(const Statevector& x, const Statevector& y) {
  if (x.num_qubits() != y.num_qubits())
    throw input_error("hadamard test needs equal register sizes");
  const auto& xa = x.amps();
  const auto& ya = y.amps();
  std::vector<cplx> amps(2 * xa.size());
  for (std::size_t i = 0; i < xa.size(); ++i) {
    amps[i] = 0.5 * (xa[i] + ya[i]);
    amps[xa.size() + i] = 0.5 * (xa[i] - ya[i]);
  }
  return {Statevector::from_amplitudes(std::move(amps)), x.num_qubits()};
}

Operator build_grover_operator(const AmplitudeInstance& instance) {
  check_instance(instance);
  const auto& a = instance.state.amps();
  const auto dim = static_cast<Eigen::Index>(a.size());
  const Eigen::Map<const Eigen::VectorXcd> phi(a.data(), dim);
  Eigen::MatrixXcd g = 2.0 * phi * phi.adjoint();
  g.diagonal().array() -= 1.0;
  // Right-multiplying by the diagonal Y (x) I flips the sign of every
  // column whose flag bit is 0.
  const std::uint64_t bit = std::uint64_t{1} << instance.flag;
  for (Eigen::Index j = 0; j < dim; ++j)
    if (!(static_cast<std::uint64_t>(j) & bit)) g.col(j) = -g.col(j);
  return Operator::unitary(std::move(g));
}

AmplitudeEstimate estimate_amplitude(const AmplitudeInstance& instance, double epsilon,
                                     const EstimationOptions& options) {
  const PhaseEstimationConfig config =
      PhaseEstimationConfig::from_precision(epsilon, options.delta);
  const Operator g = build_grover_operator(instance);
  std::uint64_t best = 0;
  if (options.shots == 0) {
    const PhaseOutcome out = run_qpe(g, instance.state, config, options.how);
    best = argmax_index(out.distribution);
  } else {
    const Statevector joint =
        run_qpe_superposed(g, instance.state, config, options.how);
    std::vector<int> reg(config.n);
    for (int k = 0; k < config.n; ++k) reg[k] = instance.state.num_qubits() + k;
    std::uint64_t top = 0;
    for (const auto& [outcome, count] : sample(joint, reg, options.shots, options.seed))
      if (count > top) {
        top = count;
        best = outcome;
      }
  }
  double f = std::ldexp(static_cast<double>(best), -config.n);
  if (f > 0.5) f = 1.0 - f;
  const double theta = kPi * f;
  return {std::sin(theta), std::cos(theta), theta, f, config.n};
}

double swap_test_real(const Statevector& x, const Statevector& y, double epsilon,
                      const EstimationOptions& options) {
  if (!(epsilon > 0.0) || epsilon >= 1.0)
    throw input_error("swap test precision must lie in (0, 1)");
  const AmplitudeInstance inst = hadamard_test_instance(x, y);
  const AmplitudeEstimate est =
      estimate_amplitude(inst, epsilon / (2.0 * kPi), options);
  return 2.0 * est.sin_theta * est.sin_theta - 1.0;
}

cplx swap_test_full(const Statevector& x, const Statevector& y, double epsilon,
                    const EstimationOptions& options) {
  const double re = swap_test_real(x, y, epsilon, options);
  std::vector<cplx> rotated = y.amps();
  for (auto& a : rotated) a *= cplx(0.0, 1.0);
  const Statevector iy = Statevector::from_amplitudes(std::move(rotated));
  const double im = -swap_test_real(x, iy, epsilon, options);
  return {re, im};
}

}  // namespace qspline
