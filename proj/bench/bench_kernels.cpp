// Times the serial and OpenMP execution paths of the hot statevector
// kernels and checks that they produce identical amplitudes.  Usage:
// bench_kernels [max_qubits] (default 20, capped at 24).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qspline/qpe.hpp"
#include "qspline/statevector.hpp"

using qspline::cplx;
using qspline::Exec;
using qspline::Statevector;

namespace {

Statevector random_state(std::mt19937_64& rng, int num_qubits) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cplx> amps(std::size_t{1} << num_qubits);
  for (cplx& a : amps) a = cplx{g(rng), g(rng)};
  return Statevector::from_amplitudes(std::move(amps), true);
}

qspline::Operator random_unitary(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = cplx{g(rng), g(rng)};
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  Eigen::MatrixXcd q = qr.householderQ();
  return qspline::Operator::unitary(q);
}

double max_diff(const Statevector& a, const Statevector& b) {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a.amp(i) - b.amp(i)));
  return worst;
}

template <typename Fn>
double time_reps(int reps, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) fn();
  const double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return total / reps;
}

struct Kernel {
  const char* name;
  void (*run)(Statevector&, const qspline::Operator&, const qspline::Operator&,
              Exec);
};

void run_single(Statevector& s, const qspline::Operator& one,
                const qspline::Operator&, Exec how) {
  qspline::apply_operator(s, one, {s.num_qubits() / 2}, how);
}

void run_pair(Statevector& s, const qspline::Operator&,
              const qspline::Operator& two, Exec how) {
  qspline::apply_operator(s, two, {1, s.num_qubits() - 2}, how);
}

void run_controlled(Statevector& s, const qspline::Operator&,
                    const qspline::Operator& two, Exec how) {
  qspline::apply_controlled(s, two, {0}, {2, s.num_qubits() - 1}, how);
}

void run_fourier(Statevector& s, const qspline::Operator&,
                 const qspline::Operator&, Exec how) {
  qspline::apply_qft_register(s, 0, s.num_qubits(), false, how);
  qspline::apply_qft_register(s, 0, s.num_qubits(), true, how);
}

}  // namespace

int main(int argc, char** argv) {
  int max_qubits = 20;
  if (argc > 1) max_qubits = std::atoi(argv[1]);
  max_qubits = std::clamp(max_qubits, 10, 24);

  std::mt19937_64 rng(42);
  const qspline::Operator one = random_unitary(rng, 2);
  const qspline::Operator two = random_unitary(rng, 4);

  const Kernel kernels[] = {
      {"single-qubit gate", run_single},
      {"two-qubit gate", run_pair},
      {"controlled two-qubit", run_controlled},
      {"fourier round trip", run_fourier},
  };

  std::printf("%-22s %7s %5s %12s %12s %9s %10s\n", "kernel", "qubits", "reps",
              "serial s", "parallel s", "speedup", "max |diff|");
  for (int nq = std::max(10, max_qubits - 4); nq <= max_qubits; nq += 2) {
    const Statevector base = random_state(rng, nq);
    for (const Kernel& k : kernels) {
      const int reps = nq >= 22 ? 2 : (nq >= 18 ? 5 : 20);
      Statevector serial = base;
      Statevector parallel = base;
      const double ts =
          time_reps(reps, [&] { k.run(serial, one, two, Exec::serial); });
      const double tp =
          time_reps(reps, [&] { k.run(parallel, one, two, Exec::parallel); });
      std::printf("%-22s %7d %5d %12.6f %12.6f %8.2fx %10.2e\n", k.name, nq,
                  reps, ts, tp, ts / tp, max_diff(serial, parallel));
    }
  }
  return 0;
}
