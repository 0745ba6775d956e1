#include "qspline/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qspline {

namespace {

bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

int log2_exact(std::uint64_t v) {
  int k = 0;
  while ((std::uint64_t{1} << k) < v) ++k;
  return k;
}

void check_qubit_list(int num_qubits, const std::vector<int>& qs, const char* what) {
  std::vector<bool> seen(num_qubits, false);
  for (int q : qs) {
    if (q < 0 || q >= num_qubits)
      throw input_error(std::string(what) + ": qubit index out of range");
    if (seen[q]) throw input_error(std::string(what) + ": repeated qubit index");
    seen[q] = true;
  }
}

// Inserts a zero bit at each position, positions ascending.
std::uint64_t expand_index(std::uint64_t c, const std::vector<int>& positions) {
  for (int pos : positions) {
    const std::uint64_t low = c & ((std::uint64_t{1} << pos) - 1);
    c = ((c >> pos) << (pos + 1)) | low;
  }
  return c;
}

// Fixed-block deterministic sum of f(i) over [0, n). The block partition
// depends only on n, so the accumulation order is independent of the thread
// count and of the execution policy.
template <typename T, typename F>
T block_sum(std::uint64_t n, Exec how, F&& f) {
  constexpr std::uint64_t kBlock = 1u << 12;
  const std::uint64_t nblocks = (n + kBlock - 1) / kBlock;
  if (nblocks <= 1) {
    T acc{};
    for (std::uint64_t i = 0; i < n; ++i) acc += f(i);
    return acc;
  }
  std::vector<T> partial(nblocks, T{});
  const bool par = detail::exec_parallel(n, how);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(nblocks); ++b) {
    const std::uint64_t lo = static_cast<std::uint64_t>(b) * kBlock;
    const std::uint64_t hi = std::min(n, lo + kBlock);
    T acc{};
    for (std::uint64_t i = lo; i < hi; ++i) acc += f(i);
    partial[static_cast<std::uint64_t>(b)] = acc;
  }
  (void)par;
  T total{};
  for (const T& v : partial) total += v;
  return total;
}

}  // namespace

namespace detail {

int ceil_log2(double x) {
  if (!std::isfinite(x) || x <= 0.0)
    throw input_error("ceil_log2: argument must be positive and finite");
  int k = static_cast<int>(std::ceil(std::log2(x)));
  if (k < 0) k = 0;
  while (std::ldexp(1.0, k) < x) ++k;
  while (k > 0 && std::ldexp(1.0, k - 1) >= x) --k;
  return k;
}

bool exec_parallel(std::uint64_t work, Exec how) {
#ifdef _OPENMP
  switch (how) {
    case Exec::serial:
      return false;
    case Exec::parallel:
      return true;
    case Exec::automatic:
      return work >= (std::uint64_t{1} << 14) && omp_get_max_threads() > 1;
  }
#else
  (void)work;
  (void)how;
#endif
  return false;
}

}  // namespace detail

Statevector::Statevector(int num_qubits) {
  if (num_qubits < 0) throw input_error("Statevector: negative qubit count");
  if (num_qubits > kMaxQubits)
    throw resource_error("Statevector: qubit count exceeds hard cap of 24");
  num_qubits_ = num_qubits;
  amps_.assign(std::uint64_t{1} << num_qubits, cplx{0.0, 0.0});
  amps_[0] = 1.0;
}

Statevector Statevector::from_amplitudes(std::vector<cplx> amps, bool renormalize) {
  if (!is_pow2(amps.size()))
    throw input_error("from_amplitudes: length must be a power of two");
  Statevector s;
  s.num_qubits_ = log2_exact(amps.size());
  if (s.num_qubits_ > kMaxQubits)
    throw resource_error("from_amplitudes: qubit count exceeds hard cap of 24");
  s.amps_ = std::move(amps);
  const double n = s.norm();
  if (renormalize) {
    if (n < kDegenerateProb) throw input_error("from_amplitudes: zero vector");
    for (auto& a : s.amps_) a /= n;
  } else if (std::abs(n - 1.0) > kNormTol) {
    throw input_error("from_amplitudes: state is not normalized");
  }
  return s;
}

double Statevector::norm() const {
  const auto& a = amps_;
  const double n2 = block_sum<double>(a.size(), Exec::automatic,
                                      [&a](std::uint64_t i) { return std::norm(a[i]); });
  return std::sqrt(n2);
}

void Statevector::normalize() {
  const double n = norm();
  if (n < kDegenerateProb) throw input_error("normalize: zero vector");
  for (auto& a : amps_) a /= n;
}

Operator::Operator(Eigen::MatrixXcd m, bool unitary, bool hermitian)
    : m_(std::move(m)), unitary_(unitary), hermitian_(hermitian) {
  if (m_.rows() != m_.cols()) throw input_error("Operator: matrix must be square");
  if (!is_pow2(static_cast<std::uint64_t>(m_.rows())))
    throw input_error("Operator: dimension must be a power of two");
  num_qubits_ = log2_exact(static_cast<std::uint64_t>(m_.rows()));
  if (unitary_) {
    const double dev = (m_.adjoint() * m_ - Eigen::MatrixXcd::Identity(m_.rows(), m_.cols()))
                           .cwiseAbs()
                           .maxCoeff();
    if (dev > kNormTol) throw input_error("Operator::unitary: U^dag U deviates from identity");
  }
  if (hermitian_) {
    const double dev = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    if (dev > kNormTol) throw input_error("Operator::hermitian: matrix is not self-adjoint");
  }
}

Operator Operator::unitary(Eigen::MatrixXcd m) { return Operator(std::move(m), true, false); }

Operator Operator::hermitian(Eigen::MatrixXcd m) { return Operator(std::move(m), false, true); }

Operator Operator::general(Eigen::MatrixXcd m) { return Operator(std::move(m), false, false); }

Operator Operator::adjoint() const {
  Operator out;
  out.m_ = m_.adjoint();
  out.num_qubits_ = num_qubits_;
  out.unitary_ = unitary_;
  out.hermitian_ = hermitian_;
  return out;
}

Statevector make_basis_state(int num_qubits, std::uint64_t index) {
  Statevector s(num_qubits);
  if (index >= s.size()) throw input_error("make_basis_state: index out of range");
  s.amps()[0] = 0.0;
  s.amps()[index] = 1.0;
  return s;
}

namespace detail {

void apply_1q(std::vector<cplx>& amps, int num_qubits, const cplx u[2][2], int target, Exec how) {
  const std::uint64_t n = amps.size();
  const std::uint64_t half = n >> 1;
  const std::uint64_t step = std::uint64_t{1} << target;
  (void)num_qubits;
  const cplx u00 = u[0][0], u01 = u[0][1], u10 = u[1][0], u11 = u[1][1];
  const bool par = exec_parallel(half, how);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(half); ++b) {
    const std::uint64_t bb = static_cast<std::uint64_t>(b);
    const std::uint64_t i0 = ((bb >> target) << (target + 1)) | (bb & (step - 1));
    const std::uint64_t i1 = i0 | step;
    const cplx a0 = amps[i0], a1 = amps[i1];
    amps[i0] = u00 * a0 + u01 * a1;
    amps[i1] = u10 * a0 + u11 * a1;
  }
  (void)par;
}

void apply_phase_on_mask(std::vector<cplx>& amps, std::uint64_t mask, cplx phase, Exec how) {
  apply_phase_on_pattern(amps, mask, mask, phase, how);
}

void apply_phase_on_pattern(std::vector<cplx>& amps, std::uint64_t mask, std::uint64_t sel,
                            cplx phase, Exec how) {
  const std::uint64_t n = amps.size();
  const bool par = exec_parallel(n, how);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    const std::uint64_t ii = static_cast<std::uint64_t>(i);
    if ((ii & mask) == sel) amps[ii] *= phase;
  }
  (void)par;
}

Statevector extract_register_complement(const Statevector& state, const std::vector<int>& qubits,
                                        std::uint64_t value) {
  check_qubit_list(state.num_qubits(), qubits, "extract_register_complement");
  const int keep = state.num_qubits() - static_cast<int>(qubits.size());
  std::uint64_t sel = 0;
  for (std::size_t j = 0; j < qubits.size(); ++j)
    sel |= ((value >> j) & 1u) << qubits[j];
  std::vector<int> sorted(qubits.begin(), qubits.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<cplx> out(std::uint64_t{1} << keep);
  for (std::uint64_t c = 0; c < out.size(); ++c)
    out[c] = state.amp(expand_index(c, sorted) | sel);
  return Statevector::from_amplitudes(std::move(out), true);
}

}  // namespace detail

namespace {

// Shared dense kernel: applies `u` on `targets` over the subspace where every
// bit of `fixed_mask` is set, other qubits free. `zero_positions` must be the
// ascending union of targets and fixed (control) positions.
void apply_dense_kernel(std::vector<cplx>& amps, const Eigen::MatrixXcd& u,
                        const std::vector<int>& targets, std::uint64_t fixed_mask,
                        const std::vector<int>& zero_positions, Exec how) {
  const std::uint64_t dim = static_cast<std::uint64_t>(u.rows());
  const int free_bits = log2_exact(amps.size()) - static_cast<int>(zero_positions.size());
  const std::uint64_t blocks = std::uint64_t{1} << free_bits;

  std::vector<std::uint64_t> offs(dim);
  for (std::uint64_t t = 0; t < dim; ++t) {
    std::uint64_t o = 0;
    for (std::size_t j = 0; j < targets.size(); ++j)
      if ((t >> j) & 1u) o |= std::uint64_t{1} << targets[j];
    offs[t] = o;
  }

  const bool par = detail::exec_parallel(blocks * dim, how);
#ifdef _OPENMP
#pragma omp parallel if (par)
#endif
  {
    Eigen::VectorXcd in(dim), out(dim);
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
      const std::uint64_t base = expand_index(static_cast<std::uint64_t>(b), zero_positions) | fixed_mask;
      for (std::uint64_t t = 0; t < dim; ++t) in(t) = amps[base + offs[t]];
      out.noalias() = u * in;
      for (std::uint64_t t = 0; t < dim; ++t) amps[base + offs[t]] = out(t);
    }
  }
  (void)par;
}

}  // namespace

Statevector& apply_operator(Statevector& state, const Operator& op,
                            const std::vector<int>& targets, Exec how) {
  check_qubit_list(state.num_qubits(), targets, "apply_operator");
  if (op.dim() != static_cast<Eigen::Index>(std::uint64_t{1} << targets.size()))
    throw input_error("apply_operator: operator dimension does not match target count");

  if (targets.size() == 1) {
    const auto& m = op.matrix();
    const cplx u[2][2] = {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}};
    detail::apply_1q(state.amps(), state.num_qubits(), u, targets[0], how);
    return state;
  }

  std::vector<int> sorted(targets.begin(), targets.end());
  std::sort(sorted.begin(), sorted.end());
  apply_dense_kernel(state.amps(), op.matrix(), targets, 0, sorted, how);
  return state;
}

Statevector& apply_controlled(Statevector& state, const Operator& op,
                              const std::vector<int>& controls,
                              const std::vector<int>& targets, Exec how) {
  check_qubit_list(state.num_qubits(), controls, "apply_controlled");
  check_qubit_list(state.num_qubits(), targets, "apply_controlled");
  for (int c : controls)
    for (int t : targets)
      if (c == t) throw input_error("apply_controlled: control and target overlap");
  if (controls.empty()) return apply_operator(state, op, targets, how);
  if (op.dim() != static_cast<Eigen::Index>(std::uint64_t{1} << targets.size()))
    throw input_error("apply_controlled: operator dimension does not match target count");

  std::uint64_t cmask = 0;
  for (int c : controls) cmask |= std::uint64_t{1} << c;
  std::vector<int> zero(controls.begin(), controls.end());
  zero.insert(zero.end(), targets.begin(), targets.end());
  std::sort(zero.begin(), zero.end());
  apply_dense_kernel(state.amps(), op.matrix(), targets, cmask, zero, how);
  return state;
}

Statevector& apply_controlled_on_value(Statevector& state, const Operator& op,
                                       const std::vector<int>& controls,
                                       std::uint64_t value,
                                       const std::vector<int>& targets, Exec how) {
  check_qubit_list(state.num_qubits(), controls, "apply_controlled_on_value");
  check_qubit_list(state.num_qubits(), targets, "apply_controlled_on_value");
  for (int c : controls)
    for (int t : targets)
      if (c == t) throw input_error("apply_controlled_on_value: control and target overlap");
  if (controls.size() < 64 && (value >> controls.size()))
    throw input_error("apply_controlled_on_value: value out of range");
  if (controls.empty()) return apply_operator(state, op, targets, how);
  if (op.dim() != static_cast<Eigen::Index>(std::uint64_t{1} << targets.size()))
    throw input_error("apply_controlled_on_value: operator dimension does not match target count");

  std::uint64_t sel = 0;
  for (std::size_t j = 0; j < controls.size(); ++j)
    sel |= ((value >> j) & std::uint64_t{1}) << controls[j];
  std::vector<int> zero(controls.begin(), controls.end());
  zero.insert(zero.end(), targets.begin(), targets.end());
  std::sort(zero.begin(), zero.end());
  apply_dense_kernel(state.amps(), op.matrix(), targets, sel, zero, how);
  return state;
}

cplx inner_product(const Statevector& a, const Statevector& b) {
  if (a.num_qubits() != b.num_qubits())
    throw input_error("inner_product: qubit counts differ");
  const auto& va = a.amps();
  const auto& vb = b.amps();
  return block_sum<cplx>(va.size(), Exec::automatic, [&](std::uint64_t i) {
    return std::conj(va[i]) * vb[i];
  });
}

std::vector<double> probabilities_on(const Statevector& state, const std::vector<int>& qubits) {
  check_qubit_list(state.num_qubits(), qubits, "probabilities_on");
  if (qubits.empty()) throw input_error("probabilities_on: empty qubit list");
  std::vector<double> out(std::uint64_t{1} << qubits.size(), 0.0);
  const auto& a = state.amps();
  for (std::uint64_t i = 0; i < a.size(); ++i) {
    std::uint64_t v = 0;
    for (std::size_t j = 0; j < qubits.size(); ++j)
      v |= ((i >> qubits[j]) & 1u) << j;
    out[v] += std::norm(a[i]);
  }
  return out;
}

std::pair<Statevector, double> postselect(const Statevector& state, int qubit, int outcome) {
  if (outcome != 0 && outcome != 1) throw input_error("postselect: outcome must be 0 or 1");
  return postselect_register(state, {qubit}, static_cast<std::uint64_t>(outcome));
}

std::pair<Statevector, double> postselect_register(const Statevector& state,
                                                   const std::vector<int>& qubits,
                                                   std::uint64_t value) {
  check_qubit_list(state.num_qubits(), qubits, "postselect_register");
  if (value >> qubits.size()) throw input_error("postselect_register: value out of range");
  std::uint64_t mask = 0, sel = 0;
  for (std::size_t j = 0; j < qubits.size(); ++j) {
    mask |= std::uint64_t{1} << qubits[j];
    sel |= ((value >> j) & 1u) << qubits[j];
  }
  const auto& a = state.amps();
  const double p = block_sum<double>(a.size(), Exec::automatic, [&](std::uint64_t i) {
    return ((i & mask) == sel) ? std::norm(a[i]) : 0.0;
  });
  if (p < kDegenerateProb)
    throw degenerate_postselection_error("postselect: branch probability below 1e-14");
  std::vector<cplx> out(a.size(), cplx{0.0, 0.0});
  const double scale = 1.0 / std::sqrt(p);
  for (std::uint64_t i = 0; i < a.size(); ++i)
    if ((i & mask) == sel) out[i] = a[i] * scale;
  Statevector s = Statevector::from_amplitudes(std::move(out));
  return {std::move(s), p};
}

std::map<std::uint64_t, std::uint64_t> sample(const Statevector& state,
                                              const std::vector<int>& qubits,
                                              std::uint64_t shots, std::uint64_t seed) {
  const std::vector<double> probs = probabilities_on(state, qubits);
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::map<std::uint64_t, std::uint64_t> hist;
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double r = unif(rng) * acc;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), r);
    const std::uint64_t outcome =
        static_cast<std::uint64_t>(std::distance(cdf.begin(), it == cdf.end() ? it - 1 : it));
    ++hist[outcome];
  }
  return hist;
}

}  // namespace qspline
