#include "qspline/stateprep.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>

#include "qspline/errors.hpp"

namespace qspline {

namespace {

int qubits_for(std::uint64_t m) {
  int k = 0;
  while ((std::uint64_t{1} << k) < m) ++k;
  return k;
}

void check_finite(const std::vector<cplx>& entries, const char* where) {
  for (const cplx& a : entries)
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      throw input_error(std::string(where) + ": entries must be finite");
}

// Unitary sending |0> to the component state, with the coefficient phase
// folded into the used column. Basis states get an exact column swap.
Eigen::MatrixXcd component_unitary(const Statevector& comp, cplx alpha) {
  const cplx phase = alpha / std::abs(alpha);
  const auto& a = comp.amps();
  const Eigen::Index dim = static_cast<Eigen::Index>(a.size());
  std::uint64_t hits = 0, pos = 0;
  for (std::uint64_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i]) > 0.0) {
      ++hits;
      pos = i;
    }
  }
  if (hits == 1) {
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Identity(dim, dim);
    if (pos != 0) w.col(0).swap(w.col(static_cast<Eigen::Index>(pos)));
    w.col(0) *= a[pos] * phase;
    return w;
  }
  Eigen::VectorXcd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = a[static_cast<std::uint64_t>(i)];
  Eigen::MatrixXcd w = unitary_from_first_column(v);
  w.col(0) *= phase;
  return w;
}

}  // namespace

std::uint64_t TargetVector::nonzero_count() const {
  std::uint64_t n = 0;
  for (const cplx& a : entries)
    if (std::abs(a) > 0.0) ++n;
  return n;
}

double TargetVector::norm() const {
  double s = 0.0;
  for (const cplx& a : entries) s += std::norm(a);
  return std::sqrt(s);
}

double TargetVector::max_magnitude() const {
  double m = 0.0;
  for (const cplx& a : entries) m = std::max(m, std::abs(a));
  return m;
}

double TargetVector::min_nonzero_magnitude() const {
  double m = 0.0;
  for (const cplx& a : entries) {
    const double v = std::abs(a);
    if (v > 0.0 && (m == 0.0 || v < m)) m = v;
  }
  if (m == 0.0) throw input_error("TargetVector: all entries are zero");
  return m;
}

double TargetVector::kappa() const {
  return max_magnitude() / min_nonzero_magnitude();
}

PrepPlan build_prep_plan(const std::vector<cplx>& entries) {
  if (entries.empty()) throw input_error("build_prep_plan: empty vector");
  check_finite(entries, "build_prep_plan");
  const int nq = qubits_for(entries.size());
  if (nq > kMaxQubits) throw resource_error("build_prep_plan: vector exceeds the qubit cap");
  const std::uint64_t dim = std::uint64_t{1} << nq;

  PrepPlan plan;
  plan.num_qubits = nq;
  plan.phases.assign(dim, 0.0);
  std::vector<double> leaf(dim, 0.0);
  double norm2 = 0.0;
  for (std::uint64_t k = 0; k < entries.size(); ++k) {
    leaf[k] = std::norm(entries[k]);
    norm2 += leaf[k];
    if (leaf[k] > 0.0) plan.phases[k] = std::arg(entries[k]);
  }
  if (norm2 == 0.0) throw input_error("build_prep_plan: all entries are zero");
  plan.norm = std::sqrt(norm2);

  // Subtree masses level by level; angle at a node splits its mass between
  // the two children of the next-lower qubit.
  plan.angles.resize(static_cast<std::size_t>(nq));
  std::vector<double> mass = std::move(leaf);
  for (int l = nq - 1; l >= 0; --l) {
    const std::uint64_t nodes = std::uint64_t{1} << l;
    std::vector<double> up(nodes, 0.0);
    auto& row = plan.angles[static_cast<std::size_t>(l)];
    row.assign(nodes, 0.0);
    for (std::uint64_t p = 0; p < nodes; ++p) {
      const double ml = mass[2 * p], mr = mass[2 * p + 1];
      up[p] = ml + mr;
      if (up[p] > 0.0) row[p] = 2.0 * std::atan2(std::sqrt(mr), std::sqrt(ml));
    }
    mass = std::move(up);
  }
  return plan;
}

void apply_prep_controlled(Statevector& state, const PrepPlan& plan, int first,
                           const std::vector<int>& controls, std::uint64_t value,
                           bool inverse, Exec how) {
  const int nq = plan.num_qubits;
  if (nq < 0 || first < 0 || first + nq > state.num_qubits())
    throw input_error("apply_prep: register does not fit the state");
  if (plan.angles.size() != static_cast<std::size_t>(nq) ||
      plan.phases.size() != (std::uint64_t{1} << nq))
    throw input_error("apply_prep: malformed plan");
  for (int c : controls)
    if (c >= first && c < first + nq)
      throw input_error("apply_prep: control overlaps the target register");
  if (controls.size() < 64 && (value >> controls.size()))
    throw input_error("apply_prep: control value out of range");

  std::uint64_t cmask = 0, csel = 0;
  for (std::size_t j = 0; j < controls.size(); ++j) {
    cmask |= std::uint64_t{1} << controls[j];
    csel |= ((value >> j) & std::uint64_t{1}) << controls[j];
  }

  const auto level_op = [&](int l, double sign) {
    const Eigen::Index dim = Eigen::Index{1} << (l + 1);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    const auto& row = plan.angles[static_cast<std::size_t>(l)];
    for (std::uint64_t p = 0; p < row.size(); ++p) {
      const double a = sign * row[p];
      const double c = std::cos(0.5 * a), s = std::sin(0.5 * a);
      const Eigen::Index i0 = static_cast<Eigen::Index>(p << 1), i1 = i0 + 1;
      m(i0, i0) = c;
      m(i0, i1) = -s;
      m(i1, i0) = s;
      m(i1, i1) = c;
    }
    return Operator::general(m);
  };
  // Op bit 0 is the qubit this level introduces; bits 1..l hold the already
  // prepared prefix with the register's own significance.
  const auto level_targets = [&](int l) {
    std::vector<int> t;
    t.reserve(static_cast<std::size_t>(l) + 1);
    t.push_back(first + nq - 1 - l);
    for (int k = 0; k < l; ++k) t.push_back(first + nq - l + k);
    return t;
  };
  const auto run_phases = [&](double sign) {
    const std::uint64_t reg_mask = ((std::uint64_t{1} << nq) - 1) << first;
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << nq); ++k) {
      if (plan.phases[k] == 0.0) continue;
      detail::apply_phase_on_pattern(state.amps(), reg_mask | cmask,
                                     (k << first) | csel,
                                     std::polar(1.0, sign * plan.phases[k]), how);
    }
  };

  if (!inverse) {
    for (int l = 0; l < nq; ++l)
      apply_controlled_on_value(state, level_op(l, 1.0), controls, value,
                                level_targets(l), how);
    run_phases(1.0);
  } else {
    run_phases(-1.0);
    for (int l = nq - 1; l >= 0; --l)
      apply_controlled_on_value(state, level_op(l, -1.0), controls, value,
                                level_targets(l), how);
  }
}

void apply_prep(Statevector& state, const PrepPlan& plan, int first, bool inverse,
                Exec how) {
  apply_prep_controlled(state, plan, first, {}, 0, inverse, how);
}

std::pair<PrepPlan, Statevector> amplitude_encode(const TargetVector& x, Exec how) {
  PrepPlan plan = build_prep_plan(x.entries);
  Statevector state(plan.num_qubits);
  apply_prep(state, plan, 0, false, how);
  return {std::move(plan), std::move(state)};
}

Eigen::MatrixXcd unitary_from_first_column(const Eigen::VectorXcd& v) {
  const Eigen::Index n = v.size();
  if (n < 1) throw input_error("unitary_from_first_column: empty vector");
  if (std::abs(v.norm() - 1.0) > 1e-8)
    throw input_error("unitary_from_first_column: needs a unit vector");
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(n, n);
  a.col(0) = v;
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  Eigen::MatrixXcd q = qr.householderQ();
  // Q's first column spans v; pin it to v itself (the remaining columns are
  // orthogonal to it either way).
  q.col(0) = v;
  return q;
}

std::pair<Statevector, double> lcu_combine(const LcuSpec& spec, Exec how) {
  const std::size_t terms = spec.coefficients.size();
  if (terms == 0) throw input_error("lcu_combine: no components");
  if (spec.components.size() != terms)
    throw input_error("lcu_combine: coefficient/component count mismatch");
  const int sys_nq = spec.components[0].num_qubits();
  for (const Statevector& c : spec.components)
    if (c.num_qubits() != sys_nq)
      throw input_error("lcu_combine: components must share one dimension");
  for (const cplx& c : spec.coefficients) {
    const double r = std::abs(c);
    if (!std::isfinite(r) || r <= 0.0)
      throw input_error("lcu_combine: coefficients must be nonzero and finite");
  }

  if (terms == 1) {
    Statevector out = spec.components[0];
    const cplx phase = spec.coefficients[0] / std::abs(spec.coefficients[0]);
    if (phase != cplx{1.0, 0.0})
      for (cplx& a : out.amps()) a *= phase;
    return {std::move(out), 1.0};
  }
  if (sys_nq < 1)
    throw input_error("lcu_combine: scalar components allow only a single term");

  const int idx_nq = qubits_for(terms);
  std::vector<cplx> roots(std::uint64_t{1} << idx_nq, cplx{0.0, 0.0});
  for (std::size_t j = 0; j < terms; ++j)
    roots[j] = std::sqrt(std::abs(spec.coefficients[j]));
  const PrepPlan index_plan = build_prep_plan(roots);

  Statevector joint(sys_nq + idx_nq);
  std::vector<int> sys_q(static_cast<std::size_t>(sys_nq));
  std::iota(sys_q.begin(), sys_q.end(), 0);
  std::vector<int> idx_q(static_cast<std::size_t>(idx_nq));
  std::iota(idx_q.begin(), idx_q.end(), sys_nq);

  apply_prep(joint, index_plan, sys_nq, false, how);
  for (std::size_t j = 0; j < terms; ++j) {
    const Eigen::MatrixXcd w =
        component_unitary(spec.components[j], spec.coefficients[j]);
    apply_controlled_on_value(joint, Operator::general(w), idx_q, j, sys_q, how);
  }
  apply_prep(joint, index_plan, sys_nq, true, how);

  auto [post, p] = postselect_register(joint, idx_q, 0);
  Statevector out = detail::extract_register_complement(post, idx_q, 0);
  return {std::move(out), p};
}

std::pair<Statevector, PrepCostReport> prepare_flat(const TargetVector& x, Exec how) {
  if (x.entries.empty()) throw input_error("prepare_flat: empty vector");
  check_finite(x.entries, "prepare_flat");
  if (x.nonzero_count() == 0) throw input_error("prepare_flat: all entries are zero");
  const int nq = qubits_for(x.entries.size());

  LcuSpec spec;
  double s = 0.0;
  for (std::uint64_t k = 0; k < x.entries.size(); ++k) {
    if (std::abs(x.entries[k]) == 0.0) continue;
    spec.coefficients.push_back(x.entries[k]);
    spec.components.push_back(make_basis_state(nq, k));
    s += std::abs(x.entries[k]);
  }
  auto [state, p] = lcu_combine(spec, how);

  PrepCostReport r;
  r.s = s;
  r.norm = x.norm();
  r.kappa = x.kappa();
  r.nonzeros = spec.coefficients.size();
  r.repetition_ratio = r.s / r.norm;
  r.ratio_bound = r.kappa * std::sqrt(static_cast<double>(r.nonzeros));
  r.ratio_within_bound = r.repetition_ratio <= r.ratio_bound * (1.0 + 1e-12);
  r.success_probability = p;
  r.expected_repetitions = 1.0 / p;
  return {std::move(state), r};
}

BinDecomposition bin_decompose(const TargetVector& x) {
  if (x.entries.empty()) throw input_error("bin_decompose: empty vector");
  check_finite(x.entries, "bin_decompose");
  const double base = x.min_nonzero_magnitude();
  const double norm = x.norm();

  BinDecomposition bd;
  bd.base = base;
  bd.q = std::max(1, detail::ceil_log2(x.kappa()));
  bd.bins.assign(static_cast<std::size_t>(bd.q),
                 std::vector<cplx>(x.entries.size(), cplx{0.0, 0.0}));
  for (std::uint64_t k = 0; k < x.entries.size(); ++k) {
    const double a = std::abs(x.entries[k]);
    if (a == 0.0) continue;
    // magnitude in [2^(e-1), 2^e) relative to the base; the last interval is
    // closed so an exact power-of-two kappa keeps its maximum binned
    int e = 0;
    std::frexp(a / base, &e);
    const int j = std::clamp(e, 1, bd.q);
    bd.bins[static_cast<std::size_t>(j - 1)][k] = x.entries[k];
  }
  bd.weights.assign(static_cast<std::size_t>(bd.q), 0.0);
  for (int j = 0; j < bd.q; ++j) {
    double m2 = 0.0;
    for (const cplx& a : bd.bins[static_cast<std::size_t>(j)]) m2 += std::norm(a);
    bd.weights[static_cast<std::size_t>(j)] = std::sqrt(m2) / norm;
  }
  return bd;
}

std::pair<Statevector, BinnedCostReport> prepare_binned(const TargetVector& x,
                                                        Exec how) {
  BinDecomposition bd = bin_decompose(x);

  BinnedCostReport rep;
  rep.q = bd.q;
  LcuSpec outer;
  for (int j = 0; j < bd.q; ++j) {
    const double w = bd.weights[static_cast<std::size_t>(j)];
    if (w == 0.0) continue;
    auto [bin_state, bin_report] =
        prepare_flat(TargetVector{bd.bins[static_cast<std::size_t>(j)]}, how);
    outer.coefficients.push_back(w);
    outer.components.push_back(std::move(bin_state));
    rep.bins.push_back(bin_report);
    rep.weight_sum += w;
  }
  auto [state, p] = lcu_combine(outer, how);

  rep.weight_bound = std::sqrt(static_cast<double>(bd.q));
  rep.weight_within_bound = rep.weight_sum <= rep.weight_bound + 1e-12;
  rep.success_probability = p;
  rep.expected_repetitions = 1.0 / p;
  return {std::move(state), rep};
}

}  // namespace qspline
