#include "qspline/spline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "qspline/errors.hpp"

namespace qspline {

namespace {

constexpr double kPivotTol = 1e-13;
constexpr int kMaxDenseSize = 1024;

// Interval index for xt, left piece on interior-knot ties.
int locate(const std::vector<double>& x, double xt) {
  if (!(xt >= x.front() && xt <= x.back()))
    throw domain_error("query point outside the knot range");
  int i = static_cast<int>(std::lower_bound(x.begin(), x.end(), xt) - x.begin()) - 1;
  return i < 0 ? 0 : i;
}

// In-place elimination; diag and rhs are consumed.
std::vector<double> solve_banded(std::vector<double> diag, const std::vector<double>& sub,
                                 const std::vector<double>& super, std::vector<double> rhs) {
  const int size = static_cast<int>(diag.size());
  for (int i = 1; i < size; ++i) {
    if (std::abs(diag[i - 1]) < kPivotTol)
      throw solver_error("tridiagonal pivot below tolerance");
    const double w = sub[i - 1] / diag[i - 1];
    diag[i] -= w * super[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  if (std::abs(diag[size - 1]) < kPivotTol)
    throw solver_error("tridiagonal pivot below tolerance");
  std::vector<double> out(size);
  out[size - 1] = rhs[size - 1] / diag[size - 1];
  for (int i = size - 2; i >= 0; --i)
    out[i] = (rhs[i] - super[i] * out[i + 1]) / diag[i];
  return out;
}

}  // namespace

SplineDataset make_dataset(std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size()) throw input_error("knot and value counts differ");
  if (x.size() < 2) throw input_error("need at least two knots");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw input_error("knots and values must be finite");
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (!(x[i] < x[i + 1])) throw input_error("knots must increase strictly");
  return {std::move(x), std::move(y)};
}

BoundaryCondition BoundaryCondition::first_derivative(double d0, double dn) {
  return {Kind::first_derivative, d0, dn};
}

BoundaryCondition BoundaryCondition::second_derivative(double s0, double sn) {
  return {Kind::second_derivative, s0, sn};
}

BoundaryCondition BoundaryCondition::periodic() {
  return {Kind::periodic, 0.0, 0.0};
}

DividedDifferences divided_differences(const SplineDataset& data) {
  const int n = data.intervals();
  DividedDifferences dd;
  dd.first.resize(n);
  for (int i = 0; i < n; ++i) dd.first[i] = (data.y[i + 1] - data.y[i]) / data.h(i);
  dd.second.resize(n > 0 ? n - 1 : 0);
  for (int i = 0; i + 1 < n; ++i)
    dd.second[i] = (dd.first[i + 1] - dd.first[i]) / (data.x[i + 2] - data.x[i]);
  return dd;
}

Eigen::MatrixXd TridiagonalSystem::dense() const {
  const int n = size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) a(i, i) = diag[i];
  for (int i = 0; i + 1 < n; ++i) {
    a(i + 1, i) = sub[i];
    a(i, i + 1) = super[i];
  }
  // Corners stack on the band when the matrix is 2x2.
  a(0, n - 1) += corner_top;
  a(n - 1, 0) += corner_bottom;
  return a;
}

TridiagonalSystem build_system(const SplineDataset& data, const BoundaryCondition& bc) {
  const int n = data.intervals();
  const DividedDifferences dd = divided_differences(data);
  TridiagonalSystem sys;

  if (bc.kind == BoundaryCondition::Kind::periodic) {
    if (n < 2) throw input_error("periodic fit needs at least three knots");
    if (std::abs(data.y.front() - data.y.back()) > 1e-12)
      throw input_error("periodic fit needs matching end values");
    const int size = n;
    sys.periodic = true;
    sys.diag.assign(size, 2.0);
    sys.sub.assign(size - 1, 0.0);
    sys.super.assign(size - 1, 0.0);
    sys.rhs.assign(size, 0.0);
    for (int r = 1; r < n; ++r) {
      const double mu = data.h(r - 1) / (data.h(r - 1) + data.h(r));
      const int i = r - 1;
      if (i > 0)
        sys.sub[i - 1] = mu;
      else
        sys.corner_top = mu;
      sys.super[i] = 1.0 - mu;
      sys.rhs[i] = 6.0 * dd.second[r - 1];
    }
    const double lam = data.h(0) / (data.h(n - 1) + data.h(0));
    sys.corner_bottom = lam;
    sys.sub[size - 2] = 1.0 - lam;
    sys.rhs[size - 1] =
        6.0 * (dd.first[0] - dd.first[n - 1]) / (data.h(0) + data.h(n - 1));
    return sys;
  }

  const int size = n + 1;
  sys.diag.assign(size, 2.0);
  sys.sub.assign(size - 1, 0.0);
  sys.super.assign(size - 1, 0.0);
  sys.rhs.assign(size, 0.0);
  for (int r = 1; r < n; ++r) {
    const double mu = data.h(r - 1) / (data.h(r - 1) + data.h(r));
    sys.sub[r - 1] = mu;
    sys.super[r] = 1.0 - mu;
    sys.rhs[r] = 6.0 * dd.second[r - 1];
  }
  if (bc.kind == BoundaryCondition::Kind::first_derivative) {
    sys.super[0] = 1.0;
    sys.sub[size - 2] = 1.0;
    sys.rhs[0] = 6.0 * (dd.first[0] - bc.start) / data.h(0);
    sys.rhs[size - 1] = 6.0 * (bc.end - dd.first[n - 1]) / data.h(n - 1);
  } else {
    sys.super[0] = 0.0;
    sys.sub[size - 2] = 0.0;
    sys.rhs[0] = 2.0 * bc.start;
    sys.rhs[size - 1] = 2.0 * bc.end;
  }
  return sys;
}

SplineSolution thomas_solve(const TridiagonalSystem& system) {
  const int size = system.size();
  if (size < 2) throw input_error("system too small");
  SplineSolution sol;
  if (!system.periodic) {
    sol.m = solve_banded(system.diag, system.sub, system.super, system.rhs);
    return sol;
  }
  // Rank-1 split A = T + u v^T with u = (gamma, 0, .., beta),
  // v = (1, 0, .., alpha/gamma); gamma = -2 keeps T diagonally dominant.
  const double gamma = -2.0;
  const double alpha = system.corner_top;
  const double beta = system.corner_bottom;
  std::vector<double> diag = system.diag;
  diag[0] -= gamma;
  diag[size - 1] -= alpha * beta / gamma;
  const std::vector<double> z = solve_banded(diag, system.sub, system.super, system.rhs);
  std::vector<double> u(size, 0.0);
  u[0] = gamma;
  u[size - 1] = beta;
  const std::vector<double> q = solve_banded(diag, system.sub, system.super, std::move(u));
  const double denom = 1.0 + q[0] + q[size - 1] * alpha / gamma;
  if (std::abs(denom) < kPivotTol) throw solver_error("periodic correction is singular");
  const double factor = (z[0] + z[size - 1] * alpha / gamma) / denom;
  sol.m.resize(size + 1);
  for (int i = 0; i < size; ++i) sol.m[i + 1] = z[i] - factor * q[i];
  sol.m[0] = sol.m[size];
  return sol;
}

SplineSolution fit_spline(const SplineDataset& data, const BoundaryCondition& bc) {
  return thomas_solve(build_system(data, bc));
}

SplineValue evaluate(const SplineDataset& data, const SplineSolution& solution, double xt) {
  if (solution.m.size() != data.x.size())
    throw input_error("solution size does not match the dataset");
  const int i = locate(data.x, xt);
  const double h = data.h(i);
  const double t1 = data.x[i + 1] - xt;
  const double t0 = xt - data.x[i];
  const double mi = solution.m[i];
  const double mj = solution.m[i + 1];
  SplineValue out;
  out.interval = i;
  out.value = mi * t1 * t1 * t1 / (6.0 * h) + mj * t0 * t0 * t0 / (6.0 * h) +
              (data.y[i] - mi * h * h / 6.0) * t1 / h +
              (data.y[i + 1] - mj * h * h / 6.0) * t0 / h;
  out.slope = -mi * t1 * t1 / (2.0 * h) + mj * t0 * t0 / (2.0 * h) +
              (data.y[i + 1] - data.y[i]) / h - (mj - mi) * h / 6.0;
  out.curvature = mi * t1 / h + mj * t0 / h;
  return out;
}

SplineFeatures eval_features(const SplineDataset& data, double xt) {
  const int i = locate(data.x, xt);
  const double h = data.h(i);
  const double t1 = data.x[i + 1] - xt;
  const double t0 = xt - data.x[i];
  SplineFeatures f;
  f.interval = i;
  f.curv_left = t1 * t1 * t1 / (6.0 * h) - h * t1 / 6.0;
  f.curv_right = t0 * t0 * t0 / (6.0 * h) - h * t0 / 6.0;
  f.linear = (data.y[i] * t1 + data.y[i + 1] * t0) / h;
  return f;
}

SvBounds gershgorin_sv_bounds(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw input_error("matrix must be square");
  const int n = static_cast<int>(a.rows());
  if (n < 1) throw input_error("matrix must be nonempty");
  if (n > kMaxDenseSize) throw resource_error("dense conditioning capped at size 1024");
  SvBounds b;
  b.row_off.resize(n);
  b.col_off.resize(n);
  b.s.resize(n);
  b.intervals.resize(n);
  for (int i = 0; i < n; ++i) {
    b.row_off[i] = a.row(i).cwiseAbs().sum() - std::abs(a(i, i));
    b.col_off[i] = a.col(i).cwiseAbs().sum() - std::abs(a(i, i));
  }
  for (int i = 0; i < n; ++i) {
    b.s[i] = std::max(b.row_off[i], b.col_off[i]);
    b.intervals[i] = {std::max(0.0, std::abs(a(i, i)) - b.s[i]),
                      std::abs(a(i, i)) + b.s[i]};
  }
  b.frobenius = a.norm();
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  b.singular_values = svd.singularValues();
  b.sigma_max = b.singular_values(0);
  b.sigma_min = b.singular_values(n - 1);
  b.kappa = b.sigma_min > 0.0 ? b.sigma_max / b.sigma_min
                              : std::numeric_limits<double>::infinity();
  return b;
}

SvBounds gershgorin_sv_bounds(const TridiagonalSystem& system) {
  return gershgorin_sv_bounds(system.dense());
}

ConditionReport condition_report(const TridiagonalSystem& system) {
  ConditionReport rep;
  rep.bounds = gershgorin_sv_bounds(system);
  const int size = system.size();
  rep.frobenius_sq = rep.bounds.frobenius * rep.bounds.frobenius;
  rep.frobenius_floor = 4.0 * size + (size - 2) / 2.0;
  rep.frobenius_within = rep.frobenius_sq >= rep.frobenius_floor - 1e-9;
  rep.within_4sqrt2 = rep.bounds.kappa <= 4.0 * std::numbers::sqrt2;
  rep.within_4 = rep.bounds.kappa <= 4.0;
  return rep;
}

ConditioningSweep run_conditioning_sweep(int trials, int max_size, double h_lo,
                                         double h_hi, std::uint64_t seed) {
  return run_conditioning_sweep(trials, 3, max_size, h_lo, h_hi, seed);
}

ConditioningSweep run_conditioning_sweep(int trials, int min_size, int max_size,
                                         double h_lo, double h_hi,
                                         std::uint64_t seed) {
  if (trials < 1) throw input_error("need at least one trial");
  if (min_size < 3 || min_size > max_size || max_size > kMaxDenseSize)
    throw input_error("sweep sizes must satisfy 3 <= min <= max <= 1024");
  if (!(h_lo > 0.0) || !(h_lo <= h_hi) || !std::isfinite(h_hi))
    throw input_error("spacing range must satisfy 0 < h_lo <= h_hi");

  std::vector<double> kappa(trials), lo(trials), hi(trials);
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(t));
    std::uniform_int_distribution<int> points_dist(min_size, max_size);
    std::uniform_real_distribution<double> log_h(std::log(h_lo), std::log(h_hi));
    std::normal_distribution<double> value;

    const int points = points_dist(rng);
    std::vector<double> x(points), y(points);
    x[0] = 0.0;
    for (int i = 1; i < points; ++i) x[i] = x[i - 1] + std::exp(log_h(rng));
    for (int i = 0; i < points; ++i) y[i] = value(rng);

    BoundaryCondition bc;
    switch (t % 3) {
      case 0:
        bc = BoundaryCondition::first_derivative(value(rng), value(rng));
        break;
      case 1:
        bc = BoundaryCondition::second_derivative(value(rng), value(rng));
        break;
      default:
        y[points - 1] = y[0];
        bc = BoundaryCondition::periodic();
        break;
    }
    const SvBounds b =
        gershgorin_sv_bounds(build_system(make_dataset(std::move(x), std::move(y)), bc));
    kappa[t] = b.kappa;
    lo[t] = b.sigma_min;
    hi[t] = b.sigma_max;
  }

  ConditioningSweep sweep;
  sweep.systems = trials;
  sweep.min_sigma = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    sweep.max_kappa = std::max(sweep.max_kappa, kappa[t]);
    sweep.min_sigma = std::min(sweep.min_sigma, lo[t]);
    sweep.max_sigma = std::max(sweep.max_sigma, hi[t]);
    if (kappa[t] > 4.0) ++sweep.exceed_4;
    if (kappa[t] > 4.0 * std::numbers::sqrt2) ++sweep.exceed_4sqrt2;
  }
  return sweep;
}

}  // namespace qspline
