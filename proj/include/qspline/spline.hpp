#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qspline {

// Strictly increasing knots with one value per knot.
struct SplineDataset {
  std::vector<double> x;
  std::vector<double> y;

  int intervals() const { return static_cast<int>(x.size()) - 1; }
  double h(int i) const { return x[i + 1] - x[i]; }
};

// Validates sizes, finiteness, and strict knot ordering.
SplineDataset make_dataset(std::vector<double> x, std::vector<double> y);

struct BoundaryCondition {
  enum class Kind { first_derivative, second_derivative, periodic };

  Kind kind = Kind::second_derivative;
  double start = 0.0;  // endpoint derivative data, unused for periodic
  double end = 0.0;

  static BoundaryCondition first_derivative(double d0, double dn);
  static BoundaryCondition second_derivative(double s0, double sn);
  static BoundaryCondition periodic();
  // Zero-derivative conveniences.
  static BoundaryCondition clamped() { return first_derivative(0.0, 0.0); }
  static BoundaryCondition natural() { return second_derivative(0.0, 0.0); }
};

struct DividedDifferences {
  std::vector<double> first;   // one per interval
  std::vector<double> second;  // one per interior knot
};

DividedDifferences divided_differences(const SplineDataset& data);

// Rows couple neighboring curvatures; every interior row has diagonal 2
// and off-diagonal weights summing to 1.  Periodic systems add the two
// wrap entries, stored separately so they stack on the band at size 2.
struct TridiagonalSystem {
  std::vector<double> diag;
  std::vector<double> sub;    // sub[i] sits at (i+1, i)
  std::vector<double> super;  // super[i] sits at (i, i+1)
  std::vector<double> rhs;
  double corner_top = 0.0;     // (0, size-1)
  double corner_bottom = 0.0;  // (size-1, 0)
  bool periodic = false;

  int size() const { return static_cast<int>(diag.size()); }
  Eigen::MatrixXd dense() const;
};

// Curvature system for the dataset under the given boundary condition.
// First/second-derivative boundaries produce one row per knot; periodic
// drops the duplicated endpoint, needs 3+ knots and matching end values.
TridiagonalSystem build_system(const SplineDataset& data, const BoundaryCondition& bc);

// Knot curvatures, one per knot.  Periodic solutions repeat the wrapped
// value at both ends.
struct SplineSolution {
  std::vector<double> m;
};

// O(size) elimination; periodic systems go through a rank-1 corner
// correction (two auxiliary banded solves).  Pivots below 1e-13 throw
// solver_error; assembled spline systems are diagonally dominant and
// never trip it.
SplineSolution thomas_solve(const TridiagonalSystem& system);

// build_system + thomas_solve.
SplineSolution fit_spline(const SplineDataset& data, const BoundaryCondition& bc);

struct SplineValue {
  double value = 0.0;
  double slope = 0.0;
  double curvature = 0.0;
  int interval = 0;
};

// Piecewise-cubic value and derivatives at xt.  xt must lie inside the
// knot range (no extrapolation); a query equal to an interior knot is
// served by the left piece.
SplineValue evaluate(const SplineDataset& data, const SplineSolution& solution, double xt);

// Curvature weights of the located piece: value = m[i]*curv_left +
// m[i+1]*curv_right + linear.
struct SplineFeatures {
  int interval = 0;
  double curv_left = 0.0;
  double curv_right = 0.0;
  double linear = 0.0;
};

SplineFeatures eval_features(const SplineDataset& data, double xt);

// Off-diagonal absolute sums and the singular-value enclosure they give,
// plus the exact singular values from a dense SVD.
struct SvBounds {
  std::vector<double> row_off;  // r_i
  std::vector<double> col_off;  // c_i
  std::vector<double> s;        // max(r_i, c_i)
  std::vector<std::pair<double, double>> intervals;
  double frobenius = 0.0;
  Eigen::VectorXd singular_values;
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  double kappa = 0.0;
};

// Dense analysis capped at size 1024.
SvBounds gershgorin_sv_bounds(const Eigen::MatrixXd& a);
SvBounds gershgorin_sv_bounds(const TridiagonalSystem& system);

struct ConditionReport {
  SvBounds bounds;
  double frobenius_sq = 0.0;
  double frobenius_floor = 0.0;  // 4*size + (size-2)/2
  bool frobenius_within = false;
  bool within_4sqrt2 = false;
  bool within_4 = false;
};

ConditionReport condition_report(const TridiagonalSystem& system);

// Worst condition number over seeded random spline systems, all three
// boundary kinds, spacings log-uniform in [h_lo, h_hi].
struct ConditioningSweep {
  int systems = 0;
  double max_kappa = 0.0;
  double min_sigma = 0.0;
  double max_sigma = 0.0;
  int exceed_4 = 0;
  int exceed_4sqrt2 = 0;
};

ConditioningSweep run_conditioning_sweep(int trials, int max_size, double h_lo,
                                         double h_hi, std::uint64_t seed);

// Same sweep with knot counts drawn from [min_size, max_size].
ConditioningSweep run_conditioning_sweep(int trials, int min_size, int max_size,
                                         double h_lo, double h_hi,
                                         std::uint64_t seed);

}  // namespace qspline
