#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qspline/errors.hpp"
#include "qspline/hhl.hpp"
#include "qspline/random.hpp"
#include "qspline/spline.hpp"

using namespace qspline;

namespace {

constexpr double kPi = std::numbers::pi;

double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  return std::norm(a.normalized().dot(b.normalized()));
}

Eigen::MatrixXcd small_hermitian() {
  Eigen::MatrixXcd a(2, 2);
  a << 0.62, 0.21, 0.21, 0.33;
  return a;
}

}  // namespace

TEST_CASE("linear systems pad and detect structure") {
  Eigen::MatrixXcd a(3, 3);
  a << cplx(2.0, 0.0), cplx(0.3, 0.4), cplx(0.0, -0.2),
       cplx(0.3, -0.4), cplx(1.5, 0.0), cplx(0.1, 0.0),
       cplx(0.0, 0.2), cplx(0.1, 0.0), cplx(1.0, 0.0);
  Eigen::VectorXcd b(3);
  b << 1.0, 0.5, cplx(0.0, 0.25);

  const LinearSystem sys = make_linear_system(a, b);
  CHECK(sys.hermitian);
  CHECK(sys.a.is_hermitian());
  CHECK(sys.original_dim == 3);
  CHECK(sys.a.dim() == 4);
  CHECK(sys.b.entries.size() == 4);
  CHECK(sys.a.matrix()(3, 3) == cplx(1.0, 0.0));
  CHECK(sys.a.matrix()(3, 0) == cplx(0.0, 0.0));
  CHECK(sys.a.matrix()(0, 3) == cplx(0.0, 0.0));
  CHECK(sys.b.entries[3] == cplx(0.0, 0.0));
  CHECK(sys.a.matrix().topLeftCorner(3, 3).isApprox(a));

  Eigen::MatrixXcd nh(2, 2);
  nh << 1.0, 0.5, 0.0, 1.0;
  const LinearSystem sys2 = make_linear_system(nh, Eigen::VectorXcd::Ones(2));
  CHECK_FALSE(sys2.hermitian);
  CHECK(sys2.a.dim() == 2);

  Eigen::MatrixXcd one(1, 1);
  one << 2.0;
  Eigen::VectorXcd b1(1);
  b1 << 1.0;
  const LinearSystem sys3 = make_linear_system(one, b1);
  CHECK(sys3.a.dim() == 2);
  CHECK(sys3.original_dim == 1);
  CHECK(sys3.a.matrix()(1, 1) == cplx(1.0, 0.0));

  CHECK_THROWS_AS(make_linear_system(Eigen::MatrixXcd::Zero(2, 3), Eigen::VectorXcd::Ones(2)),
                  input_error);
  CHECK_THROWS_AS(make_linear_system(nh, Eigen::VectorXcd::Ones(3)), input_error);
  CHECK_THROWS_AS(make_linear_system(nh, Eigen::VectorXcd::Zero(2)), input_error);
  Eigen::MatrixXcd bad = nh;
  bad(0, 0) = cplx(std::nan(""), 0.0);
  CHECK_THROWS_AS(make_linear_system(bad, Eigen::VectorXcd::Ones(2)), input_error);

  std::mt19937_64 rng(71);
  Eigen::MatrixXcd g(4, 4);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = cplx(dist(rng), dist(rng));
  const Eigen::MatrixXcd e = hermitian_embed(g);
  REQUIRE(e.rows() == 8);
  CHECK((e - e.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(e.topLeftCorner(4, 4).cwiseAbs().maxCoeff() == 0.0);
  CHECK(e.bottomRightCorner(4, 4).cwiseAbs().maxCoeff() == 0.0);
  CHECK(e.topRightCorner(4, 4).isApprox(g));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(e);
  const Eigen::VectorXd ev = eig.eigenvalues();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g);
  for (int j = 0; j < 4; ++j) {
    CHECK(ev(j) == doctest::Approx(-ev(7 - j)).epsilon(1e-10));
    CHECK(ev(7 - j) == doctest::Approx(svd.singularValues()(j)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(hermitian_embed(Eigen::MatrixXcd::Zero(2, 3)), input_error);
}

TEST_CASE("exact evolution exponentiates the generator") {
  Eigen::MatrixXcd d(2, 2);
  d << 0.5, 0.0, 0.0, -0.25;
  const Operator u = evolve(Operator::hermitian(d), kPi / 2.0);
  CHECK(u.is_unitary());
  CHECK(std::abs(u.matrix()(0, 0) - std::exp(cplx(0.0, kPi / 4.0))) <= 1e-12);
  CHECK(std::abs(u.matrix()(1, 1) - std::exp(cplx(0.0, -kPi / 8.0))) <= 1e-12);
  CHECK(std::abs(u.matrix()(0, 1)) <= 1e-14);

  const Operator id = evolve(Operator::hermitian(d), 0.0);
  CHECK((id.matrix() - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-14);

  std::mt19937_64 rng(19);
  const Eigen::MatrixXcd h = random_hermitian(4, rng);
  const Operator a1 = evolve(Operator::hermitian(h), 0.3);
  const Operator a2 = evolve(Operator::hermitian(h), 0.45);
  const Operator a12 = evolve(Operator::hermitian(h), 0.75);
  CHECK((a1.matrix() * a2.matrix() - a12.matrix()).cwiseAbs().maxCoeff() <= 1e-10);

  CHECK_THROWS_AS(evolve(Operator::general(Eigen::MatrixXcd::Identity(2, 2)), 1.0), input_error);
  CHECK_THROWS_AS(evolve(Operator::hermitian(d), std::nan("")), input_error);
}

TEST_CASE("signed phase decoding wraps the top half") {
  CHECK(signed_phase_decode(0, 4, kPi / 2.0) == 0.0);
  CHECK(signed_phase_decode(1, 4, kPi / 2.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(signed_phase_decode(4, 4, kPi / 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(signed_phase_decode(8, 4, kPi / 2.0) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(signed_phase_decode(15, 4, kPi / 2.0) == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(signed_phase_decode(3, 2, 1.0) == doctest::Approx(-kPi / 2.0).epsilon(1e-14));

  CHECK_THROWS_AS(signed_phase_decode(16, 4, 1.0), input_error);
  CHECK_THROWS_AS(signed_phase_decode(0, 0, 1.0), input_error);
  CHECK_THROWS_AS(signed_phase_decode(0, 4, 0.0), input_error);
}

TEST_CASE("identity systems pass through with unit norm") {
  std::mt19937_64 rng(5);
  const Eigen::VectorXcd b = random_unit_vector(4, rng);
  const LinearSystem sys = make_linear_system(Eigen::MatrixXcd::Identity(4, 4), b);

  HHLConfig cfg;
  cfg.phase_bits = 6;
  cfg.eigenvalue_floor = 0.5;
  const HHLResult res = solve(sys, cfg);
  CHECK(fidelity(res.solution, b) >= 1.0 - 1e-10);
  CHECK(res.success_probability == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(res.norm_estimate == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(res.phase_residual <= 1e-10);
  CHECK(res.repetitions_naive == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(res.repetitions_amplified == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("a two-level diagonal system hits its frozen readouts") {
  Eigen::MatrixXcd a(2, 2);
  a << 1.0, 0.0, 0.0, 0.5;
  Eigen::VectorXcd b(2);
  b << 0.0, 1.0;
  const LinearSystem sys = make_linear_system(a, b);

  HHLConfig cfg;
  cfg.phase_bits = 4;
  cfg.evolution_time = kPi / 2.0;
  cfg.eigenvalue_floor = 0.25;
  const HHLResult res = solve(sys, cfg);

  // Both eigenphases are exact register values, so everything is crisp:
  // success (7/8)^2 and recovered norm ||A^{-1}b||/||b|| = 2.
  CHECK(res.success_probability == doctest::Approx(49.0 / 64.0).epsilon(1e-12));
  CHECK(res.norm_estimate == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(res.phase_residual <= 1e-12);
  CHECK(std::norm(res.solution(1)) >= 1.0 - 1e-12);
  CHECK(std::abs(res.solution(0)) <= 1e-8);

  const HHLResult pre = solve(sys, make_basis_state(1, 1), cfg);
  CHECK(pre.success_probability == doctest::Approx(res.success_probability).epsilon(1e-12));
  CHECK(fidelity(pre.solution, res.solution) >= 1.0 - 1e-12);

  HHLConfig bad = cfg;
  bad.eigenvalue_floor = 0.0;
  CHECK_THROWS_AS(solve(sys, bad), input_error);
  bad = cfg;
  bad.inversion_constant = 0.5;
  CHECK_THROWS_AS(solve(sys, bad), input_error);
  bad = cfg;
  bad.phase_bits = 0;
  CHECK_THROWS_AS(solve(sys, bad), input_error);
  bad = cfg;
  bad.evolution_time = -1.0;
  CHECK_THROWS_AS(solve(sys, bad), input_error);
  bad = cfg;
  bad.evolution_time = 3.0 * kPi;  // phase of the unit eigenvalue leaves the window
  CHECK_THROWS_AS(solve(sys, bad), input_error);
  bad = cfg;
  bad.phase_bits = 23;  // 1 + 23 + 1 goes past the register limit
  CHECK_THROWS_AS(solve(sys, bad), resource_error);
  CHECK_THROWS_AS(solve(sys, make_basis_state(2, 1), cfg), input_error);
}

TEST_CASE("clamped spline systems match the banded oracle") {
  const SplineDataset data = make_dataset({0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 0.0, 1.0});
  const TridiagonalSystem tri = build_system(data, BoundaryCondition::clamped());
  const Eigen::MatrixXd dense = tri.dense();
  Eigen::VectorXd rhs(tri.size());
  for (int i = 0; i < tri.size(); ++i) rhs(i) = tri.rhs[static_cast<std::size_t>(i)];

  const LinearSystem sys = make_linear_system(dense.cast<cplx>(), rhs.cast<cplx>());
  CHECK_FALSE(sys.hermitian);

  HHLConfig cfg;
  cfg.phase_bits = 8;
  cfg.spectral_bound = 4.0;
  cfg.eigenvalue_floor = 1.0 / (4.0 * std::numbers::sqrt2);
  const HHLResult res = solve(sys, cfg);

  const SplineSolution oracle = thomas_solve(tri);
  Eigen::VectorXcd m(tri.size());
  for (int i = 0; i < tri.size(); ++i) m(i) = oracle.m[static_cast<std::size_t>(i)];

  CHECK(fidelity(res.solution, m) >= 0.99);
  CHECK(fidelity(res.solution, m) >= 1.0 - 1e-6);
  CHECK(res.success_probability >= 1.0 / 32.0);
  const double true_ratio = (dense.fullPivLu().solve(rhs)).norm() / rhs.norm();
  CHECK(res.norm_estimate == doctest::Approx(true_ratio).epsilon(0.01));
  CHECK(res.phase_residual > 1e-8);
  CHECK(res.phase_residual <= 0.01);
  CHECK(res.repetitions_naive == doctest::Approx(1.0 / res.success_probability).epsilon(1e-12));
  CHECK(res.repetitions_amplified ==
        doctest::Approx(1.0 / std::sqrt(res.success_probability)).epsilon(1e-12));
}

TEST_CASE("rotation floor implements the pseudoinverse") {
  Eigen::MatrixXcd a = Eigen::Vector4cd(1.0, 0.5, 0.25, 0.0).asDiagonal();
  Eigen::VectorXcd b(4);
  b << 0.6, 0.5, 0.4, std::sqrt(0.23);
  const LinearSystem sys = make_linear_system(a, b);

  HHLConfig cfg;
  cfg.phase_bits = 6;
  cfg.evolution_time = kPi / 2.0;
  cfg.eigenvalue_floor = 0.05;
  CHECK_THROWS_AS(solve(sys, cfg), ill_conditioned_error);

  cfg.floor_weight_gate = 1.0;
  const HHLResult res = solve(sys, cfg);
  Eigen::VectorXcd pinv(4);
  pinv << 0.6, 1.0, 1.6, 0.0;
  CHECK(fidelity(res.solution, pinv) >= 1.0 - 1e-12);
  CHECK(std::abs(res.solution(3)) <= 1e-10);
  CHECK(res.success_probability == doctest::Approx(0.03678828125).epsilon(1e-12));
  CHECK(res.norm_estimate == doctest::Approx(1.9798989873223332).epsilon(1e-10));
  CHECK(res.phase_residual <= 1e-12);

  Eigen::VectorXcd clean(4);
  clean << 0.6, 0.8, 0.0, 0.0;
  cfg.floor_weight_gate = 1e-8;
  const HHLResult ok = solve(make_linear_system(a, clean), cfg);
  Eigen::VectorXcd expect(4);
  expect << 0.6, 1.6, 0.0, 0.0;
  CHECK(fidelity(ok.solution, expect) >= 1.0 - 1e-12);
}

TEST_CASE("scaling the rhs leaves the normalized solution fixed") {
  const Eigen::MatrixXcd a = small_hermitian();
  Eigen::VectorXcd b(2);
  b << 0.8, 0.6;

  HHLConfig cfg;
  cfg.phase_bits = 6;
  cfg.eigenvalue_floor = 0.15;
  const HHLResult r1 = solve(make_linear_system(a, b), cfg);
  const HHLResult r3 = solve(make_linear_system(a, 3.0 * b), cfg);
  CHECK(fidelity(r1.solution, r3.solution) >= 1.0 - 1e-12);
  CHECK(r1.success_probability == doctest::Approx(r3.success_probability).epsilon(1e-12));

  const Eigen::VectorXcd exact = a.fullPivLu().solve(b);
  CHECK(fidelity(r1.solution, exact) >= 1.0 - 1e-3);
}

TEST_CASE("finer phase grids tighten the solution") {
  const Eigen::MatrixXcd a = small_hermitian();
  Eigen::VectorXcd b(2);
  b << 0.8, 0.6;
  const Eigen::VectorXcd exact = a.fullPivLu().solve(b);
  const double true_ratio = exact.norm() / b.norm();
  const LinearSystem sys = make_linear_system(a, b);

  auto run = [&](int n) {
    HHLConfig cfg;
    cfg.phase_bits = n;
    cfg.eigenvalue_floor = 0.15;
    return solve(sys, cfg);
  };

  const HHLResult r4 = run(4);
  const HHLResult r6 = run(6);
  const HHLResult r8 = run(8);
  const HHLResult r12 = run(12);

  const double i4 = 1.0 - fidelity(r4.solution, exact);
  const double i6 = 1.0 - fidelity(r6.solution, exact);
  const double i8 = 1.0 - fidelity(r8.solution, exact);
  const double i12 = 1.0 - fidelity(r12.solution, exact);

  CHECK(i4 > 1e-4);
  CHECK(i4 < 1e-2);
  CHECK(i8 <= i4 / 2.0);
  CHECK(i12 <= i6 / 2.0);
  CHECK(i12 > 0.0);

  CHECK(r4.phase_residual > 1e-3);
  CHECK(r12.phase_residual < r4.phase_residual);
  CHECK(std::abs(r12.norm_estimate - true_ratio) / true_ratio <= 1e-3);
}

TEST_CASE("sampled postselection estimates the success rate") {
  Eigen::MatrixXcd a(2, 2);
  a << 1.0, 0.0, 0.0, 0.5;
  Eigen::VectorXcd b(2);
  b << 0.0, 1.0;
  const LinearSystem sys = make_linear_system(a, b);

  HHLConfig cfg;
  cfg.phase_bits = 4;
  cfg.evolution_time = kPi / 2.0;
  cfg.eigenvalue_floor = 0.25;
  cfg.shots = 4096;
  cfg.seed = 13;
  const HHLResult res = solve(sys, cfg);
  CHECK(std::abs(res.success_probability - 49.0 / 64.0) <= 0.05);
  CHECK(std::abs(res.norm_estimate - 2.0) <= 0.15);

  const HHLResult again = solve(sys, cfg);
  CHECK(again.success_probability == res.success_probability);

  HHLConfig exact_cfg = cfg;
  exact_cfg.shots = 0;
  const HHLResult exact = solve(sys, exact_cfg);
  CHECK(fidelity(res.solution, exact.solution) >= 1.0 - 1e-12);
}

TEST_CASE("matrix functions ride the same registers") {
  Eigen::MatrixXcd a(2, 2);
  a << 0.5, 0.0, 0.0, 0.25;
  Eigen::VectorXcd b(2);
  b << 1.0, 1.0;
  const LinearSystem sys = make_linear_system(a, b);

  HHLConfig cfg;
  cfg.phase_bits = 6;
  cfg.evolution_time = kPi;

  const HHLResult unit = apply_matrix_function(sys, {1.0}, cfg);
  CHECK(unit.success_probability >= 1.0 - 1e-10);
  CHECK(fidelity(unit.solution, b) >= 1.0 - 1e-12);
  CHECK(unit.norm_estimate == doctest::Approx(1.0).epsilon(1e-10));

  const HHLResult lin = apply_matrix_function(sys, {0.0, 1.0}, cfg);
  Eigen::VectorXcd target(2);
  target << 0.5, 0.25;
  CHECK(fidelity(lin.solution, target) >= 1.0 - 1e-12);
  CHECK(lin.success_probability == doctest::Approx(5.0 / 32.0).epsilon(1e-12));
  CHECK(lin.norm_estimate == doctest::Approx(std::sqrt(5.0 / 32.0)).epsilon(1e-12));
  CHECK(lin.phase_residual <= 1e-12);

  // p = x^2 equals applying p = x twice, feeding the register state back in.
  const HHLResult square = apply_matrix_function(sys, {0.0, 0.0, 1.0}, cfg);
  const HHLResult chained = apply_matrix_function(sys, lin.solution_state, {0.0, 1.0}, cfg);
  CHECK(fidelity(square.solution, chained.solution) >= 1.0 - 1e-12);
  const Eigen::VectorXcd sq_target = a * a * b.normalized();
  CHECK(square.norm_estimate == doctest::Approx(sq_target.norm()).epsilon(1e-10));

  CHECK_THROWS_AS(apply_matrix_function(sys, {0.0, 3.0}, cfg), input_error);
  CHECK_THROWS_AS(apply_matrix_function(sys, {}, cfg), input_error);
  CHECK_THROWS_AS(apply_matrix_function(sys, {0.0}, cfg), degenerate_postselection_error);

  Eigen::MatrixXcd nh(2, 2);
  nh << 1.0, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS(apply_matrix_function(make_linear_system(nh, b), {1.0}, cfg), input_error);
}
