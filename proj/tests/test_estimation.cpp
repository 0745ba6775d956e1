#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qspline/errors.hpp"
#include "qspline/estimation.hpp"
#include "qspline/random.hpp"
#include "qspline/statevector.hpp"

using namespace qspline;

namespace {

// sin(theta)|0>|u> + cos(theta)|1>|v> with the flag on top of a 2-qubit
// system.
AmplitudeInstance make_instance(double theta, const Eigen::VectorXcd& u,
                                const Eigen::VectorXcd& v) {
  std::vector<cplx> amps(8);
  for (int k = 0; k < 4; ++k) {
    amps[k] = std::sin(theta) * u(k);
    amps[4 + k] = std::cos(theta) * v(k);
  }
  return {Statevector::from_amplitudes(std::move(amps)), 2};
}

}  // namespace

TEST_CASE("grover operator rotates the branch plane") {
  std::mt19937_64 rng(101);
  const cplx i1(0.0, 1.0);

  for (const double theta : {0.0, std::numbers::pi / 4, std::asin(0.6), 1.234}) {
    const Eigen::VectorXcd u = random_unit_vector(4, rng);
    const Eigen::VectorXcd v = random_unit_vector(4, rng);
    const AmplitudeInstance inst = make_instance(theta, u, v);
    const Operator g = build_grover_operator(inst);
    CHECK(g.is_unitary());

    Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(8);
    Eigen::VectorXcd e2 = Eigen::VectorXcd::Zero(8);
    e1.head(4) = u;
    e2.tail(4) = v;
    const double c = std::cos(2 * theta);
    const double s = std::sin(2 * theta);
    CHECK((g.matrix() * e1 - (c * e1 - s * e2)).norm() <= 1e-10);
    CHECK((g.matrix() * e2 - (s * e1 + c * e2)).norm() <= 1e-10);

    const Eigen::VectorXcd wp = (e1 + i1 * e2) / std::sqrt(2.0);
    const Eigen::VectorXcd wm = (e1 - i1 * e2) / std::sqrt(2.0);
    CHECK((g.matrix() * wp - std::exp(2.0 * i1 * theta) * wp).norm() <= 1e-10);
    CHECK((g.matrix() * wm - std::exp(-2.0 * i1 * theta) * wm).norm() <= 1e-10);

    const Eigen::VectorXcd recon =
        -(i1 / std::sqrt(2.0)) *
        (std::exp(i1 * theta) * wp - std::exp(-i1 * theta) * wm);
    const Eigen::Map<const Eigen::VectorXcd> phi(inst.state.amps().data(), 8);
    CHECK((phi - recon).norm() <= 1e-10);

    if (theta == std::asin(0.6)) {
      const cplx lambda = (wp.adjoint() * (g.matrix() * wp))(0);
      CHECK(std::abs(std::arg(lambda) - 2 * 0.6435011087932844) <= 1e-10);
    }
  }

  // flag on qubit 0 interleaves the branches
  {
    const double theta = 0.8;
    const Eigen::VectorXcd u = random_unit_vector(2, rng);
    const Eigen::VectorXcd v = random_unit_vector(2, rng);
    std::vector<cplx> amps(4);
    for (int k = 0; k < 2; ++k) {
      amps[2 * k] = std::sin(theta) * u(k);
      amps[2 * k + 1] = std::cos(theta) * v(k);
    }
    const AmplitudeInstance inst{Statevector::from_amplitudes(std::move(amps)), 0};
    const Operator g = build_grover_operator(inst);
    Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(4);
    Eigen::VectorXcd e2 = Eigen::VectorXcd::Zero(4);
    for (int k = 0; k < 2; ++k) {
      e1(2 * k) = u(k);
      e2(2 * k + 1) = v(k);
    }
    const double c = std::cos(2 * theta);
    const double s = std::sin(2 * theta);
    CHECK((g.matrix() * e1 - (c * e1 - s * e2)).norm() <= 1e-10);
    CHECK((g.matrix() * e2 - (s * e1 + c * e2)).norm() <= 1e-10);
  }

  CHECK_THROWS_AS(build_grover_operator({Statevector(2), 2}), input_error);
  CHECK_THROWS_AS(build_grover_operator({Statevector(2), -1}), input_error);
}

TEST_CASE("amplitude estimates land on the folded grid") {
  std::mt19937_64 rng(202);

  // no flag-0 branch: eigenvalue 1, the register reads zero exactly
  {
    const Eigen::VectorXcd v = random_unit_vector(2, rng);
    std::vector<cplx> amps(4);
    amps[2] = v(0);
    amps[3] = v(1);
    const AmplitudeInstance inst{Statevector::from_amplitudes(std::move(amps)), 1};
    const AmplitudeEstimate est = estimate_amplitude(inst, 1.0 / 16);
    CHECK(est.sin_theta == 0.0);
    CHECK(est.cos_theta == 1.0);
    CHECK(est.theta == 0.0);
    CHECK(est.phase == 0.0);
    CHECK(est.register_bits == 6);
  }

  // balanced branches: eigenphases at 1/4 and 3/4 of a turn, both on grid
  {
    const Eigen::VectorXcd u = random_unit_vector(4, rng);
    const AmplitudeInstance inst = make_instance(std::numbers::pi / 4, u, u);
    const AmplitudeEstimate est = estimate_amplitude(inst, 1.0 / 16);
    CHECK(est.phase == 0.25);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(est.sin_theta - r) <= 1e-12);
    CHECK(std::abs(est.cos_theta - r) <= 1e-12);
  }

  // sin(theta) = 0.6: theta = asin(0.6) recovered within pi * epsilon,
  // asserted at the documented 2 * pi * epsilon slack
  {
    const Eigen::VectorXcd u = random_unit_vector(4, rng);
    const Eigen::VectorXcd v = random_unit_vector(4, rng);
    const double theta = 0.6435011087932844;
    const AmplitudeInstance inst = make_instance(theta, u, v);
    const double eps = std::ldexp(1.0, -6);
    const double slack = 2 * std::numbers::pi * eps;
    const AmplitudeEstimate est = estimate_amplitude(inst, eps);
    CHECK(est.register_bits == 8);
    CHECK(std::abs(est.theta - theta) <= slack);
    CHECK(std::abs(est.sin_theta - 0.6) <= slack);
    CHECK(est.sin_theta * est.sin_theta + est.cos_theta * est.cos_theta ==
          doctest::Approx(1.0).epsilon(1e-12));

    EstimationOptions opts;
    opts.shots = 2000;
    opts.seed = 7;
    const AmplitudeEstimate shot = estimate_amplitude(inst, eps, opts);
    CHECK(std::abs(shot.theta - theta) <= slack);
  }

  // validation
  {
    const AmplitudeInstance inst{Statevector(2), 1};
    CHECK_THROWS_AS(estimate_amplitude(inst, 0.0), input_error);
    CHECK_THROWS_AS(estimate_amplitude(inst, 1.0), input_error);
    EstimationOptions bad;
    bad.delta = 0.0;
    CHECK_THROWS_AS(estimate_amplitude(inst, 0.25, bad), input_error);
  }
}

TEST_CASE("real inner products read off the flag weight") {
  std::mt19937_64 rng(303);
  const double eps = 1.0 / 32;

  // identical states: theta = pi/2 sits on the grid
  {
    const Statevector x = random_state(2, rng);
    CHECK(std::abs(swap_test_real(x, x, eps) - 1.0) <= 1e-12);
  }

  // orthogonal basis states: theta = pi/4 sits on the grid
  {
    const Statevector x = make_basis_state(1, 0);
    const Statevector y = make_basis_state(1, 1);
    CHECK(std::abs(swap_test_real(x, y, eps)) <= 1e-12);
  }

  // frozen pair (1, 0) vs (0.6, 0.8)
  {
    const Statevector x = make_basis_state(1, 0);
    const Statevector y = Statevector::from_amplitudes({cplx(0.6), cplx(0.8)});
    CHECK(std::abs(swap_test_real(x, y, eps) - 0.6) <= eps);
  }

  // seeded corpus against the exact oracle
  for (int trial = 0; trial < 6; ++trial) {
    const Statevector x = random_state(2, rng);
    const Statevector y = random_state(2, rng);
    const double exact = inner_product(x, y).real();
    CHECK(std::abs(swap_test_real(x, y, 1.0 / 16) - exact) <= 1.0 / 16);
  }

  // the contract holds as the budget shrinks
  {
    const Statevector x = random_state(2, rng);
    const Statevector y = random_state(2, rng);
    const double exact = inner_product(x, y).real();
    for (const double e : {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64})
      CHECK(std::abs(swap_test_real(x, y, e) - exact) <= e);
  }

  // shot mode stays within the same budget
  {
    const Statevector x = random_state(1, rng);
    const Statevector y = random_state(1, rng);
    EstimationOptions opts;
    opts.shots = 5000;
    opts.seed = 11;
    const double exact = inner_product(x, y).real();
    CHECK(std::abs(swap_test_real(x, y, 1.0 / 8, opts) - exact) <= 1.0 / 8);
  }

  CHECK_THROWS_AS(swap_test_real(Statevector(1), Statevector(2), eps), input_error);
  CHECK_THROWS_AS(swap_test_real(Statevector(1), Statevector(1), 0.0), input_error);
}

TEST_CASE("complex inner products recover both parts") {
  std::mt19937_64 rng(404);
  const cplx i1(0.0, 1.0);

  // x = x: both runs sit on grid points
  {
    const Statevector x = random_state(2, rng);
    const cplx z = swap_test_full(x, x, 1.0 / 32);
    CHECK(std::abs(z - cplx(1.0)) <= std::sqrt(2.0) / 32);
    CHECK(std::abs(z - cplx(1.0)) <= 1e-12);
  }

  // y = i*x: pure phase, again exact on the grid
  {
    const Statevector x = random_state(2, rng);
    std::vector<cplx> ya = x.amps();
    for (auto& a : ya) a *= i1;
    const Statevector y = Statevector::from_amplitudes(std::move(ya));
    const cplx z = swap_test_full(x, y, 1.0 / 32);
    CHECK(std::abs(z - i1) <= std::sqrt(2.0) / 32);
    CHECK(std::abs(z - i1) <= 1e-12);
  }

  // seeded pairs, component-wise budget
  for (int trial = 0; trial < 3; ++trial) {
    const Statevector x = random_state(2, rng);
    const Statevector y = random_state(2, rng);
    const cplx exact = inner_product(x, y);
    const cplx z = swap_test_full(x, y, 1e-2);
    CHECK(std::abs(z.real() - exact.real()) <= 1e-2);
    CHECK(std::abs(z.imag() - exact.imag()) <= 1e-2);
  }

  // tight budget on a single-qubit pair
  {
    const Statevector x = random_state(1, rng);
    const Statevector y = random_state(1, rng);
    const cplx exact = inner_product(x, y);
    CHECK(std::abs(swap_test_full(x, y, 1e-3) - exact) <= 2e-3);
  }

  // conjugate symmetry
  {
    const Statevector x = random_state(2, rng);
    const Statevector y = random_state(2, rng);
    const cplx ab = swap_test_full(x, y, 1.0 / 16);
    const cplx ba = swap_test_full(y, x, 1.0 / 16);
    CHECK(std::abs(ab - std::conj(ba)) <= 2.0 / 16);
  }
}
