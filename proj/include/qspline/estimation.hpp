#pragma once

#include <cstdint>

#include "qspline/statevector.hpp"

namespace qspline {

// State of the form sin(theta)|0>|u> + cos(theta)|1>|v> where the flag
// qubit separates the two normalized branches.  theta in [0, pi/2] is
// defined by the branch weights, P(flag = 0) = sin^2 theta.
struct AmplitudeInstance {
  Statevector state;
  int flag = 0;
};

// Instance whose flag-0 branch holds (|x> + |y>)/2, so its weight is
// (1 + Re<x|y>)/2.  The flag is the new top qubit.
AmplitudeInstance hadamard_test_instance(const Statevector& x, const Statevector& y);

// (2|phi><phi| - I)(Y (x) I) with Y = diag(-1, 1) on the flag qubit.
// Restricted to span{|0>|u>, |1>|v>} this rotates by 2*theta, so the
// eigenvalues there are exp(+-2i*theta).
Operator build_grover_operator(const AmplitudeInstance& instance);

struct EstimationOptions {
  double delta = 0.25;      // failure budget handed to the register sizing
  std::uint64_t shots = 0;  // 0 reads the exact register distribution
  std::uint64_t seed = 0;   // sampler seed when shots > 0
  Exec how = Exec::automatic;
};

struct AmplitudeEstimate {
  double sin_theta = 0.0;
  double cos_theta = 1.0;
  double theta = 0.0;  // pi * phase
  double phase = 0.0;  // folded register fraction in [0, 1/2]
  int register_bits = 0;
};

// Phase estimation of the rotation operator, started from the instance
// state itself.  Both eigenphases +-2*theta appear; the readout is folded
// by phase <- min(phase, 1 - phase) so theta lands in [0, pi/2].
//
// `epsilon` bounds the register phase fraction at confidence >= 1 - delta;
// theta = pi * phase stretches that to pi * epsilon in angle units, a
// factor deliberately left visible rather than absorbed here.
AmplitudeEstimate estimate_amplitude(const AmplitudeInstance& instance, double epsilon,
                                     const EstimationOptions& options = {});

// Re<x|y> within epsilon, read from the flag-0 weight of the Hadamard-test
// state as 2 * P(0) - 1.  Internally runs estimate_amplitude with phase
// budget epsilon / (2*pi), which covers the slope of 2*sin^2 theta.
double swap_test_real(const Statevector& x, const Statevector& y, double epsilon,
                      const EstimationOptions& options = {});

// <x|y> with each component within epsilon.  Two equal-budget real runs;
// the imaginary part comes from Re<x|i*y> = -Im<x|y>.
cplx swap_test_full(const Statevector& x, const Statevector& y, double epsilon,
                    const EstimationOptions& options = {});

}  // namespace qspline
