#pragma once

#include <cstdint>
#include <vector>

namespace rddg {

/// Step-size rule eta_i = c / i^p. Construction enforces the Robbins-Monro
/// conditions (sum eta = inf, sum eta^2 < inf), which for this family means
/// 0.5 < p <= 1. Constant steps (p = 0) and c/sqrt(i) (p = 0.5) are rejected.
struct StepRule {
  double c = 1.0;
  double p = 1.0;

  StepRule(double c_, double p_);
  double at(std::size_t i) const;  // i >= 1
};

/// Concave quadratic utility -curvature * (phi - target)^2 with a noisy
/// supergradient; the desk-scale stand-in for posterior expected utility.
struct AscentSpec {
  double target = 0.0;      // the maximizer phi*
  double curvature = 1.0;   // must be > 0 for concavity
  double noise_sigma = 0.0; // std of additive Gaussian gradient noise
  double lower = -1.0;      // projection interval, lower <= upper
  double upper = 1.0;
  double start = 0.0;       // phi_0 (projected onto the interval at step 1)
};

struct AscentRun {
  AscentSpec spec;
  StepRule step{1.0, 1.0};
  std::vector<double> trajectory;  // phi_0 .. phi_T

  double final_value() const { return trajectory.back(); }
};

/// Projected stochastic supergradient ascent
///   phi_i = clamp(phi_{i-1} + eta_i * g_i, lower, upper)
/// with g_i = -2 * curvature * (phi_{i-1} - target) + noise.
AscentRun simulate_calibration(const AscentSpec& spec, const StepRule& step, std::size_t steps,
                               std::uint64_t seed);

}  // namespace rddg
