#include "rddg/ascent.hpp"

#include <algorithm>
#include <cmath>

#include "rddg/error.hpp"
#include "rddg/rng.hpp"
#include "rddg/text.hpp"

namespace rddg {

StepRule::StepRule(double c_, double p_) : c(c_), p(p_) {
  if (c <= 0.0) throw ConfigError("step rule needs c > 0");
  // sum c/i^p diverges iff p <= 1; sum (c/i^p)^2 converges iff p > 0.5
  if (!(p > 0.5 && p <= 1.0))
    throw ConfigError("step rule c/i^" + text::format_double(p) +
                      " violates the Robbins-Monro conditions (need 0.5 < p <= 1)");
}

double StepRule::at(std::size_t i) const { return c / std::pow(static_cast<double>(i), p); }

AscentRun simulate_calibration(const AscentSpec& spec, const StepRule& step, std::size_t steps,
                               std::uint64_t seed) {
  if (spec.curvature <= 0.0)
    throw ConfigError("ascent spec must be concave: curvature > 0 required");
  if (spec.lower > spec.upper) throw ConfigError("ascent projection interval is empty");
  if (spec.noise_sigma < 0.0) throw ConfigError("ascent noise sigma must be >= 0");

  Rng rng(seed);
  AscentRun run;
  run.spec = spec;
  run.step = step;
  run.trajectory.reserve(steps + 1);
  run.trajectory.push_back(spec.start);

  double phi = spec.start;
  for (std::size_t i = 1; i <= steps; ++i) {
    double g = -2.0 * spec.curvature * (phi - spec.target);
    if (spec.noise_sigma > 0.0) g += rng.normal(0.0, spec.noise_sigma);
    phi = std::clamp(phi + step.at(i) * g, spec.lower, spec.upper);
    run.trajectory.push_back(phi);
  }
  return run;
}

}  // namespace rddg
