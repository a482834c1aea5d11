#pragma once

#include <cmath>

namespace bnp {

template <typename LogDensity>
SliceResult slice_sample(LogDensity&& log_density, double x0, const SliceConfig& config, RandomStream& rng) {
  const double level = log_density(x0) - rng.exponential();

  double left = x0 - config.width * rng.uniform();
  double right = left + config.width;
  for (int i = 0; i < config.max_stepout && log_density(left) > level; ++i) left -= config.width;
  for (int i = 0; i < config.max_stepout && log_density(right) > level; ++i) right += config.width;

  for (int i = 0; i < config.max_shrink; ++i) {
    const double x1 = left + rng.uniform() * (right - left);
    if (log_density(x1) > level) return {x1, true};
    if (x1 < x0) {
      left = x1;
    } else {
      right = x1;
    }
  }
  return {x0, false};
}

}  // namespace bnp
