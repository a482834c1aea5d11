#include "bnp/log_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bnp {

double log_sum_exp(std::span<const double> x) {
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  if (x.empty()) return neg_inf;
  const double m = *std::max_element(x.begin(), x.end());
  if (m == neg_inf) return neg_inf;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

double log_mean_exp(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("log_mean_exp: empty input");
  return log_sum_exp(x) - std::log(static_cast<double>(x.size()));
}

void normalize_log(std::vector<double>& x) {
  const double z = log_sum_exp(x);
  for (double& v : x) v -= z;
}

std::size_t sample_log_categorical(std::span<const double> log_weights, RandomStream& rng) {
  if (log_weights.empty()) throw std::invalid_argument("sample_log_categorical: no outcomes");
  const double m = *std::max_element(log_weights.begin(), log_weights.end());
  if (!std::isfinite(m)) throw std::domain_error("sample_log_categorical: no finite weight");

  double total = 0.0;
  for (double v : log_weights) total += std::exp(v - m);
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    const double w = std::exp(log_weights[i] - m);
    if (u < w) return i;
    u -= w;
  }
  // Rounding can leave u a hair above the last weight; fall back to the last
  // outcome with positive mass.
  for (std::size_t i = log_weights.size(); i-- > 0;) {
    if (std::isfinite(log_weights[i])) return i;
  }
  return log_weights.size() - 1;
}

double sample_mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  // Shifted by the first value so that constant input gives exactly zero.
  const double shift = x[0];
  double m = 0.0;
  for (double v : x) m += v - shift;
  m /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - shift - m) * (v - shift - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

}  // namespace bnp
