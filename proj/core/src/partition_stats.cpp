#include "bnp/partition_stats.hpp"

#include <cmath>
#include <stdexcept>

#include "bnp/log_math.hpp"
#include "bnp/parallel.hpp"

namespace bnp {

std::uint64_t ClusterSizeHistogram::num_clusters() const {
  std::uint64_t k = 0;
  for (const auto& [size, count] : counts) k += count;
  return k;
}

std::uint64_t ClusterSizeHistogram::total_mass() const {
  std::uint64_t total = 0;
  for (const auto& [size, count] : counts) total += static_cast<std::uint64_t>(size) * count;
  return total;
}

ClusterSizeHistogram histogram(const Partition& partition) {
  ClusterSizeHistogram h;
  h.n = partition.size();
  for (std::uint32_t size : partition.sizes()) ++h.counts[size];
  return h;
}

namespace {

void require_positive_theta(double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
}

void require_open_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("Pitman-Yor asymptotics require 0 < alpha < 1 (use the Dirichlet forms at alpha = 0)");
  }
}

}  // namespace

double expected_k_dp(double theta, std::uint64_t n) {
  require_positive_theta(theta);
  double sum = 0.0;
  for (std::uint64_t m = 1; m <= n; ++m) sum += theta / (static_cast<double>(m - 1) + theta);
  return sum;
}

double asymptotic_k_dp(double theta, std::uint64_t n) {
  require_positive_theta(theta);
  return theta * std::log(static_cast<double>(n));
}

double expected_k_py(double theta, double alpha, std::uint64_t n) {
  require_positive_theta(theta);
  require_open_alpha(alpha);
  const double log_coef = std::lgamma(1.0 + theta) - std::log(alpha) - std::lgamma(alpha + theta);
  return std::exp(log_coef + alpha * std::log(static_cast<double>(n)));
}

double expected_k_up(double theta, std::uint64_t n) {
  require_positive_theta(theta);
  return std::sqrt(2.0 * theta * static_cast<double>(n));
}

double expected_h_dp(double theta, std::uint32_t m) {
  require_positive_theta(theta);
  if (m == 0) throw std::invalid_argument("cluster size M must be at least 1");
  return theta / m;
}

double expected_h_py(double theta, double alpha, std::uint32_t m, std::uint64_t n) {
  require_positive_theta(theta);
  require_open_alpha(alpha);
  if (m == 0) throw std::invalid_argument("cluster size M must be at least 1");
  // prod_{j=1}^{M-1} (j - alpha) / M!  accumulated in log space.
  double log_ratio = -std::log(static_cast<double>(m));
  for (std::uint32_t j = 1; j < m; ++j) log_ratio += std::log((j - alpha) / j);
  const double log_value = std::lgamma(1.0 + theta) - std::lgamma(alpha + theta) + log_ratio +
                           alpha * std::log(static_cast<double>(n));
  return std::exp(log_value);
}

double expected_h_up(double theta) {
  require_positive_theta(theta);
  return theta;
}

double exact_expected_k_up(double theta, std::uint64_t n) {
  require_positive_theta(theta);
  if (n == 0) return 0.0;
  // prob[j] = P(K = lo + j) after the current number of observations.
  std::vector<double> prob{1.0};
  std::vector<double> next;
  std::uint64_t lo = 1;
  constexpr double floor = 1e-300;
  for (std::uint64_t obs = 1; obs < n; ++obs) {
    next.assign(prob.size() + 1, 0.0);
    for (std::size_t j = 0; j < prob.size(); ++j) {
      const double k = static_cast<double>(lo + j);
      const double p_new = theta / (k + theta);
      next[j] += prob[j] * (1.0 - p_new);
      next[j + 1] += prob[j] * p_new;
    }
    std::size_t first = 0;
    std::size_t last = next.size();
    while (first + 1 < last && next[first] < floor) ++first;
    while (last - 1 > first && next[last - 1] < floor) --last;
    prob.assign(next.begin() + static_cast<std::ptrdiff_t>(first), next.begin() + static_cast<std::ptrdiff_t>(last));
    lo += first;
  }
  double mean = 0.0;
  double mass = 0.0;
  for (std::size_t j = 0; j < prob.size(); ++j) {
    mean += prob[j] * static_cast<double>(lo + j);
    mass += prob[j];
  }
  return mean / mass;
}

double exact_expected_k_py(double theta, double alpha, std::uint64_t n) {
  require_positive_theta(theta);
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must satisfy 0 <= alpha < 1");
  if (n == 0) return 0.0;
  double e = 1.0;
  for (std::uint64_t m = 1; m < n; ++m) {
    const double denom = static_cast<double>(m) + theta;
    e = e * (1.0 + alpha / denom) + theta / denom;
  }
  return e;
}

std::vector<SimulationSummary> run_simulation(std::span<const PriorSpec> specs,
                                              std::span<const std::uint64_t> n_grid,
                                              std::uint64_t replicates, std::uint64_t master_seed,
                                              unsigned jobs) {
  if (replicates == 0) throw std::invalid_argument("run_simulation: replicates must be at least 1");
  if (n_grid.empty()) throw std::invalid_argument("run_simulation: n_grid is empty");
  for (auto n : n_grid) {
    if (n == 0) throw std::invalid_argument("run_simulation: every n must be at least 1");
  }

  const RandomStream master(master_seed);
  std::vector<SimulationSummary> out;
  out.reserve(specs.size() * n_grid.size());

  for (std::size_t s = 0; s < specs.size(); ++s) {
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      const RandomStream cell = master.child(s).child(i);
      std::vector<ClusterSizeHistogram> results(replicates);
      parallel_for(replicates, jobs, [&](std::size_t r) {
        RandomStream rng = cell.child(r);
        results[r] = histogram(sample_partition(specs[s], n_grid[i], rng));
      });

      SimulationSummary summary{specs[s], n_grid[i], replicates, 0.0, 0.0, {}, master_seed};
      std::vector<double> ks;
      ks.reserve(replicates);
      std::map<std::uint32_t, double> h_sum;
      for (const auto& h : results) {
        ks.push_back(static_cast<double>(h.num_clusters()));
        for (const auto& [size, count] : h.counts) h_sum[size] += static_cast<double>(count);
      }
      summary.mean_k = sample_mean(ks);
      summary.se_k = sample_sd(ks) / std::sqrt(static_cast<double>(replicates));
      for (const auto& [size, total] : h_sum) summary.mean_h[size] = total / static_cast<double>(replicates);
      out.push_back(std::move(summary));
    }
  }
  return out;
}

double fit_growth_exponent(std::span<const double> n, std::span<const double> k) {
  if (n.size() != k.size()) throw std::invalid_argument("fit_growth_exponent: size mismatch");
  if (n.size() < 2) throw std::invalid_argument("fit_growth_exponent: need at least two points");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(n[i] > 0.0) || !(k[i] > 0.0)) throw std::invalid_argument("fit_growth_exponent: values must be positive");
    x.push_back(std::log(n[i]));
    y.push_back(std::log(k[i]));
  }
  const double mx = sample_mean(x);
  const double my = sample_mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_growth_exponent: need at least two distinct n");
  return sxy / sxx;
}

double fit_growth_exponent(std::span<const SimulationSummary> summaries) {
  std::vector<double> n, k;
  for (const auto& s : summaries) {
    n.push_back(static_cast<double>(s.n));
    k.push_back(s.mean_k);
  }
  return fit_growth_exponent(n, k);
}

}  // namespace bnp
