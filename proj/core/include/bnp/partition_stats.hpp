#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "bnp/prior_process.hpp"

namespace bnp {

/// H_{M,N}: number of clusters of each size M, stored sparsely.
struct ClusterSizeHistogram {
  std::map<std::uint32_t, std::uint64_t> counts;
  std::uint64_t n = 0;

  [[nodiscard]] std::uint64_t num_clusters() const;
  /// Sum over M of M * H_M; equals n for any histogram built from a partition.
  [[nodiscard]] std::uint64_t total_mass() const;
};

ClusterSizeHistogram histogram(const Partition& partition);

// Closed forms for E[K_N] and E[H_{M,N}].

/// Exact sum_{m=1}^{n} theta / (m - 1 + theta).
double expected_k_dp(double theta, std::uint64_t n);
/// theta * log(n), the large-n form of expected_k_dp.
double asymptotic_k_dp(double theta, std::uint64_t n);
/// Gamma(1+theta) / (alpha Gamma(alpha+theta)) n^alpha. Requires 0 < alpha < 1.
double expected_k_py(double theta, double alpha, std::uint64_t n);
/// sqrt(2 theta n).
double expected_k_up(double theta, std::uint64_t n);

double expected_h_dp(double theta, std::uint32_t m);
double expected_h_py(double theta, double alpha, std::uint32_t m, std::uint64_t n);
double expected_h_up(double theta);

/// Exact finite-n E[K_n] for the uniform process, by propagating the
/// distribution of K one observation at a time (the UP predictive depends on
/// K only). States whose probability falls below 1e-300 are dropped.
double exact_expected_k_up(double theta, std::uint64_t n);

/// Exact finite-n E[K_n] for Pitman-Yor (alpha = 0 gives the Dirichlet
/// process) from the linear recursion
/// E[K_{n+1}] = E[K_n] (1 + alpha/(n+theta)) + theta/(n+theta).
double exact_expected_k_py(double theta, double alpha, std::uint64_t n);

struct SimulationSummary {
  PriorSpec spec;
  std::uint64_t n = 0;
  std::uint64_t replicates = 0;
  double mean_k = 0.0;
  double se_k = 0.0;
  std::map<std::uint32_t, double> mean_h;
  std::uint64_t master_seed = 0;
};

/// For every (spec, n) pair samples `replicates` partitions and aggregates
/// K and H_{M,N}. Replicate r of cell (s, i) uses
/// RandomStream(master_seed).child(s).child(i).child(r), so the output is
/// identical for every value of `jobs`.
std::vector<SimulationSummary> run_simulation(std::span<const PriorSpec> specs,
                                              std::span<const std::uint64_t> n_grid,
                                              std::uint64_t replicates, std::uint64_t master_seed,
                                              unsigned jobs = 1);

/// OLS slope of log(mean_k) on log(n).
double fit_growth_exponent(std::span<const SimulationSummary> summaries);
double fit_growth_exponent(std::span<const double> n, std::span<const double> k);

}  // namespace bnp
