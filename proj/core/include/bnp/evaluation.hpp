#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "bnp/corpus.hpp"
#include "bnp/doc_model.hpp"
#include "bnp/prior_process.hpp"

namespace bnp {

struct EvalConfig {
  std::size_t particles = 100;
  /// Independent estimator runs, each over its own random ordering of the
  /// test documents (or the given order when permute_test is false).
  std::size_t test_permutations = 20;
  std::uint64_t seed = 0;
  bool permute_test = true;
};

struct HeldoutEstimate {
  double mean = 0.0;
  /// SD across runs (orderings).
  double sd = 0.0;
  std::vector<double> per_run;
};

/// Sequential particle estimate of log P(test | trained assignments, counts,
/// hypers, theta) with the test documents taken in the given order after the
/// training documents. Every particle keeps its own assignments of the test
/// documents seen so far; at each document it computes the marginal s_r over
/// all candidate clusters, multiplies s_r into its weight, and draws its
/// assignment proportionally to the summands. No resampling. Returns the log
/// of the mean particle weight, an unbiased estimate of the marginal
/// likelihood in the probability domain.
double left_to_right_log_prob_ordered(std::span<const Document> test, const ChainState& trained,
                                      std::size_t particles, RandomStream& rng);

/// config.test_permutations runs of the ordered estimator; run r draws from
/// RandomStream(config.seed).child(r).
HeldoutEstimate left_to_right_log_prob(std::span<const Document> test, const ChainState& trained,
                                       const EvalConfig& config, unsigned jobs = 1);

/// Exact log of the sum over every assignment sequence of the test documents
/// (existing training clusters or fresh ones), in the given order. At most
/// six test documents.
double exact_heldout_log_prob(std::span<const Document> test, const ChainState& trained);

inline constexpr std::size_t kExactHeldoutLimit = 6;

struct HeldoutCell {
  ProcessKind prior;
  double theta;
  /// Held-out estimate of each chain (mean over its runs).
  std::vector<double> chain_logprob;
  double logprob_mean = 0.0;
  /// SD across chains, estimator runs and test orderings.
  double logprob_sd = 0.0;
  /// Cluster count of each chain's final partition.
  std::vector<double> chain_clusters;
  double mean_num_clusters = 0.0;
  double num_clusters_sd = 0.0;
};

struct HeldoutReport {
  std::vector<HeldoutCell> cells;
  ChainConfig chain_config;
  EvalConfig eval_config;
  std::size_t chains = 0;
  std::uint64_t master_seed = 0;
};

/// Trains `chains` chains per (prior, theta) on `train` and evaluates each
/// final state on `test`. Both corpora must share one vocabulary.
HeldoutReport compare_priors_heldout(const Corpus& train, const Corpus& test, std::span<const ProcessKind> priors,
                                     std::span<const double> theta_grid, std::size_t chains,
                                     const ChainConfig& chain_config, const EvalConfig& eval_config,
                                     std::uint64_t master_seed, unsigned jobs = 1);

nlohmann::json to_json(const HeldoutReport& report);

}  // namespace bnp
