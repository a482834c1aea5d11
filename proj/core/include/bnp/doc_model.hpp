#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "bnp/corpus.hpp"
#include "bnp/prior_process.hpp"
#include "bnp/random.hpp"

namespace bnp {

/// Concentrations of the three smoothing levels: document (beta),
/// cluster (beta1) and corpus (beta0).
struct HyperParams {
  double beta = 1.0;
  double beta1 = 1.0;
  double beta0 = 1.0;

  void validate() const;
  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

using ClusterId = std::uint32_t;
inline constexpr ClusterId kNoCluster = std::numeric_limits<ClusterId>::max();

/// Sufficient statistics of the word mixture: per-cluster word counts,
/// per-cluster token and document totals, and corpus-wide word counts.
/// Cluster ids are slots; a slot is released when its last document leaves
/// and may be reused by open_cluster().
class CountState {
 public:
  explicit CountState(std::size_t vocab_size = 0);

  [[nodiscard]] std::size_t vocab_size() const noexcept { return vocab_size_; }
  /// Grows the vocabulary; existing counts are kept and new words start at 0.
  void resize_vocab(std::size_t vocab_size);

  ClusterId open_cluster();
  void add_document(std::span<const WordId> doc, ClusterId cluster);
  /// Throws std::logic_error if the document is not present in `cluster`.
  void remove_document(std::span<const WordId> doc, ClusterId cluster);

  [[nodiscard]] bool is_active(ClusterId c) const noexcept { return c < docs_.size() && docs_[c] > 0; }
  [[nodiscard]] std::size_t slot_capacity() const noexcept { return docs_.size(); }
  [[nodiscard]] std::size_t num_clusters() const noexcept { return active_; }
  [[nodiscard]] std::vector<ClusterId> active_clusters() const;

  [[nodiscard]] std::uint32_t cluster_word(ClusterId c, WordId w) const { return words_[c][w]; }
  [[nodiscard]] std::uint64_t cluster_tokens(ClusterId c) const { return tokens_[c]; }
  [[nodiscard]] std::uint64_t cluster_docs(ClusterId c) const { return docs_[c]; }
  [[nodiscard]] std::uint64_t corpus_word(WordId w) const { return corpus_words_[w]; }
  [[nodiscard]] std::uint64_t corpus_tokens() const noexcept { return corpus_tokens_; }
  [[nodiscard]] std::span<const std::uint32_t> cluster_words(ClusterId c) const { return words_[c]; }

  /// Moves active slot order[i] to slot i and drops every other slot.
  void compact(std::span<const ClusterId> order);

  friend bool operator==(const CountState& a, const CountState& b);

 private:
  std::size_t vocab_size_;
  std::vector<std::vector<std::uint32_t>> words_;
  std::vector<std::uint64_t> tokens_;
  std::vector<std::uint64_t> docs_;
  std::vector<std::uint64_t> corpus_words_;
  std::uint64_t corpus_tokens_ = 0;
  std::size_t active_ = 0;
  std::vector<ClusterId> free_;
};

/// Counts implied by (corpus, labels); labels must be canonical (0..K-1).
CountState build_counts(const Corpus& corpus, std::span<const Label> labels);

/// Log-probability of the tokens of one document under the three-level
/// smoothed predictive, with `counts` excluding the document. Each token sees
/// the document's own earlier tokens at the document, cluster and corpus
/// levels:
///
///   p_corpus  = (N_w + a + beta0/W) / (N + n + beta0)
///   p_cluster = (N_w|c + a + beta1 p_corpus) / (N_c + n + beta1)
///   p_token   = (a + beta p_cluster) / (n + beta)
///
/// where n is the token's position and a the number of earlier occurrences
/// of the same word in the document. `cluster == std::nullopt` scores a new
/// cluster (zero cluster counts). Throws std::out_of_range on a word id >= W.
double doc_log_likelihood(std::span<const WordId> doc, const CountState& counts,
                          std::optional<ClusterId> cluster, const HyperParams& hypers);

/// Normalized conditional prior over the clusters of the other documents
/// (in order of first appearance) followed by a new cluster.
struct CandidatePrior {
  std::vector<ClusterId> clusters;
  /// clusters.size() + 1 entries; the last one is the new cluster.
  std::vector<double> log_probs;
};

/// Dirichlet-process conditional; labels[d] is ignored.
CandidatePrior conditional_prior_dp(std::size_t d, std::span<const ClusterId> labels, double theta);

/// Uniform-process conditional under the fixed document order: each candidate
/// is scored by the full sequential product from position d onward, which
/// propagates c_d into the first-occurrence structure of later documents.
/// This version evaluates every candidate sequence directly.
CandidatePrior conditional_prior_up(std::size_t d, std::span<const ClusterId> labels, double theta);

/// Same distribution as conditional_prior_up in O(D + K) using prefix sums
/// over the later documents. The Gibbs sweep uses this path.
CandidatePrior conditional_prior_up_incremental(std::size_t d, std::span<const ClusterId> labels, double theta);

/// Chain-rule log P(W | c, hypers) with documents scored in corpus order,
/// each against the documents before it.
double corpus_log_likelihood(const Corpus& corpus, std::span<const ClusterId> labels, const HyperParams& hypers);

struct ChainState {
  PriorSpec prior;
  HyperParams hypers;
  /// Cluster slot of every document; canonical (0..K-1 in first-appearance
  /// order) after every sweep.
  std::vector<ClusterId> labels;
  CountState counts;
  std::uint64_t iteration = 0;
  RandomStream rng;

  [[nodiscard]] Partition assignments() const;
};

/// Chain state with the given canonical or arbitrary labels; counts are
/// rebuilt from the corpus.
ChainState make_chain_state(const Corpus& corpus, const PriorSpec& prior, const HyperParams& hypers,
                            std::span<const Label> labels, RandomStream rng);

/// Adds documents one at a time, drawing each assignment from prior
/// predictive times likelihood given the documents already placed.
ChainState initialize_chain(const Corpus& corpus, const PriorSpec& prior, const HyperParams& hypers,
                            RandomStream rng);

/// One systematic scan over the documents in corpus order. Supports the
/// Dirichlet and uniform processes.
void gibbs_sweep(ChainState& state, const Corpus& corpus);

/// True when the incrementally maintained counts equal a rebuild from scratch.
bool counts_consistent(const ChainState& state, const Corpus& corpus);

struct SliceConfig {
  double width = 1.0;
  int max_stepout = 100;
  int max_shrink = 100;
  double log_lower = -10.0;
  double log_upper = 10.0;
};

struct SliceResult {
  double x;
  bool accepted;
};

/// One univariate slice-sampling update (stepping out, then shrinkage) of
/// `log_density` starting from x0. On shrinkage failure x0 is returned with
/// accepted == false.
template <typename LogDensity>
SliceResult slice_sample(LogDensity&& log_density, double x0, const SliceConfig& config, RandomStream& rng);

/// Updates beta, beta1 and beta0 in turn by slice sampling log(beta) under a
/// uniform prior on [log_lower, log_upper], targeting corpus_log_likelihood.
void slice_sample_hypers(ChainState& state, const Corpus& corpus, const SliceConfig& config = {});

struct ChainConfig {
  std::uint64_t sweeps = 1000;
  std::uint64_t burn_in = 0;
  /// Resample hypers every this many sweeps; 0 keeps them fixed.
  std::uint64_t hyper_interval = 1;
  std::uint64_t thin = 1;
  std::uint64_t seed = 0;
  HyperParams initial_hypers{};
  SliceConfig slice{};
};

struct PosteriorSample {
  Partition assignments;
  HyperParams hypers;
  std::uint64_t iteration = 0;
};

struct ChainRun {
  std::vector<PosteriorSample> samples;
  ChainState final_state;
};

ChainRun run_chain(const Corpus& corpus, const PriorSpec& prior, const ChainConfig& config);

/// Fraction of item pairs on which two clusterings agree about co-membership.
double pairwise_agreement(std::span<const Label> a, std::span<const Label> b);

}  // namespace bnp

#include "bnp/slice_sampler.ipp"
