#pragma once

// Shared pieces of the three-level smoothed token predictive. The Gibbs
// sweep, the public doc_log_likelihood and the held-out estimator all go
// through these two functions so the formula lives in one place.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "bnp/corpus.hpp"
#include "bnp/doc_model.hpp"

namespace bnp::detail {

/// occ[n] = occurrences of doc[n] among doc[0..n). `scratch` must be
/// zero-filled with at least W entries; it is returned zero-filled.
inline void prefix_occurrences(std::span<const WordId> doc, std::vector<std::uint32_t>& occ,
                               std::vector<std::uint32_t>& scratch) {
  occ.resize(doc.size());
  for (std::size_t n = 0; n < doc.size(); ++n) occ[n] = scratch[doc[n]]++;
  for (WordId w : doc) scratch[w] = 0;
}

/// Corpus-level smoothed probability of every token given corpus counts
/// (excluding the document) plus the document prefix.
template <typename CorpusCount>
void corpus_level_probs(std::span<const WordId> doc, std::span<const std::uint32_t> occ, CorpusCount&& corpus_count,
                        std::uint64_t corpus_total, std::size_t vocab_size, const HyperParams& h,
                        std::vector<double>& p_corpus) {
  p_corpus.resize(doc.size());
  const double base = h.beta0 / static_cast<double>(vocab_size);
  for (std::size_t n = 0; n < doc.size(); ++n) {
    p_corpus[n] = (static_cast<double>(corpus_count(doc[n])) + occ[n] + base) /
                  (static_cast<double>(corpus_total) + static_cast<double>(n) + h.beta0);
  }
}

/// Sum over tokens of log p_token for one candidate cluster.
template <typename ClusterCount>
double cluster_log_likelihood(std::span<const WordId> doc, std::span<const std::uint32_t> occ,
                              std::span<const double> p_corpus, ClusterCount&& cluster_count,
                              std::uint64_t cluster_total, const HyperParams& h) {
  double total = 0.0;
  for (std::size_t n = 0; n < doc.size(); ++n) {
    const double pos = static_cast<double>(n);
    const double p_cluster = (static_cast<double>(cluster_count(doc[n])) + occ[n] + h.beta1 * p_corpus[n]) /
                             (static_cast<double>(cluster_total) + pos + h.beta1);
    total += std::log((occ[n] + h.beta * p_cluster) / (pos + h.beta));
  }
  return total;
}

}  // namespace bnp::detail
