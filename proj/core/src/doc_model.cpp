#include "bnp/doc_model.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "bnp/log_math.hpp"
#include "likelihood_detail.hpp"

namespace bnp {

void HyperParams::validate() const {
  if (!(beta > 0.0) || !(beta1 > 0.0) || !(beta0 > 0.0) || !std::isfinite(beta) || !std::isfinite(beta1) ||
      !std::isfinite(beta0)) {
    throw std::invalid_argument("HyperParams: beta, beta1 and beta0 must be positive and finite");
  }
}

CountState build_counts(const Corpus& corpus, std::span<const Label> labels) {
  if (labels.size() != corpus.size()) throw std::invalid_argument("build_counts: one label per document required");
  CountState counts(corpus.vocab_size());
  for (std::size_t d = 0; d < labels.size(); ++d) {
    while (counts.slot_capacity() <= labels[d]) counts.open_cluster();
    counts.add_document(corpus.documents[d], labels[d]);
  }
  return counts;
}

double doc_log_likelihood(std::span<const WordId> doc, const CountState& counts, std::optional<ClusterId> cluster,
                          const HyperParams& hypers) {
  const std::size_t w_count = counts.vocab_size();
  for (WordId w : doc) {
    if (w >= w_count) throw std::out_of_range("doc_log_likelihood: word id " + std::to_string(w) + " >= W");
  }
  if (cluster && !counts.is_active(*cluster)) {
    throw std::out_of_range("doc_log_likelihood: cluster slot is not active");
  }

  std::vector<std::uint32_t> scratch(w_count, 0);
  std::vector<std::uint32_t> occ;
  detail::prefix_occurrences(doc, occ, scratch);
  std::vector<double> p_corpus;
  detail::corpus_level_probs(
      doc, occ, [&](WordId w) { return counts.corpus_word(w); }, counts.corpus_tokens(), w_count, hypers, p_corpus);
  if (cluster) {
    const auto words = counts.cluster_words(*cluster);
    return detail::cluster_log_likelihood(
        doc, occ, p_corpus, [&](WordId w) { return words[w]; }, counts.cluster_tokens(*cluster), hypers);
  }
  return detail::cluster_log_likelihood(doc, occ, p_corpus, [](WordId) { return 0U; }, 0, hypers);
}

namespace {

// Distinct labels of positions other than d, in order of first appearance.
std::vector<ClusterId> other_clusters(std::size_t d, std::span<const ClusterId> labels) {
  std::vector<ClusterId> out;
  std::unordered_map<ClusterId, bool> seen;
  for (std::size_t m = 0; m < labels.size(); ++m) {
    if (m == d) continue;
    if (seen.emplace(labels[m], true).second) out.push_back(labels[m]);
  }
  return out;
}

void check_position(std::size_t d, std::span<const ClusterId> labels, double theta) {
  if (d >= labels.size()) throw std::out_of_range("conditional prior: document index out of range");
  if (!(theta > 0.0)) throw std::invalid_argument("conditional prior: theta must be positive");
}

// Scores of the uniform-process conditional for every slot that occurs at a
// position other than d, plus the new-cluster score (unnormalized).
// log_kt[k] = log(k + theta) for k = 0..D.
struct UpScratch {
  std::vector<std::uint8_t> mark;  // 0 unseen, 1 before d, 2 first seen after d
  std::vector<double> score;
  struct FirstLater {
    double b_before;
    double a_through;
    std::size_t a_count;
  };
  std::vector<FirstLater> later;
};

double up_scores(std::size_t d, std::span<const ClusterId> labels, double log_theta, std::span<const double> log_kt,
                 std::size_t capacity, UpScratch& s) {
  s.mark.assign(capacity, 0);
  s.score.assign(capacity, 0.0);
  s.later.resize(capacity);

  std::size_t k_before = 0;
  for (std::size_t m = 0; m < d; ++m) {
    if (s.mark[labels[m]] == 0) {
      s.mark[labels[m]] = 1;
      ++k_before;
    }
  }
  const double own_join = -log_kt[k_before];
  const double own_new = log_theta - log_kt[k_before];

  // Two baselines over later positions: A, where position d adds no cluster
  // to the prefix, and B, where it adds one cluster nobody else uses yet.
  std::size_t a_count = k_before;
  double cum_a = 0.0;
  double cum_b = 0.0;
  for (std::size_t m = d + 1; m < labels.size(); ++m) {
    const ClusterId l = labels[m];
    const bool first = s.mark[l] == 0;
    const double head = first ? log_theta : 0.0;
    const double f_a = head - log_kt[a_count];
    const double f_b = head - log_kt[a_count + 1];
    if (first) {
      s.mark[l] = 2;
      s.later[l] = {cum_b, cum_a + f_a, a_count};
      ++a_count;
    }
    cum_a += f_a;
    cum_b += f_b;
  }

  for (std::size_t c = 0; c < capacity; ++c) {
    if (s.mark[c] == 1) {
      s.score[c] = own_join + cum_a;
    } else if (s.mark[c] == 2) {
      // c_d = c turns position d into c's first occurrence; the later first
      // occurrence becomes a join and everything after it matches baseline A.
      const auto& f = s.later[c];
      s.score[c] = own_new + f.b_before - log_kt[f.a_count + 1] + (cum_a - f.a_through);
    }
  }
  return own_new + cum_b;
}

std::vector<double> log_k_theta_table(std::size_t max_k, double theta) {
  std::vector<double> t(max_k + 2);
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = std::log(static_cast<double>(k) + theta);
  return t;
}

}  // namespace

CandidatePrior conditional_prior_dp(std::size_t d, std::span<const ClusterId> labels, double theta) {
  check_position(d, labels, theta);
  CandidatePrior out;
  out.clusters = other_clusters(d, labels);
  std::unordered_map<ClusterId, std::size_t> size;
  for (std::size_t m = 0; m < labels.size(); ++m) {
    if (m != d) ++size[labels[m]];
  }
  const double z = std::log(static_cast<double>(labels.size() - 1) + theta);
  for (ClusterId c : out.clusters) out.log_probs.push_back(std::log(static_cast<double>(size[c])) - z);
  out.log_probs.push_back(std::log(theta) - z);
  return out;
}

CandidatePrior conditional_prior_up(std::size_t d, std::span<const ClusterId> labels, double theta) {
  check_position(d, labels, theta);
  CandidatePrior out;
  out.clusters = other_clusters(d, labels);
  const PriorSpec spec = PriorSpec::uniform(theta);

  std::vector<ClusterId> seq(labels.begin(), labels.end());
  ClusterId fresh = 0;
  for (ClusterId c : labels) fresh = std::max(fresh, c == kNoCluster ? 0 : c + 1);
  for (std::size_t i = 0; i <= out.clusters.size(); ++i) {
    seq[d] = i < out.clusters.size() ? out.clusters[i] : fresh;
    out.log_probs.push_back(log_joint(spec, Partition::from_labels(seq)));
  }
  normalize_log(out.log_probs);
  return out;
}

CandidatePrior conditional_prior_up_incremental(std::size_t d, std::span<const ClusterId> labels, double theta) {
  check_position(d, labels, theta);
  // Remap to dense ids so the scratch arrays stay small.
  std::vector<ClusterId> dense(labels.size(), 0);
  std::unordered_map<ClusterId, ClusterId> ids;
  CandidatePrior out;
  for (std::size_t m = 0; m < labels.size(); ++m) {
    if (m == d) continue;
    auto [it, inserted] = ids.emplace(labels[m], static_cast<ClusterId>(ids.size()));
    if (inserted) out.clusters.push_back(labels[m]);
    dense[m] = it->second;
  }
  UpScratch scratch;
  const auto log_kt = log_k_theta_table(labels.size(), theta);
  const double new_score = up_scores(d, dense, std::log(theta), log_kt, ids.size(), scratch);
  for (std::size_t i = 0; i < out.clusters.size(); ++i) out.log_probs.push_back(scratch.score[i]);
  out.log_probs.push_back(new_score);
  normalize_log(out.log_probs);
  return out;
}

double corpus_log_likelihood(const Corpus& corpus, std::span<const ClusterId> labels, const HyperParams& hypers) {
  if (labels.size() != corpus.size()) throw std::invalid_argument("corpus_log_likelihood: one label per document required");
  const std::size_t w_count = corpus.vocab_size();
  CountState counts(w_count);
  std::unordered_map<ClusterId, ClusterId> slot;
  std::vector<std::uint32_t> scratch(w_count, 0), occ;
  std::vector<double> p_corpus;

  double total = 0.0;
  for (std::size_t d = 0; d < labels.size(); ++d) {
    const auto& doc = corpus.documents[d];
    detail::prefix_occurrences(doc, occ, scratch);
    detail::corpus_level_probs(
        doc, occ, [&](WordId w) { return counts.corpus_word(w); }, counts.corpus_tokens(), w_count, hypers, p_corpus);
    auto it = slot.find(labels[d]);
    if (it == slot.end()) {
      total += detail::cluster_log_likelihood(doc, occ, p_corpus, [](WordId) { return 0U; }, 0, hypers);
      it = slot.emplace(labels[d], counts.open_cluster()).first;
    } else {
      const auto words = counts.cluster_words(it->second);
      total += detail::cluster_log_likelihood(
          doc, occ, p_corpus, [&](WordId w) { return words[w]; }, counts.cluster_tokens(it->second), hypers);
    }
    counts.add_document(doc, it->second);
  }
  return total;
}

Partition ChainState::assignments() const { return Partition::from_labels(labels); }

ChainState make_chain_state(const Corpus& corpus, const PriorSpec& prior, const HyperParams& hypers,
                            std::span<const Label> labels, RandomStream rng) {
  hypers.validate();
  const Partition p = Partition::from_labels(labels);
  ChainState state{prior, hypers, std::vector<ClusterId>(p.labels().begin(), p.labels().end()),
                   build_counts(corpus, p.labels()), 0, std::move(rng)};
  return state;
}

namespace {

void require_supported(const PriorSpec& prior) {
  if (prior.kind() == ProcessKind::PitmanYor) {
    throw std::invalid_argument("document clustering supports the Dirichlet and uniform processes only");
  }
}

// Canonical relabeling of slots in first-appearance order.
void canonicalize(ChainState& state) {
  std::vector<ClusterId> order;
  std::vector<ClusterId> remap(state.counts.slot_capacity(), kNoCluster);
  for (ClusterId& c : state.labels) {
    if (remap[c] == kNoCluster) {
      remap[c] = static_cast<ClusterId>(order.size());
      order.push_back(c);
    }
    c = remap[c];
  }
  state.counts.compact(order);
}

struct SweepBuffers {
  std::vector<std::uint32_t> scratch;
  std::vector<std::uint32_t> occ;
  std::vector<double> p_corpus;
  std::vector<ClusterId> candidates;
  std::vector<double> log_post;
  UpScratch up;
};

// Scores every active cluster and a new one for document d, whose counts
// must already be removed, and returns the chosen slot (opening one for a
// new cluster). With `sequential_init` the prior conditions on documents
// 0..d-1 only.
ClusterId draw_assignment(ChainState& state, std::span<const WordId> doc, std::size_t d, const Corpus& corpus,
                          bool sequential_init, std::span<const double> log_kt, SweepBuffers& buf) {
  const auto& counts = state.counts;
  const auto& h = state.hypers;
  const double theta = state.prior.theta();
  const double log_theta = std::log(theta);

  detail::prefix_occurrences(doc, buf.occ, buf.scratch);
  detail::corpus_level_probs(
      doc, buf.occ, [&](WordId w) { return counts.corpus_word(w); }, counts.corpus_tokens(), counts.vocab_size(), h,
      buf.p_corpus);

  buf.candidates = counts.active_clusters();
  const std::size_t k_count = buf.candidates.size();
  buf.log_post.assign(k_count + 1, 0.0);

  // Prior terms.
  if (state.prior.kind() == ProcessKind::Dirichlet) {
    const double others = sequential_init ? static_cast<double>(d) : static_cast<double>(corpus.size() - 1);
    const double z = std::log(others + theta);
    for (std::size_t i = 0; i < k_count; ++i) {
      buf.log_post[i] = std::log(static_cast<double>(counts.cluster_docs(buf.candidates[i]))) - z;
    }
    buf.log_post[k_count] = log_theta - z;
  } else if (sequential_init) {
    const double z = log_kt[k_count];
    for (std::size_t i = 0; i < k_count; ++i) buf.log_post[i] = -z;
    buf.log_post[k_count] = log_theta - z;
  } else {
    const double new_score = up_scores(d, state.labels, log_theta, log_kt, counts.slot_capacity(), buf.up);
    for (std::size_t i = 0; i < k_count; ++i) buf.log_post[i] = buf.up.score[buf.candidates[i]];
    buf.log_post[k_count] = new_score;
  }

  // Likelihood terms.
  for (std::size_t i = 0; i < k_count; ++i) {
    const ClusterId c = buf.candidates[i];
    const auto words = counts.cluster_words(c);
    buf.log_post[i] += detail::cluster_log_likelihood(
        doc, buf.occ, buf.p_corpus, [&](WordId w) { return words[w]; }, counts.cluster_tokens(c), h);
  }
  buf.log_post[k_count] +=
      detail::cluster_log_likelihood(doc, buf.occ, buf.p_corpus, [](WordId) { return 0U; }, 0, h);

  const std::size_t pick = sample_log_categorical(buf.log_post, state.rng);
  return pick < k_count ? buf.candidates[pick] : state.counts.open_cluster();
}

}  // namespace

ChainState initialize_chain(const Corpus& corpus, const PriorSpec& prior, const HyperParams& hypers,
                            RandomStream rng) {
  require_supported(prior);
  hypers.validate();
  ChainState state{prior, hypers, std::vector<ClusterId>(corpus.size(), kNoCluster), CountState(corpus.vocab_size()),
                   0, std::move(rng)};
  SweepBuffers buf;
  buf.scratch.assign(corpus.vocab_size(), 0);
  const auto log_kt = log_k_theta_table(corpus.size(), prior.theta());
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const auto& doc = corpus.documents[d];
    const ClusterId c = draw_assignment(state, doc, d, corpus, true, log_kt, buf);
    state.counts.add_document(doc, c);
    state.labels[d] = c;
  }
  canonicalize(state);
  return state;
}

void gibbs_sweep(ChainState& state, const Corpus& corpus) {
  require_supported(state.prior);
  if (state.labels.size() != corpus.size()) throw std::invalid_argument("gibbs_sweep: state does not match corpus");
  SweepBuffers buf;
  buf.scratch.assign(corpus.vocab_size(), 0);
  const auto log_kt = log_k_theta_table(corpus.size(), state.prior.theta());

  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const auto& doc = corpus.documents[d];
    state.counts.remove_document(doc, state.labels[d]);
    state.labels[d] = kNoCluster;
    // up_scores skips position d, so the sentinel is never indexed.
    const ClusterId c = draw_assignment(state, doc, d, corpus, false, log_kt, buf);
    state.counts.add_document(doc, c);
    state.labels[d] = c;
  }
  canonicalize(state);
  ++state.iteration;
#ifndef NDEBUG
  if (!counts_consistent(state, corpus)) throw std::logic_error("gibbs_sweep: count state diverged from assignments");
#endif
}

bool counts_consistent(const ChainState& state, const Corpus& corpus) {
  const Partition p = state.assignments();
  if (!std::equal(p.labels().begin(), p.labels().end(), state.labels.begin(), state.labels.end())) return false;
  return build_counts(corpus, p.labels()) == state.counts;
}

void slice_sample_hypers(ChainState& state, const Corpus& corpus, const SliceConfig& config) {
  for (double HyperParams::*field : {&HyperParams::beta, &HyperParams::beta1, &HyperParams::beta0}) {
    HyperParams trial = state.hypers;
    auto log_density = [&](double log_value) {
      if (log_value < config.log_lower || log_value > config.log_upper) return -std::numeric_limits<double>::infinity();
      trial.*field = std::exp(log_value);
      return corpus_log_likelihood(corpus, state.labels, trial);
    };
    const SliceResult r = slice_sample(log_density, std::log(state.hypers.*field), config, state.rng);
    if (!r.accepted) {
      std::fprintf(stderr, "warning: slice sampler failed to shrink; keeping %g\n", state.hypers.*field);
    }
    state.hypers.*field = std::exp(r.x);
  }
}

ChainRun run_chain(const Corpus& corpus, const PriorSpec& prior, const ChainConfig& config) {
  if (config.sweeps <= config.burn_in) throw std::invalid_argument("run_chain: sweeps must exceed burn_in");
  if (config.thin == 0) throw std::invalid_argument("run_chain: thin must be at least 1");
  ChainRun run{{}, initialize_chain(corpus, prior, config.initial_hypers, RandomStream(config.seed))};
  ChainState& state = run.final_state;
  for (std::uint64_t s = 1; s <= config.sweeps; ++s) {
    gibbs_sweep(state, corpus);
    if (config.hyper_interval > 0 && s % config.hyper_interval == 0) slice_sample_hypers(state, corpus, config.slice);
    if (s > config.burn_in && (s - config.burn_in) % config.thin == 0) {
      run.samples.push_back({state.assignments(), state.hypers, state.iteration});
    }
  }
  return run;
}

double pairwise_agreement(std::span<const Label> a, std::span<const Label> b) {
  if (a.size() != b.size()) throw std::invalid_argument("pairwise_agreement: size mismatch");
  if (a.size() < 2) return 1.0;
  std::uint64_t agree = 0, total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      agree += (a[i] == a[j]) == (b[i] == b[j]);
      ++total;
    }
  }
  return static_cast<double>(agree) / static_cast<double>(total);
}

}  // namespace bnp
