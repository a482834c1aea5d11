#include "bnp/evaluation.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "bnp/log_math.hpp"
#include "bnp/parallel.hpp"
#include "likelihood_detail.hpp"

namespace bnp {

namespace {

void check_test_vocab(std::span<const Document> test, const ChainState& trained) {
  const std::size_t w_count = trained.counts.vocab_size();
  for (const auto& doc : test) {
    for (WordId w : doc) {
      if (w >= w_count) throw std::out_of_range("held-out document uses a word outside the training vocabulary");
    }
  }
  if (trained.counts.num_clusters() != trained.counts.slot_capacity()) {
    throw std::invalid_argument("held-out evaluation expects a canonical (compacted) trained state");
  }
  if (trained.prior.kind() == ProcessKind::PitmanYor) {
    throw std::invalid_argument("held-out evaluation supports the Dirichlet and uniform processes only");
  }
}

// Log prior of joining each of `k_count` clusters with the given document
// counts, or a new one, after `placed` documents.
void prior_terms(const PriorSpec& prior, std::size_t placed, std::span<const std::uint64_t> docs_per_cluster,
                 std::vector<double>& out) {
  const std::size_t k_count = docs_per_cluster.size();
  const double theta = prior.theta();
  out.resize(k_count + 1);
  if (prior.kind() == ProcessKind::Dirichlet) {
    const double z = std::log(static_cast<double>(placed) + theta);
    for (std::size_t c = 0; c < k_count; ++c) out[c] = std::log(static_cast<double>(docs_per_cluster[c])) - z;
    out[k_count] = std::log(theta) - z;
  } else {
    const double z = std::log(static_cast<double>(k_count) + theta);
    for (std::size_t c = 0; c < k_count; ++c) out[c] = -z;
    out[k_count] = std::log(theta) - z;
  }
}

struct Particle {
  std::vector<std::uint64_t> docs;    // per cluster: training docs + test docs in this particle
  std::vector<std::uint64_t> tokens;  // per cluster: test tokens only
  std::unordered_map<std::uint64_t, std::uint32_t> words;  // (cluster << 32 | word) -> test count
  double log_weight = 0.0;

  [[nodiscard]] std::uint32_t extra(std::size_t c, WordId w) const {
    const auto it = words.find((static_cast<std::uint64_t>(c) << 32) | w);
    return it == words.end() ? 0 : it->second;
  }
};

}  // namespace

double left_to_right_log_prob_ordered(std::span<const Document> test, const ChainState& trained,
                                      std::size_t particles, RandomStream& rng) {
  if (test.empty()) return 0.0;
  if (particles == 0) throw std::invalid_argument("left_to_right: need at least one particle");
  check_test_vocab(test, trained);

  const CountState& train = trained.counts;
  const HyperParams& h = trained.hypers;
  const std::size_t w_count = train.vocab_size();
  const std::size_t k_train = train.num_clusters();
  const std::size_t n_train = trained.labels.size();

  Particle seed;
  for (ClusterId c = 0; c < k_train; ++c) {
    seed.docs.push_back(train.cluster_docs(c));
    seed.tokens.push_back(0);
  }
  std::vector<Particle> pool(particles, seed);

  // Corpus-level counts do not depend on assignments, so all particles share them.
  std::vector<std::uint64_t> test_corpus(w_count, 0);
  std::uint64_t test_corpus_tokens = 0;

  std::vector<std::uint32_t> scratch(w_count, 0), occ;
  std::vector<double> p_corpus, terms;

  for (std::size_t t = 0; t < test.size(); ++t) {
    const auto& doc = test[t];
    detail::prefix_occurrences(doc, occ, scratch);
    detail::corpus_level_probs(
        doc, occ, [&](WordId w) { return train.corpus_word(w) + test_corpus[w]; },
        train.corpus_tokens() + test_corpus_tokens, w_count, h, p_corpus);

    for (auto& particle : pool) {
      const std::size_t k_count = particle.docs.size();
      prior_terms(trained.prior, n_train + t, particle.docs, terms);
      for (std::size_t c = 0; c < k_count; ++c) {
        const bool trained_cluster = c < k_train;
        const auto base = trained_cluster ? train.cluster_words(static_cast<ClusterId>(c)) : std::span<const std::uint32_t>{};
        const std::uint64_t total = (trained_cluster ? train.cluster_tokens(static_cast<ClusterId>(c)) : 0) + particle.tokens[c];
        terms[c] += detail::cluster_log_likelihood(
            doc, occ, p_corpus,
            [&](WordId w) { return (trained_cluster ? base[w] : 0U) + particle.extra(c, w); }, total, h);
      }
      terms[k_count] += detail::cluster_log_likelihood(doc, occ, p_corpus, [](WordId) { return 0U; }, 0, h);

      particle.log_weight += log_sum_exp(terms);
      const std::size_t c = sample_log_categorical(terms, rng);
      if (c == k_count) {
        particle.docs.push_back(0);
        particle.tokens.push_back(0);
      }
      ++particle.docs[c];
      particle.tokens[c] += doc.size();
      for (WordId w : doc) ++particle.words[(static_cast<std::uint64_t>(c) << 32) | w];
    }

    for (WordId w : doc) ++test_corpus[w];
    test_corpus_tokens += doc.size();
  }

  std::vector<double> weights;
  weights.reserve(pool.size());
  for (const auto& p : pool) weights.push_back(p.log_weight);
  return log_mean_exp(weights);
}

HeldoutEstimate left_to_right_log_prob(std::span<const Document> test, const ChainState& trained,
                                       const EvalConfig& config, unsigned jobs) {
  if (config.test_permutations == 0) throw std::invalid_argument("left_to_right: test_permutations must be >= 1");
  HeldoutEstimate est;
  est.per_run.assign(config.test_permutations, 0.0);
  const RandomStream master(config.seed);
  parallel_for(config.test_permutations, jobs, [&](std::size_t r) {
    RandomStream rng = master.child(r);
    if (!config.permute_test) {
      est.per_run[r] = left_to_right_log_prob_ordered(test, trained, config.particles, rng);
      return;
    }
    const auto perm = random_permutation(test.size(), rng);
    std::vector<Document> ordered;
    ordered.reserve(test.size());
    for (std::size_t i : perm) ordered.push_back(test[i]);
    est.per_run[r] = left_to_right_log_prob_ordered(ordered, trained, config.particles, rng);
  });
  est.mean = sample_mean(est.per_run);
  est.sd = sample_sd(est.per_run);
  return est;
}

namespace {

double exact_recurse(std::span<const Document> test, std::size_t t, const CountState& counts, const PriorSpec& prior,
                     std::size_t placed, const HyperParams& h) {
  if (t == test.size()) return 0.0;
  const auto& doc = test[t];
  const auto clusters = counts.active_clusters();
  std::vector<std::uint64_t> docs;
  for (ClusterId c : clusters) docs.push_back(counts.cluster_docs(c));
  std::vector<double> terms;
  prior_terms(prior, placed, docs, terms);

  for (std::size_t i = 0; i <= clusters.size(); ++i) {
    const std::optional<ClusterId> target = i < clusters.size() ? std::optional(clusters[i]) : std::nullopt;
    terms[i] += doc_log_likelihood(doc, counts, target, h);
    CountState next = counts;
    next.add_document(doc, target ? *target : next.open_cluster());
    terms[i] += exact_recurse(test, t + 1, next, prior, placed + 1, h);
  }
  return log_sum_exp(terms);
}

}  // namespace

double exact_heldout_log_prob(std::span<const Document> test, const ChainState& trained) {
  if (test.size() > kExactHeldoutLimit) {
    throw std::invalid_argument("exact_heldout_log_prob: enumeration is limited to six test documents");
  }
  if (test.empty()) return 0.0;
  check_test_vocab(test, trained);
  return exact_recurse(test, 0, trained.counts, trained.prior, trained.labels.size(), trained.hypers);
}

HeldoutReport compare_priors_heldout(const Corpus& train, const Corpus& test, std::span<const ProcessKind> priors,
                                     std::span<const double> theta_grid, std::size_t chains,
                                     const ChainConfig& chain_config, const EvalConfig& eval_config,
                                     std::uint64_t master_seed, unsigned jobs) {
  if (train.vocab_size() != test.vocab_size()) {
    throw std::invalid_argument("compare_priors_heldout: train and test must share a vocabulary");
  }
  if (chains == 0 || theta_grid.empty() || priors.empty()) {
    throw std::invalid_argument("compare_priors_heldout: need at least one prior, theta and chain");
  }

  struct Job {
    std::size_t cell, chain;
    RandomStream stream;
  };
  const RandomStream master(master_seed);
  HeldoutReport report{{}, chain_config, eval_config, chains, master_seed};
  std::vector<Job> work;
  for (std::size_t p = 0; p < priors.size(); ++p) {
    for (std::size_t i = 0; i < theta_grid.size(); ++i) {
      const std::size_t cell = report.cells.size();
      report.cells.push_back({priors[p], theta_grid[i], std::vector<double>(chains), 0.0, 0.0,
                              std::vector<double>(chains), 0.0, 0.0});
      for (std::size_t c = 0; c < chains; ++c) work.push_back({cell, c, master.child(p).child(i).child(c)});
    }
  }

  std::vector<std::vector<double>> runs(work.size());
  parallel_for(work.size(), jobs, [&](std::size_t j) {
    const Job& job = work[j];
    HeldoutCell& cell = report.cells[job.cell];
    ChainConfig config = chain_config;
    config.seed = job.stream.seed();
    const ChainRun run = run_chain(train, PriorSpec(cell.prior, cell.theta), config);
    EvalConfig eval = eval_config;
    eval.seed = job.stream.child(1).seed();
    const HeldoutEstimate est = left_to_right_log_prob(test.documents, run.final_state, eval);
    cell.chain_logprob[job.chain] = est.mean;
    cell.chain_clusters[job.chain] = static_cast<double>(run.final_state.counts.num_clusters());
    runs[j] = est.per_run;
  });

  for (std::size_t cell_index = 0; cell_index < report.cells.size(); ++cell_index) {
    HeldoutCell& cell = report.cells[cell_index];
    std::vector<double> all;
    for (std::size_t j = 0; j < work.size(); ++j) {
      if (work[j].cell == cell_index) all.insert(all.end(), runs[j].begin(), runs[j].end());
    }
    cell.logprob_mean = sample_mean(all);
    cell.logprob_sd = sample_sd(all);
    cell.mean_num_clusters = sample_mean(cell.chain_clusters);
    cell.num_clusters_sd = sample_sd(cell.chain_clusters);
  }
  return report;
}

nlohmann::json to_json(const HeldoutReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"prior", std::string(short_name(c.prior))},
                     {"theta", c.theta},
                     {"heldout_logprob_mean", c.logprob_mean},
                     {"heldout_logprob_sd", c.logprob_sd},
                     {"chain_heldout_logprob", c.chain_logprob},
                     {"mean_num_clusters", c.mean_num_clusters},
                     {"num_clusters_sd", c.num_clusters_sd},
                     {"chain_num_clusters", c.chain_clusters}});
  }
  const auto& cc = report.chain_config;
  const auto& ec = report.eval_config;
  return {{"results", cells},
          {"config",
           {{"chains", report.chains},
            {"master_seed", report.master_seed},
            {"sweeps", cc.sweeps},
            {"burn_in", cc.burn_in},
            {"hyper_interval", cc.hyper_interval},
            {"particles", ec.particles},
            {"test_permutations", ec.test_permutations},
            {"permute_test", ec.permute_test}}}};
}

}  // namespace bnp
