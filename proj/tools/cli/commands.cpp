#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>

#include <fmt/format.h>

#include "bnp/checkpoint.hpp"
#include "bnp/corpus.hpp"
#include "bnp/doc_model.hpp"
#include "bnp/evaluation.hpp"
#include "bnp/exchangeability.hpp"
#include "bnp/log_math.hpp"
#include "bnp/parallel.hpp"
#include "bnp/partition_stats.hpp"
#include "io.hpp"

namespace bnp::cli {

namespace fs = std::filesystem;

namespace {

ProcessKind process_flag(const std::string& name, const std::string& flag) {
  try {
    return parse_process_kind(name);
  } catch (const std::invalid_argument&) {
    throw UsageError(fmt::format("{}: unknown process '{}' (expected dp, py or up)", flag, name));
  }
}

ProcessKind clustering_prior(const std::string& name, const std::string& flag) {
  const auto kind = process_flag(name, flag);
  if (kind == ProcessKind::PitmanYor) throw UsageError(flag + ": document clustering supports dp and up only");
  return kind;
}

void require_positive(double x, const std::string& flag) {
  if (!(x > 0.0) || !std::isfinite(x)) throw UsageError(flag + " must be positive");
}

std::vector<double> positive_reals(const std::string& text, const std::string& flag) {
  auto v = parse_real_list(text, flag);
  for (double x : v) require_positive(x, flag);
  return v;
}

ChainConfig chain_config(const ChainFlags& f) {
  if (f.sweeps == 0) throw UsageError("--sweeps must be at least 1");
  if (f.burn_in >= f.sweeps) throw UsageError("--burn-in must be smaller than --sweeps");
  if (f.thin == 0) throw UsageError("--thin must be at least 1");
  ChainConfig c;
  c.sweeps = f.sweeps;
  c.burn_in = f.burn_in;
  c.thin = f.thin;
  c.hyper_interval = f.hyper_interval;
  c.initial_hypers = {f.beta, f.beta1, f.beta0};
  try {
    c.initial_hypers.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return c;
}

Corpus read_corpus(const std::string& path, RunRecorder& rec) {
  if (path.empty()) throw UsageError("--corpus is required");
  Corpus corpus = load_corpus_any(path);
  rec.add_input(path);
  return corpus;
}

std::string prior_cell(const PriorSpec& s) {
  return fmt::format("{},{},{}", short_name(s.kind()), num(s.theta()), num(s.alpha()));
}

}  // namespace

void cmd_simulate(const SimulateFlags& f, const Common& c) {
  const auto processes = parse_word_list(f.processes);
  if (processes.empty()) throw UsageError("--process: expected at least one process");
  const auto thetas = positive_reals(f.theta, "--theta");
  const auto alphas = parse_real_list(f.alpha, "--alpha");
  const auto grid = parse_count_list(f.n, "--n");
  if (f.replicates == 0) throw UsageError("--replicates must be at least 1");

  std::vector<PriorSpec> specs;
  for (const auto& p : processes) {
    const auto kind = process_flag(p, "--process");
    for (double theta : thetas) {
      if (kind != ProcessKind::PitmanYor) {
        specs.emplace_back(kind, theta);
        continue;
      }
      for (double alpha : alphas) {
        if (!(alpha >= 0.0 && alpha < 1.0)) throw UsageError("--alpha values must lie in [0, 1)");
        specs.push_back(PriorSpec::pitman_yor(theta, alpha));
      }
    }
  }

  RunRecorder rec("simulate", c.out, c.force);
  rec.set_seed(c.seed);
  rec.set_config(c.config);
  const auto summaries = run_simulation(specs, grid, f.replicates, c.seed, c.jobs);

  std::string growth = "process,theta,alpha,n,replicates,mean_k,se_k\n";
  std::string sizes = "process,theta,alpha,n,M,mean_h\n";
  for (const auto& s : summaries) {
    growth += fmt::format("{},{},{},{},{}\n", prior_cell(s.spec), s.n, s.replicates, num(s.mean_k), num(s.se_k));
    for (const auto& [m, h] : s.mean_h) {
      if (f.max_m != 0 && m > f.max_m) break;
      sizes += fmt::format("{},{},{},{}\n", prior_cell(s.spec), s.n, m, num(h));
    }
  }
  std::string slopes = "process,theta,alpha,slope\n";
  if (grid.size() >= 2) {
    for (std::size_t i = 0; i < summaries.size(); i += grid.size()) {
      const std::span<const SimulationSummary> block(summaries.data() + i, grid.size());
      slopes += fmt::format("{},{}\n", prior_cell(block[0].spec), num(fit_growth_exponent(block)));
    }
  }
  write_text(rec.output("k_growth.csv"), growth);
  write_text(rec.output("cluster_sizes.csv"), sizes);
  write_text(rec.output("k_exponents.csv"), slopes);
  rec.write();
}

void cmd_stats(const StatsFlags& f, std::ostream& out) {
  if (f.process.empty()) throw UsageError("--process is required");
  const auto kind = process_flag(f.process, "--process");
  require_positive(f.theta, "--theta");
  if (f.n == 0) throw UsageError("--n must be at least 1");
  const bool py = kind == ProcessKind::PitmanYor;
  if (py && !(f.alpha > 0.0 && f.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1) for py");

  std::string quantity = f.quantity;
  if (f.m != 0) quantity = "h";
  double value = 0.0;
  if (quantity == "k") {
    value = kind == ProcessKind::Dirichlet ? expected_k_dp(f.theta, f.n)
            : py                           ? expected_k_py(f.theta, f.alpha, f.n)
                                           : expected_k_up(f.theta, f.n);
  } else if (quantity == "k-exact") {
    value = kind == ProcessKind::Dirichlet ? expected_k_dp(f.theta, f.n)
            : py                           ? exact_expected_k_py(f.theta, f.alpha, f.n)
                                           : exact_expected_k_up(f.theta, f.n);
  } else if (quantity == "k-asymptotic") {
    value = kind == ProcessKind::Dirichlet ? asymptotic_k_dp(f.theta, f.n)
            : py                           ? expected_k_py(f.theta, f.alpha, f.n)
                                           : expected_k_up(f.theta, f.n);
  } else if (quantity == "h") {
    if (f.m == 0) throw UsageError("--m is required for cluster-size expectations");
    const auto m = static_cast<std::uint32_t>(f.m);
    value = kind == ProcessKind::Dirichlet ? expected_h_dp(f.theta, m)
            : py                           ? expected_h_py(f.theta, f.alpha, m, f.n)
                                           : expected_h_up(f.theta);
  } else {
    throw UsageError("--quantity must be one of k, k-exact, k-asymptotic, h");
  }
  out << num(value) << '\n';
}

void cmd_exchangeability(const ExchangeabilityFlags& f, const Common& c) {
  const auto kind = clustering_prior(f.prior, "--prior");
  const auto thetas = positive_reals(f.theta, "--theta");
  if (f.chains < 2) throw UsageError("--chains must be at least 2");
  if (f.orderings < 2) throw UsageError("--orderings must be at least 2");
  const ChainConfig cc = chain_config(f.chain);

  RunRecorder rec("exchangeability", c.out, c.force);
  rec.set_seed(c.seed);
  rec.set_config(c.config);
  const Corpus corpus = read_corpus(f.corpus, rec);

  std::string ordering = "theta,partition_id,between_ordering_sd\n";
  std::string partition = "theta,between_partition_sd\n";
  nlohmann::json partitions = nlohmann::json::array();
  const RandomStream master(c.seed);
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const auto study = run_ordering_study(PriorSpec(kind, thetas[i]), corpus, f.chains, f.orderings, cc,
                                          master.child(i).seed(), c.jobs);
    for (std::size_t p = 0; p < study.per_partition_ordering_sd.size(); ++p) {
      ordering += fmt::format("{},{},{}\n", num(thetas[i]), p, num(study.per_partition_ordering_sd[p]));
    }
    partition += fmt::format("{},{}\n", num(thetas[i]), num(study.between_partition_sd));
    nlohmann::json parts = nlohmann::json::array();
    for (const auto& p : study.partitions) parts.push_back(std::vector<Label>(p.labels().begin(), p.labels().end()));
    partitions.push_back({{"theta", thetas[i]},
                          {"mean_between_ordering_sd", study.mean_ordering_sd},
                          {"between_partition_sd", study.between_partition_sd},
                          {"partitions", parts}});
  }
  write_text(rec.output("ordering_sd.csv"), ordering);
  write_text(rec.output("partition_sd.csv"), partition);
  write_json(rec.output("partitions.json"), partitions);
  rec.write();
}

void cmd_cluster(const ClusterFlags& f, const Common& c) {
  const auto kind = clustering_prior(f.prior, "--prior");
  require_positive(f.theta, "--theta");
  if (f.chains == 0) throw UsageError("--chains must be at least 1");
  const ChainConfig base = chain_config(f.chain);

  RunRecorder rec("cluster", c.out, c.force);
  rec.set_seed(c.seed);
  rec.set_config(c.config);
  const Corpus corpus = read_corpus(f.corpus, rec);
  const PriorSpec prior(kind, f.theta);

  const RandomStream master(c.seed);
  std::vector<std::optional<ChainRun>> runs(f.chains);
  parallel_for(f.chains, c.jobs, [&](std::size_t i) {
    ChainConfig cc = base;
    cc.seed = master.child(i).seed();
    runs[i].emplace(run_chain(corpus, prior, cc));
  });

  nlohmann::json chains = nlohmann::json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const ChainRun& run = *runs[i];
    save_checkpoint(run.final_state, corpus, rec.output(fmt::format("chain_{}.json", i)));
    std::vector<double> k;
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& s : run.samples) {
      k.push_back(static_cast<double>(s.assignments.num_clusters()));
      samples.push_back({{"iteration", s.iteration},
                         {"num_clusters", s.assignments.num_clusters()},
                         {"beta", s.hypers.beta},
                         {"beta1", s.hypers.beta1},
                         {"beta0", s.hypers.beta0}});
    }
    const auto& fs_ = run.final_state;
    chains.push_back({{"chain", i},
                      {"seed", master.child(i).seed()},
                      {"checkpoint", fmt::format("chain_{}.json", i)},
                      {"final_num_clusters", fs_.counts.num_clusters()},
                      {"final_hypers", {{"beta", fs_.hypers.beta}, {"beta1", fs_.hypers.beta1}, {"beta0", fs_.hypers.beta0}}},
                      {"mean_num_clusters", sample_mean(k)},
                      {"num_clusters_sd", sample_sd(k)},
                      {"samples", samples}});
  }
  save_corpus_json(corpus, rec.output("corpus.json"));
  write_json(rec.output("summary.json"), {{"prior", std::string(short_name(kind))},
                                          {"theta", f.theta},
                                          {"corpus_sha256", corpus.content_sha256()},
                                          {"chains", chains}});
  rec.write();
}

void cmd_evaluate(const EvaluateFlags& f, const Common& c) {
  if (f.trained.empty()) throw UsageError("--trained is required");
  if (f.test.empty()) throw UsageError("--test is required");
  if (f.particles == 0) throw UsageError("--particles must be at least 1");
  if (f.permutations == 0) throw UsageError("--permutations must be at least 1");

  RunRecorder rec("evaluate", c.out, c.force);
  rec.set_seed(c.seed);
  rec.set_config(c.config);
  const fs::path dir(f.trained);
  const Corpus train = load_corpus_any(dir / "corpus.json");
  rec.add_input(dir / "corpus.json");
  const auto summary = read_json(dir / "summary.json");
  rec.add_input(dir / "summary.json");

  // Test words missing from the training vocabulary extend W.
  Vocabulary vocab = train.vocabulary;
  std::vector<Document> test;
  if (fs::path(f.test).extension() == ".json") {
    const Corpus snap = load_corpus_any(f.test);
    for (const auto& doc : snap.documents) {
      Document mapped;
      for (WordId w : doc) mapped.push_back(vocab.add(snap.vocabulary.word(w)));
      test.push_back(std::move(mapped));
    }
  } else {
    const Corpus probe = load_corpus(f.test);
    std::string text = to_text(probe);
    test = tokenize_with_vocabulary(text, vocab);
  }
  rec.add_input(f.test);
  const std::size_t oov = vocab.size() - train.vocab_size();

  const std::size_t n_chains = summary.at("chains").size();
  std::vector<ChainState> states;
  for (std::size_t i = 0; i < n_chains; ++i) {
    const auto path = dir / summary.at("chains")[i].at("checkpoint").get<std::string>();
    states.push_back(load_checkpoint(path, train));
    rec.add_input(path);
    states.back().counts.resize_vocab(vocab.size());
  }

  const RandomStream master(c.seed);
  std::vector<HeldoutEstimate> est(n_chains);
  parallel_for(n_chains, c.jobs, [&](std::size_t i) {
    EvalConfig ec;
    ec.particles = f.particles;
    ec.test_permutations = f.permutations;
    ec.seed = master.child(i).seed();
    est[i] = left_to_right_log_prob(test, states[i], ec);
  });

  nlohmann::json chains = nlohmann::json::array();
  std::vector<double> all, k;
  for (std::size_t i = 0; i < n_chains; ++i) {
    all.insert(all.end(), est[i].per_run.begin(), est[i].per_run.end());
    k.push_back(static_cast<double>(states[i].counts.num_clusters()));
    chains.push_back({{"chain", i},
                      {"heldout_logprob_mean", est[i].mean},
                      {"heldout_logprob_sd", est[i].sd},
                      {"per_run", est[i].per_run},
                      {"num_clusters", states[i].counts.num_clusters()}});
  }
  const std::string prior = states.empty() ? "" : std::string(short_name(states[0].prior.kind()));
  const double theta = states.empty() ? 0.0 : states[0].prior.theta();
  write_json(rec.output("evaluate.json"), {{"prior", prior},
                                           {"theta", theta},
                                           {"test_documents", test.size()},
                                           {"oov_words", oov},
                                           {"heldout_logprob_mean", sample_mean(all)},
                                           {"heldout_logprob_sd", sample_sd(all)},
                                           {"mean_num_clusters", sample_mean(k)},
                                           {"num_clusters_sd", sample_sd(k)},
                                           {"chains", chains},
                                           {"config",
                                            {{"particles", f.particles},
                                             {"test_permutations", f.permutations},
                                             {"seed", c.seed}}}});
  rec.write();
}

void cmd_heldout(const HeldoutFlags& f, const Common& c) {
  const auto names = parse_word_list(f.priors);
  if (names.empty()) throw UsageError("--priors: expected at least one prior");
  std::vector<ProcessKind> priors;
  for (const auto& n : names) priors.push_back(clustering_prior(n, "--priors"));
  const auto thetas = positive_reals(f.theta, "--theta");
  if (f.chains == 0) throw UsageError("--chains must be at least 1");
  if (f.particles == 0 || f.permutations == 0) throw UsageError("--particles and --permutations must be at least 1");
  if (!(f.train_fraction > 0.0 && f.train_fraction < 1.0)) throw UsageError("--train-fraction must lie in (0, 1)");
  const ChainConfig cc = chain_config(f.chain);

  RunRecorder rec("heldout", c.out, c.force);
  rec.set_seed(c.seed);
  rec.set_config(c.config);
  const Corpus corpus = read_corpus(f.corpus, rec);
  const RandomStream master(c.seed);
  const auto [train, test] = split_corpus(corpus, f.train_fraction, master.child(0).seed());
  EvalConfig ec;
  ec.particles = f.particles;
  ec.test_permutations = f.permutations;
  const auto report = compare_priors_heldout(train, test, priors, thetas, f.chains, cc, ec, master.child(1).seed(), c.jobs);

  std::string csv = "prior,theta,heldout_logprob_mean,heldout_logprob_sd,mean_num_clusters,num_clusters_sd\n";
  for (const auto& cell : report.cells) {
    csv += fmt::format("{},{},{},{},{},{}\n", short_name(cell.prior), num(cell.theta), num(cell.logprob_mean),
                       num(cell.logprob_sd), num(cell.mean_num_clusters), num(cell.num_clusters_sd));
  }
  auto j = to_json(report);
  j["config"]["train_documents"] = train.size();
  j["config"]["test_documents"] = test.size();
  write_json(rec.output("heldout.json"), j);
  write_text(rec.output("heldout.csv"), csv);
  rec.write();
}

void cmd_synth(const SynthFlags& f, const Common& c) {
  if (f.clusters == 0 || f.docs_per_cluster == 0 || f.vocab_per_cluster == 0 || f.doc_length == 0) {
    throw UsageError("synthetic corpus sizes must be positive");
  }
  if (!(f.overlap >= 0.0 && f.overlap < 1.0)) throw UsageError("--overlap must lie in [0, 1)");
  RunRecorder rec("synth", c.out, c.force);
  rec.set_seed(c.seed);
  rec.set_config(c.config);
  SynthConfig sc;
  sc.num_clusters = static_cast<std::uint32_t>(f.clusters);
  sc.docs_per_cluster = static_cast<std::uint32_t>(f.docs_per_cluster);
  sc.vocab_per_cluster = static_cast<std::uint32_t>(f.vocab_per_cluster);
  sc.doc_length = static_cast<std::uint32_t>(f.doc_length);
  sc.overlap = f.overlap;
  sc.seed = c.seed;
  const auto synth = synth_corpus(sc);
  save_corpus_json(synth.corpus, rec.output("synth.json"));
  write_text(rec.output("synth.txt"), to_text(synth.corpus));
  std::string truth = "document,cluster\n";
  for (std::size_t d = 0; d < synth.truth.size(); ++d) truth += fmt::format("{},{}\n", d, synth.truth[d]);
  write_text(rec.output("truth.csv"), truth);
  rec.write();
}

}  // namespace bnp::cli
