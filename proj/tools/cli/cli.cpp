#include "cli.hpp"

#include <algorithm>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bnp/corpus.hpp"
#include "bnp/checkpoint.hpp"
#include "commands.hpp"
#include "io.hpp"

namespace bnp::cli {

namespace {

void add_common(CLI::App* app, Common& c, bool writes) {
  app->add_option("--seed", c.seed, "Master seed")->envname("BNP_SEED");
  app->add_option("--config", "JSON file of flag values; flags on the command line win");
  if (!writes) return;
  app->add_option("--out", c.out, "Output directory")->required();
  app->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app->add_flag("--force", c.force, "Overwrite an existing run");
}

void add_chain(CLI::App* app, ChainFlags& f) {
  app->add_option("--sweeps", f.sweeps, "Gibbs sweeps per chain");
  app->add_option("--burn-in", f.burn_in, "Sweeps discarded before recording");
  app->add_option("--thin", f.thin, "Record every this many sweeps");
  app->add_option("--hyper-interval", f.hyper_interval, "Slice-sample beta every this many sweeps (0 = fixed)");
  app->add_option("--beta", f.beta, "Initial document-level concentration");
  app->add_option("--beta1", f.beta1, "Initial cluster-level concentration");
  app->add_option("--beta0", f.beta0, "Initial corpus-level concentration");
}

/// Flag tokens for the values in a flat JSON config object.
std::vector<std::string> config_tokens(const nlohmann::json& j) {
  if (!j.is_object()) throw UsageError("--config: expected a JSON object");
  std::vector<std::string> out;
  for (const auto& [key, value] : j.items()) {
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
      continue;
    }
    std::string text;
    auto scalar = [](const nlohmann::json& v) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
      if (v.is_number_float()) return num(v.get<double>());
      throw UsageError("--config: unsupported value " + v.dump());
    };
    if (value.is_array()) {
      for (std::size_t i = 0; i < value.size(); ++i) text += (i ? "," : "") + scalar(value[i]);
    } else {
      text = scalar(value);
    }
    out.push_back(flag);
    out.push_back(text);
  }
  return out;
}

/// Splices the tokens of `--config FILE` in right after the subcommand name,
/// so that later command-line flags override them.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (path.empty() || out.empty()) return out;
  const auto tokens = config_tokens(read_json(path));
  out.insert(out.begin() + 1, tokens.begin(), tokens.end());
  return out;
}

nlohmann::json echo(const CLI::App* app) {
  nlohmann::json j = nlohmann::json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help" || name == "config" || name == "force" || name == "out") continue;
    const auto& res = opt->results();
    if (!res.empty()) {
      j[name] = res.back();
    } else if (opt->get_expected_min() == 0) {
      j[name] = false;
    } else {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonparametric Bayesian clustering experiments", "bnpclust"};
  app.set_version_flag("--version", BNP_VERSION);
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();

  Common common;
  SimulateFlags sim;
  StatsFlags stats;
  ExchangeabilityFlags exch;
  ClusterFlags clus;
  EvaluateFlags eval;
  HeldoutFlags held;
  SynthFlags syn;

  auto* s = app.add_subcommand("simulate", "Sample prior partitions; emit cluster-growth and cluster-size tables");
  add_common(s, common, true);
  s->add_option("--process", sim.processes, "Comma list of dp, py, up");
  s->add_option("--theta", sim.theta, "Comma list of concentrations");
  s->add_option("--alpha", sim.alpha, "Comma list of Pitman-Yor discounts");
  s->add_option("--n", sim.n, "Comma list of sample sizes");
  s->add_option("--replicates", sim.replicates, "Partitions per (process, n)");
  s->add_option("--max-m", sim.max_m, "Largest cluster size written to cluster_sizes.csv (0 = all)");

  auto* st = app.add_subcommand("stats", "Print a closed-form expectation");
  add_common(st, common, false);
  st->add_option("--process", stats.process, "dp, py or up")->required();
  st->add_option("--theta", stats.theta, "Concentration");
  st->add_option("--alpha", stats.alpha, "Pitman-Yor discount");
  st->add_option("--n", stats.n, "Sample size");
  st->add_option("--m", stats.m, "Cluster size; prints the expected number of clusters of this size");
  st->add_option("--quantity", stats.quantity, "k, k-exact, k-asymptotic or h");

  auto* ex = app.add_subcommand("exchangeability", "Between-ordering versus between-partition SD of log P(c)");
  add_common(ex, common, true);
  ex->add_option("--corpus", exch.corpus, "Corpus text file or JSON snapshot")->required();
  ex->add_option("--prior", exch.prior, "dp or up");
  ex->add_option("--theta", exch.theta, "Comma list of concentrations");
  ex->add_option("--chains", exch.chains, "Gibbs chains per theta");
  ex->add_option("--orderings", exch.orderings, "Random orderings per partition");
  add_chain(ex, exch.chain);

  auto* cl = app.add_subcommand("cluster", "Run Gibbs chains and write checkpoints");
  add_common(cl, common, true);
  cl->add_option("--corpus", clus.corpus, "Corpus text file or JSON snapshot")->required();
  cl->add_option("--prior", clus.prior, "dp or up");
  cl->add_option("--theta", clus.theta, "Concentration");
  cl->add_option("--chains", clus.chains, "Independent chains");
  add_chain(cl, clus.chain);

  auto* ev = app.add_subcommand("evaluate", "Held-out log-probability of trained chains");
  add_common(ev, common, true);
  ev->add_option("--trained", eval.trained, "Output directory of a cluster run")->required();
  ev->add_option("--test", eval.test, "Held-out documents (text or JSON snapshot)")->required();
  ev->add_option("--particles", eval.particles, "Particles per run");
  ev->add_option("--permutations", eval.permutations, "Random orderings of the test documents");

  auto* ho = app.add_subcommand("heldout", "Split a corpus, train both priors over a theta grid, evaluate held-out data");
  add_common(ho, common, true);
  ho->add_option("--corpus", held.corpus, "Corpus text file or JSON snapshot")->required();
  ho->add_option("--train-fraction", held.train_fraction, "Share of documents used for training");
  ho->add_option("--priors", held.priors, "Comma list of dp, up");
  ho->add_option("--theta", held.theta, "Comma list of concentrations");
  ho->add_option("--chains", held.chains, "Chains per (prior, theta)");
  ho->add_option("--particles", held.particles, "Particles per run");
  ho->add_option("--permutations", held.permutations, "Random orderings of the test documents");
  add_chain(ho, held.chain);

  auto* sy = app.add_subcommand("synth", "Generate a synthetic clustered corpus");
  add_common(sy, common, true);
  sy->add_option("--clusters", syn.clusters, "Number of clusters");
  sy->add_option("--docs-per-cluster", syn.docs_per_cluster, "Documents per cluster");
  sy->add_option("--vocab-per-cluster", syn.vocab_per_cluster, "Words owned by each cluster");
  sy->add_option("--doc-length", syn.doc_length, "Tokens per document");
  sy->add_option("--overlap", syn.overlap, "Share of each cluster's mass spread over all words");

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << BNP_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    for (auto* sub : app.get_subcommands()) common.config = echo(sub);
    if (s->parsed()) cmd_simulate(sim, common);
    else if (st->parsed()) cmd_stats(stats, out);
    else if (ex->parsed()) cmd_exchangeability(exch, common);
    else if (cl->parsed()) cmd_cluster(clus, common);
    else if (ev->parsed()) cmd_evaluate(eval, common);
    else if (ho->parsed()) cmd_heldout(held, common);
    else if (sy->parsed()) cmd_synth(syn, common);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace bnp::cli
