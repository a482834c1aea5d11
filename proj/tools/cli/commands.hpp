#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <json.hpp>

namespace bnp::cli {

struct Common {
  std::string out;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  bool force = false;
  /// Echo of every option value, for the manifest.
  nlohmann::json config;
};

struct ChainFlags {
  std::uint64_t sweeps = 1000;
  std::uint64_t burn_in = 0;
  std::uint64_t thin = 1;
  std::uint64_t hyper_interval = 1;
  double beta = 1.0, beta1 = 1.0, beta0 = 1.0;
};

struct SimulateFlags {
  std::string processes = "up,dp,py";
  std::string theta = "1,10,100";
  std::string alpha = "0.25,0.5,0.75";
  std::string n = "100,1000,10000";
  std::uint64_t replicates = 1000;
  std::uint64_t max_m = 0;
};

struct StatsFlags {
  std::string process;
  double theta = 1.0;
  double alpha = 0.5;
  std::uint64_t n = 1000;
  std::uint64_t m = 0;
  std::string quantity = "k";
};

struct ExchangeabilityFlags {
  std::string corpus;
  std::string prior = "up";
  std::string theta = "0.5,1,2,5,10,20";
  std::uint64_t chains = 5;
  std::uint64_t orderings = 500;
  ChainFlags chain{200, 0, 1, 1};
};

struct ClusterFlags {
  std::string corpus;
  std::string prior = "up";
  double theta = 1.0;
  std::uint64_t chains = 5;
  ChainFlags chain;
};

struct EvaluateFlags {
  std::string trained;
  std::string test;
  std::uint64_t particles = 100;
  std::uint64_t permutations = 20;
};

struct HeldoutFlags {
  std::string corpus;
  double train_fraction = 1000.0 / 1200.0;
  std::string priors = "dp,up";
  std::string theta = "1,10,100";
  std::uint64_t chains = 5;
  std::uint64_t particles = 100;
  std::uint64_t permutations = 20;
  ChainFlags chain{500, 100, 1, 1};
};

struct SynthFlags {
  std::uint64_t clusters = 10;
  std::uint64_t docs_per_cluster = 100;
  std::uint64_t vocab_per_cluster = 20;
  std::uint64_t doc_length = 50;
  double overlap = 0.0;
};

void cmd_simulate(const SimulateFlags& f, const Common& c);
void cmd_stats(const StatsFlags& f, std::ostream& out);
void cmd_exchangeability(const ExchangeabilityFlags& f, const Common& c);
void cmd_cluster(const ClusterFlags& f, const Common& c);
void cmd_evaluate(const EvaluateFlags& f, const Common& c);
void cmd_heldout(const HeldoutFlags& f, const Common& c);
void cmd_synth(const SynthFlags& f, const Common& c);

}  // namespace bnp::cli
