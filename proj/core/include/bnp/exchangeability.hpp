#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bnp/corpus.hpp"
#include "bnp/doc_model.hpp"
#include "bnp/prior_process.hpp"

namespace bnp {

/// Sample SD of log P(c) over `num_orderings` uniformly random reorderings
/// of the observations (the partition's blocks are kept). Requires
/// num_orderings >= 2.
double between_ordering_sd(const PriorSpec& spec, const Partition& partition, std::size_t num_orderings,
                           RandomStream& rng);

/// Sample SD of log P(c) across partitions scored under the same stored
/// ordering. Requires at least two partitions of equal size.
double between_partition_sd(const PriorSpec& spec, std::span<const Partition> partitions);

struct OrderingStudy {
  PriorSpec spec;
  /// Final partition of each chain.
  std::vector<Partition> partitions;
  std::size_t num_orderings = 0;
  std::vector<double> per_partition_ordering_sd;
  double mean_ordering_sd = 0.0;
  double between_partition_sd = 0.0;
  std::uint64_t master_seed = 0;
};

/// Runs `num_chains` Gibbs chains on the corpus under `spec` (chain i seeded
/// from RandomStream(master_seed).child(i)), then measures both SD families
/// on the chains' final partitions.
OrderingStudy run_ordering_study(const PriorSpec& spec, const Corpus& corpus, std::size_t num_chains,
                                 std::size_t num_orderings, const ChainConfig& chain_config,
                                 std::uint64_t master_seed, unsigned jobs = 1);

}  // namespace bnp
