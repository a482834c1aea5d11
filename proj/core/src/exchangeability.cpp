#include "bnp/exchangeability.hpp"

#include <stdexcept>

#include "bnp/log_math.hpp"
#include "bnp/parallel.hpp"

namespace bnp {

double between_ordering_sd(const PriorSpec& spec, const Partition& partition, std::size_t num_orderings,
                           RandomStream& rng) {
  if (num_orderings < 2) throw std::invalid_argument("between_ordering_sd: need at least two orderings");
  std::vector<double> values;
  values.reserve(num_orderings);
  for (std::size_t i = 0; i < num_orderings; ++i) {
    const auto perm = random_permutation(partition.size(), rng);
    values.push_back(log_joint(spec, permute(partition, perm)));
  }
  return sample_sd(values);
}

double between_partition_sd(const PriorSpec& spec, std::span<const Partition> partitions) {
  if (partitions.size() < 2) throw std::invalid_argument("between_partition_sd: need at least two partitions");
  std::vector<double> values;
  for (const auto& p : partitions) {
    if (p.size() != partitions.front().size()) {
      throw std::invalid_argument("between_partition_sd: partitions must cover the same observations");
    }
    values.push_back(log_joint(spec, p));
  }
  return sample_sd(values);
}

OrderingStudy run_ordering_study(const PriorSpec& spec, const Corpus& corpus, std::size_t num_chains,
                                 std::size_t num_orderings, const ChainConfig& chain_config,
                                 std::uint64_t master_seed, unsigned jobs) {
  if (corpus.documents.empty()) throw std::invalid_argument("run_ordering_study: corpus is empty");
  if (num_chains < 2) throw std::invalid_argument("run_ordering_study: need at least two chains");

  const RandomStream master(master_seed);
  OrderingStudy study{spec, std::vector<Partition>(num_chains), num_orderings, std::vector<double>(num_chains, 0.0),
                      0.0, 0.0, master_seed};

  parallel_for(num_chains, jobs, [&](std::size_t i) {
    ChainConfig config = chain_config;
    config.seed = master.child(i).seed();
    study.partitions[i] = run_chain(corpus, spec, config).final_state.assignments();
    RandomStream orderings = master.child(i).child(1);
    study.per_partition_ordering_sd[i] = between_ordering_sd(spec, study.partitions[i], num_orderings, orderings);
  });

  study.mean_ordering_sd = sample_mean(study.per_partition_ordering_sd);
  study.between_partition_sd = between_partition_sd(spec, study.partitions);
  return study;
}

}  // namespace bnp
