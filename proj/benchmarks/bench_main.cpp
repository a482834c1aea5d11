#include <benchmark/benchmark.h>

#include <vector>

#include "bnp/corpus.hpp"
#include "bnp/doc_model.hpp"
#include "bnp/evaluation.hpp"
#include "bnp/prior_process.hpp"

namespace {

bnp::PriorSpec spec_for(int64_t kind) {
  switch (kind) {
    case 0: return bnp::PriorSpec::dirichlet(10);
    case 1: return bnp::PriorSpec::pitman_yor(10, 0.5);
    default: return bnp::PriorSpec::uniform(10);
  }
}

void BM_SamplePartition(benchmark::State& state) {
  const auto spec = spec_for(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  bnp::RandomStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(bnp::sample_partition(spec, n, rng));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_SamplePartition)->ArgsProduct({{0, 1, 2}, {1000, 100000}});

bnp::Corpus bench_corpus(std::uint32_t docs_per_cluster) {
  bnp::SynthConfig c;
  c.num_clusters = 10;
  c.docs_per_cluster = docs_per_cluster;
  c.doc_length = 30;
  c.overlap = 0.3;
  return bnp::synth_corpus(c).corpus;
}

void BM_GibbsSweep(benchmark::State& state) {
  const auto corpus = bench_corpus(static_cast<std::uint32_t>(state.range(1)));
  const auto spec = state.range(0) == 0 ? bnp::PriorSpec::dirichlet(1) : bnp::PriorSpec::uniform(1);
  auto chain = bnp::initialize_chain(corpus, spec, {}, bnp::RandomStream(2));
  for (auto _ : state) bnp::gibbs_sweep(chain, corpus);
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(corpus.size()));
}
BENCHMARK(BM_GibbsSweep)->ArgsProduct({{0, 2}, {20, 100}})->Unit(benchmark::kMillisecond);

// UP conditional prior: full recount versus the incremental update
template <bool Incremental>
void BM_UpConditional(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  bnp::RandomStream rng(3);
  const auto p = bnp::sample_partition(bnp::PriorSpec::uniform(5), n, rng);
  const std::vector<bnp::ClusterId> labels(p.labels().begin(), p.labels().end());
  std::size_t d = 0;
  for (auto _ : state) {
    if constexpr (Incremental) {
      benchmark::DoNotOptimize(bnp::conditional_prior_up_incremental(d, labels, 5));
    } else {
      benchmark::DoNotOptimize(bnp::conditional_prior_up(d, labels, 5));
    }
    d = (d + 1) % n;
  }
}
BENCHMARK(BM_UpConditional<false>)->Arg(200)->Arg(2000);
BENCHMARK(BM_UpConditional<true>)->Arg(200)->Arg(2000);

void BM_LeftToRight(benchmark::State& state) {
  const auto corpus = bench_corpus(24);
  const auto [train, test] = bnp::split_corpus(corpus, 200.0 / 240.0, 4);
  auto chain = bnp::initialize_chain(train, bnp::PriorSpec::uniform(1), {}, bnp::RandomStream(5));
  for (int i = 0; i < 20; ++i) bnp::gibbs_sweep(chain, train);
  bnp::RandomStream rng(6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bnp::left_to_right_log_prob_ordered(test.documents, chain,
                                                                 static_cast<std::size_t>(state.range(0)), rng));
  }
}
BENCHMARK(BM_LeftToRight)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
