#include <doctest.h>

#include <cmath>

#include "bnp/evaluation.hpp"
#include "bnp/log_math.hpp"
#include "test_helpers.hpp"

using namespace bnp;

namespace {

Corpus make_corpus(std::vector<Document> docs, std::size_t vocab) {
  Corpus c;
  for (std::size_t w = 0; w < vocab; ++w) c.vocabulary.add("w" + std::to_string(w));
  c.documents = std::move(docs);
  return c;
}

struct Fixture {
  Corpus train = make_corpus({{0, 0, 1}, {2, 3, 3}, {0, 1, 1, 0}, {3, 2}, {0, 2, 1}}, 4);
  std::vector<Label> labels{0, 1, 0, 1, 2};
  HyperParams h{0.8, 1.5, 2.0};
  std::vector<Document> test{{0, 1}, {3, 3, 2}, {1, 0, 0}, {2, 1}};

  ChainState state(const PriorSpec& prior) const { return make_chain_state(train, prior, h, labels, RandomStream(1)); }

  double oracle_value(const PriorSpec& prior, std::size_t count) const {
    const std::vector<oracle::Doc> tr(train.documents.begin(), train.documents.end());
    const std::vector<oracle::Doc> te(test.begin(), test.begin() + static_cast<std::ptrdiff_t>(count));
    return oracle::heldout_log_prob(oracle_kind(prior.kind()), prior.theta(), tr, to_oracle(labels), te,
                                    {h.beta, h.beta1, h.beta0}, 4);
  }
};

}  // namespace

TEST_SUITE("evaluation") {
  TEST_CASE("empty test set") {
    Fixture f;
    const auto st = f.state(PriorSpec::uniform(1));
    RandomStream rng(1);
    CHECK(left_to_right_log_prob_ordered({}, st, 10, rng) == 0.0);
    CHECK(exact_heldout_log_prob({}, st) == 0.0);
    EvalConfig cfg;
    cfg.test_permutations = 3;
    CHECK(left_to_right_log_prob({}, st, cfg).mean == 0.0);
  }

  TEST_CASE("one test document: three-term hand sum and exact estimator") {
    Corpus train = make_corpus({{0, 0}, {1, 1}}, 2);
    const HyperParams h{1, 1, 1};
    const auto st = make_chain_state(train, PriorSpec::dirichlet(1), h, std::vector<Label>{0, 1}, RandomStream(1));
    const std::vector<Document> test{{0, 1}};
    // prior: 1/3, 1/3, 1/3 ; likelihood from the nested fractions
    auto tok = [&](double nw, double n, double nwc, double nc, double a, double pos) {
      const double pco = (nw + 1.0 / 2) / (n + 1);
      const double pcl = (nwc + pco) / (nc + 1);
      return (a + pcl) / (pos + 1);
    };
    // corpus: word0 = 2, word1 = 2, total 4
    const double in0 = tok(2, 4, 2, 2, 0, 0) * tok(2, 5, 0, 3, 0, 1);
    const double in1 = tok(2, 4, 0, 2, 0, 0) * tok(2, 5, 2, 3, 0, 1);
    const double fresh = tok(2, 4, 0, 0, 0, 0) * tok(2, 5, 0, 1, 0, 1);
    const double hand = std::log((in0 + in1 + fresh) / 3);
    CHECK(exact_heldout_log_prob(test, st) == doctest::Approx(hand).epsilon(1e-12));
    for (std::size_t r : {1u, 7u}) {
      RandomStream rng(r);
      CHECK(left_to_right_log_prob_ordered(test, st, r, rng) == doctest::Approx(hand).epsilon(1e-12));
    }
  }

  TEST_CASE("exact enumeration matches the independent oracle") {
    Fixture f;
    for (auto prior : {PriorSpec::dirichlet(0.7), PriorSpec::uniform(0.7), PriorSpec::uniform(3)}) {
      const auto st = f.state(prior);
      for (std::size_t k = 1; k <= 4; ++k) {
        std::vector<Document> sub(f.test.begin(), f.test.begin() + static_cast<std::ptrdiff_t>(k));
        CHECK(exact_heldout_log_prob(sub, st) == doctest::Approx(f.oracle_value(prior, k)).epsilon(1e-11));
      }
    }
    std::vector<Document> seven(7, Document{0});
    CHECK_THROWS(exact_heldout_log_prob(seven, f.state(PriorSpec::uniform(1))));
  }

  TEST_CASE("estimator agrees with exact value on three documents") {
    Fixture f;
    for (auto prior : {PriorSpec::dirichlet(1), PriorSpec::uniform(1)}) {
      const auto st = f.state(prior);
      std::vector<Document> three(f.test.begin(), f.test.begin() + 3);
      RandomStream rng(3);
      const double est = left_to_right_log_prob_ordered(three, st, 10000, rng);
      CHECK(std::fabs(est - exact_heldout_log_prob(three, st)) < 0.01);
    }
  }

  TEST_CASE("larger particle counts reduce spread and bias") {
    Fixture f;
    const auto st = f.state(PriorSpec::uniform(1));
    EvalConfig small, large;
    small.particles = 10;
    large.particles = 1000;
    small.test_permutations = large.test_permutations = 30;
    small.permute_test = large.permute_test = false;
    small.seed = 1;
    large.seed = 2;
    const auto a = left_to_right_log_prob(f.test, st, small);
    const auto b = left_to_right_log_prob(f.test, st, large);
    CHECK(b.sd < a.sd);
    CHECK(b.mean >= a.mean - 3 * a.sd / std::sqrt(30.0));
  }

  TEST_CASE("out-of-vocabulary words are rejected until the vocabulary is extended") {
    Fixture f;
    auto st = f.state(PriorSpec::uniform(1));
    const std::vector<Document> oov{{5}};
    RandomStream rng(1);
    CHECK_THROWS_AS(left_to_right_log_prob_ordered(oov, st, 5, rng), std::out_of_range);
    st.counts.resize_vocab(6);
    CHECK(std::isfinite(left_to_right_log_prob_ordered(oov, st, 5, rng)));
  }

  TEST_CASE("runs are independent of job count") {
    Fixture f;
    const auto st = f.state(PriorSpec::uniform(2));
    EvalConfig cfg;
    cfg.particles = 50;
    cfg.test_permutations = 6;
    cfg.seed = 9;
    const auto a = left_to_right_log_prob(f.test, st, cfg, 1);
    const auto b = left_to_right_log_prob(f.test, st, cfg, 4);
    CHECK(a.per_run == b.per_run);
  }

  TEST_CASE("single-cell report") {
    SynthConfig sc;
    sc.num_clusters = 2;
    sc.docs_per_cluster = 6;
    sc.doc_length = 8;
    const auto s = synth_corpus(sc);
    const auto [train, test] = split_corpus(s.corpus, 0.75, 2);
    ChainConfig cc;
    cc.sweeps = 5;
    EvalConfig ec;
    ec.particles = 20;
    ec.test_permutations = 2;
    const std::vector<ProcessKind> priors{ProcessKind::Uniform};
    const std::vector<double> grid{1.0};
    const auto rep = compare_priors_heldout(train, test, priors, grid, 1, cc, ec, 4);
    REQUIRE(rep.cells.size() == 1);
    CHECK(rep.cells[0].chain_logprob.size() == 1);
    CHECK(std::isfinite(rep.cells[0].logprob_mean));
    const auto j = to_json(rep);
    CHECK(j.at("results").size() == 1);
    CHECK(j.at("results")[0].contains("heldout_logprob_sd"));
  }
}
