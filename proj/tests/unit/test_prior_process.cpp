#include <doctest.h>

#include <cmath>
#include <map>

#include "bnp/prior_process.hpp"
#include "bnp/random.hpp"
#include "test_helpers.hpp"

using namespace bnp;

namespace {

Partition with_sizes(std::initializer_list<std::uint32_t> sizes) {
  std::vector<Label> labels;
  Label k = 0;
  for (auto s : sizes) {
    for (std::uint32_t i = 0; i < s; ++i) labels.push_back(k);
    ++k;
  }
  return Partition::from_labels(labels);
}

void check_probs(const PriorSpec& spec, const Partition& p, std::vector<double> expected) {
  const auto lp = predictive_log_probs(spec, p);
  REQUIRE(lp.size() == expected.size());
  for (std::size_t i = 0; i < lp.size(); ++i) CHECK(std::exp(lp[i]) == doctest::Approx(expected[i]).epsilon(1e-12));
}

}  // namespace

TEST_SUITE("prior_process") {
  TEST_CASE("spec validation") {
    CHECK_THROWS(PriorSpec::dirichlet(0.0));
    CHECK_THROWS(PriorSpec::dirichlet(-1.0));
    CHECK_THROWS(PriorSpec::uniform(std::nan("")));
    CHECK_THROWS(PriorSpec::pitman_yor(1.0, 1.0));
    CHECK_THROWS(PriorSpec::pitman_yor(1.0, -0.1));
    CHECK_NOTHROW(PriorSpec::pitman_yor(1.0, 0.0));
    CHECK(parse_process_kind("up") == ProcessKind::Uniform);
    CHECK(parse_process_kind("dp") == ProcessKind::Dirichlet);
    CHECK(parse_process_kind("py") == ProcessKind::PitmanYor);
    CHECK_THROWS(parse_process_kind("crp"));
  }

  TEST_CASE("partition canonicalizes external labels") {
    const auto p = Partition::from_labels({7, 7, 3, 9, 3});
    CHECK(std::vector<Label>(p.labels().begin(), p.labels().end()) == std::vector<Label>{0, 0, 1, 2, 1});
    CHECK(p.num_clusters() == 3);
    CHECK(std::vector<std::uint32_t>(p.sizes().begin(), p.sizes().end()) == std::vector<std::uint32_t>{2, 2, 1});
    Partition q;
    CHECK_THROWS(q.append(1));
    q.append(0);
    q.append(1);
    CHECK_THROWS(q.append(3));
  }

  TEST_CASE("predictive examples") {
    const auto p = with_sizes({5, 3, 2});
    check_probs(PriorSpec::dirichlet(1), p, {5.0 / 11, 3.0 / 11, 2.0 / 11, 1.0 / 11});
    check_probs(PriorSpec::pitman_yor(1, 0.5), p, {4.5 / 11, 2.5 / 11, 1.5 / 11, 2.5 / 11});
    check_probs(PriorSpec::uniform(1), p, {0.25, 0.25, 0.25, 0.25});
    for (auto spec : {PriorSpec::dirichlet(2), PriorSpec::pitman_yor(2, 0.3), PriorSpec::uniform(2)}) {
      check_probs(spec, Partition{}, {1.0});
    }
  }

  TEST_CASE("predictive matches transcription and normalizes") {
    RandomStream rng(101);
    for (int rep = 0; rep < 300; ++rep) {
      const double theta = 0.05 + 20 * rng.uniform();
      const double alpha = 0.95 * rng.uniform();
      const std::size_t n = rng.below(40);
      for (auto spec : {PriorSpec::dirichlet(theta), PriorSpec::pitman_yor(theta, alpha), PriorSpec::uniform(theta)}) {
        const Partition p = n == 0 ? Partition{} : sample_partition(spec, n, rng);
        const auto lp = predictive_log_probs(spec, p);
        const auto ref = oracle::predictive(oracle_kind(spec.kind()), theta, spec.alpha(), to_oracle(p.labels()));
        REQUIRE(lp.size() == ref.size());
        double s = 0;
        for (std::size_t i = 0; i < lp.size(); ++i) {
          CHECK(std::fabs(std::exp(lp[i]) - ref[i]) <= 1e-12);
          s += std::exp(lp[i]);
        }
        CHECK(std::fabs(s - 1.0) <= 1e-12);
      }
    }
  }

  TEST_CASE("Pitman-Yor with zero discount is the Dirichlet process exactly") {
    RandomStream rng(5);
    for (int rep = 0; rep < 100; ++rep) {
      const double theta = 0.1 + 10 * rng.uniform();
      const auto p = sample_partition(PriorSpec::dirichlet(theta), 1 + rng.below(50), rng);
      CHECK(predictive_log_probs(PriorSpec::pitman_yor(theta, 0.0), p) ==
            predictive_log_probs(PriorSpec::dirichlet(theta), p));
      CHECK(log_joint(PriorSpec::pitman_yor(theta, 0.0), p) == log_joint(PriorSpec::dirichlet(theta), p));
    }
  }

  TEST_CASE("log_joint hand values") {
    const auto a = Partition::from_labels({0, 0, 1});
    const auto b = Partition::from_labels({0, 1, 1});
    CHECK(log_joint(PriorSpec::uniform(1), a) == doctest::Approx(std::log(0.25)).epsilon(1e-14));
    CHECK(log_joint(PriorSpec::uniform(1), b) == doctest::Approx(std::log(1.0 / 6)).epsilon(1e-14));
    CHECK(log_joint(PriorSpec::dirichlet(1), a) == doctest::Approx(std::log(1.0 / 6)).epsilon(1e-14));
    CHECK(log_joint(PriorSpec::dirichlet(1), b) == doctest::Approx(std::log(1.0 / 6)).epsilon(1e-14));
    for (auto spec : {PriorSpec::dirichlet(3), PriorSpec::pitman_yor(3, 0.2), PriorSpec::uniform(3)}) {
      CHECK(log_joint(spec, Partition::from_labels({0})) == 0.0);
    }
  }

  TEST_CASE("log_joint matches transcription and stays finite for long sequences") {
    RandomStream rng(77);
    for (auto spec : {PriorSpec::dirichlet(1.5), PriorSpec::pitman_yor(2, 0.4), PriorSpec::uniform(0.7)}) {
      for (int rep = 0; rep < 30; ++rep) {
        const auto p = sample_partition(spec, 1 + rng.below(60), rng);
        CHECK(log_joint(spec, p) ==
              doctest::Approx(oracle::log_joint(oracle_kind(spec.kind()), spec.theta(), spec.alpha(), to_oracle(p.labels())))
                  .epsilon(1e-12));
      }
      const auto big = sample_partition(spec, 100000, rng);
      CHECK(std::isfinite(log_joint(spec, big)));
    }
  }

  TEST_CASE("permute") {
    const auto p = Partition::from_labels({0, 0, 1});
    const std::vector<std::size_t> swap13{2, 1, 0};
    CHECK(permute(p, swap13) == Partition::from_labels({0, 1, 1}));
    const std::vector<std::size_t> id{0, 1, 2};
    CHECK(permute(p, id) == p);
    const std::vector<std::size_t> bad{0, 0, 1};
    CHECK_THROWS(permute(p, bad));
    const std::vector<std::size_t> short_perm{0, 1};
    CHECK_THROWS(permute(p, short_perm));

    RandomStream rng(8);
    for (int rep = 0; rep < 200; ++rep) {
      const auto q = sample_partition(PriorSpec::dirichlet(2), 1 + rng.below(30), rng);
      const auto perm = random_permutation(q.size(), rng);
      const auto r = permute(q, perm);
      auto s1 = std::vector<std::uint32_t>(q.sizes().begin(), q.sizes().end());
      auto s2 = std::vector<std::uint32_t>(r.sizes().begin(), r.sizes().end());
      std::sort(s1.begin(), s1.end());
      std::sort(s2.begin(), s2.end());
      CHECK(s1 == s2);
      // same co-membership
      for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j)
          REQUIRE((q[perm[i]] == q[perm[j]]) == (r[i] == r[j]));
    }
  }

  TEST_CASE("exchangeability property") {
    RandomStream rng(2024);
    for (int rep = 0; rep < 500; ++rep) {
      const double theta = 0.1 + 10 * rng.uniform();
      for (auto spec : {PriorSpec::dirichlet(theta), PriorSpec::pitman_yor(theta, 0.9 * rng.uniform())}) {
        const auto p = sample_partition(spec, 1 + rng.below(80), rng);
        const auto q = permute(p, random_permutation(p.size(), rng));
        CHECK(std::fabs(log_joint(spec, p) - log_joint(spec, q)) <= 1e-9);
      }
    }
    // uniform process: invariant for all-singletons and single-cluster partitions
    const auto spec = PriorSpec::uniform(1.3);
    std::vector<Label> singles(12), same(12, 0);
    for (Label i = 0; i < 12; ++i) singles[i] = i;
    const auto ps = Partition::from_labels(singles), pc = Partition::from_labels(same);
    for (int rep = 0; rep < 20; ++rep) {
      CHECK(log_joint(spec, permute(ps, random_permutation(12, rng))) == log_joint(spec, ps));
      CHECK(log_joint(spec, permute(pc, random_permutation(12, rng))) == log_joint(spec, pc));
    }
  }

  TEST_CASE("sample_next examples") {
    RandomStream rng(1);
    CHECK(sample_next(PriorSpec::uniform(1), Partition{}, rng) == Partition::from_labels({0}));
    const auto one = Partition::from_labels({0});
    int joined = 0;
    for (int i = 0; i < 10000; ++i) joined += sample_next(PriorSpec::dirichlet(1e-9), one, rng)[1] == 0;
    CHECK(joined > 9990);
    const auto two = Partition::from_labels({0, 1});
    int fresh = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) fresh += draw_next_label(PriorSpec::uniform(1), two, rng) == 2;
    const double p = 1.0 / 3, se = std::sqrt(p * (1 - p) / n);
    CHECK(std::fabs(fresh / double(n) - p) < 3 * se);
  }

  TEST_CASE("sample_partition basics") {
    RandomStream rng(4);
    CHECK_THROWS(sample_partition(PriorSpec::uniform(1), 0, rng));
    for (int i = 0; i < 20; ++i) CHECK(sample_partition(PriorSpec::dirichlet(5), 1, rng) == Partition::from_labels({0}));
    RandomStream a(99), b(99);
    CHECK(sample_partition(PriorSpec::pitman_yor(2, 0.5), 5000, a) == sample_partition(PriorSpec::pitman_yor(2, 0.5), 5000, b));
  }

  TEST_CASE("n=3 sequence distribution matches enumeration (chi-square)") {
    const auto all = oracle::canonical_sequences(3);
    REQUIRE(all.size() == 5);
    for (auto spec : {PriorSpec::dirichlet(1), PriorSpec::pitman_yor(1, 0.5), PriorSpec::uniform(1)}) {
      RandomStream rng(31337);
      std::vector<double> counts(all.size(), 0);
      const int n = 100000;
      for (int i = 0; i < n; ++i) {
        const auto p = sample_partition(spec, 3, rng);
        counts[oracle::sequence_index(all, to_oracle(p.labels()))] += 1;
      }
      double chi2 = 0;
      for (std::size_t s = 0; s < all.size(); ++s) {
        const double e = n * std::exp(oracle::log_joint(oracle_kind(spec.kind()), spec.theta(), spec.alpha(), all[s]));
        chi2 += (counts[s] - e) * (counts[s] - e) / e;
      }
      CHECK(chi2 < chi2_critical_001(4));
      if (spec.kind() == ProcessKind::Uniform) {
        CHECK(std::exp(oracle::log_joint(oracle::Kind::UP, 1, 0, {0, 0, 1})) == doctest::Approx(0.25));
        CHECK(std::exp(oracle::log_joint(oracle::Kind::UP, 1, 0, {0, 1, 1})) == doctest::Approx(1.0 / 6));
      }
    }
  }

  TEST_CASE("DP mean K at n=100") {
    RandomStream rng(12);
    std::vector<double> k;
    for (int r = 0; r < 1000; ++r) k.push_back(static_cast<double>(sample_partition(PriorSpec::dirichlet(1), 100, rng).num_clusters()));
    double m = 0, v = 0;
    for (double x : k) m += x;
    m /= k.size();
    for (double x : k) v += (x - m) * (x - m);
    const double se = std::sqrt(v / (k.size() - 1) / k.size());
    double h = 0;
    for (int i = 1; i <= 100; ++i) h += 1.0 / i;
    CHECK(std::fabs(m - h) < 3 * se);
  }
}
