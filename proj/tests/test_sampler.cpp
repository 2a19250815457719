#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "degtree/oracle.hpp"
#include "degtree/sampler.hpp"
#include "degtree/verify.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <vector>

using namespace degtree;

TEST_CASE("chain never leaves the tree space") {
  ChainState s = ChainState::path_start(20, 99);
  for (int i = 0; i < 100000; ++i) s.step();
  CHECK(s.valid());
  CHECK(s.steps() == 100000);
}

TEST_CASE("n=3 one-step kernel by hand") {
  // Three labeled trees on {0,1,2}: path centered at 0, 1 or 2. From the
  // path centered at 1 (edges 01, 12): picks where a leaf is the pivot are
  // always self-proposals (1/4 each); picks where the center is the pivot
  // split 1/8 self, 1/8 to the other center. Row: self 3/4, others 1/8.
  const LabeledTree center1(3, {{0, 1}, {1, 2}});
  const KernelRow row = transition_row(center1);
  REQUIRE(row.size() == 3);
  const std::uint64_t self = code_to_rank(prufer_encode(center1));
  for (auto& [rank, p] : row) CHECK(p == (rank == self ? ExactQ(3, 4) : ExactQ(1, 8)));
}

TEST_CASE("exact kernel analysis for n = 3, 4, 5") {
  for (int n : {3, 4, 5}) {
    const KernelReport rep = exact_kernel_analysis(n);
    CHECK(rep.rows_sum_to_one);
    CHECK(rep.stationary);
    CHECK(rep.detailed_balance);
    CHECK(rep.irreducible);
    CHECK(rep.aperiodic);
  }
  CHECK_THROWS_AS(exact_kernel_analysis(9), std::length_error);
}

TEST_CASE("degree DP table matches the closed form and the recurrence") {
  for (int n = 2; n <= 50; ++n)
    CHECK(degree_dp_f(n, 2 * n - 2) == binomial(3 * n - 3, n - 2));
  // recurrence f(i,s) = sum_d d f(i-1, s-d)
  for (int i = 2; i <= 8; ++i)
    for (int s = i; s <= 20; ++s) {
      Int acc = 0;
      for (int d = 1; d <= s - (i - 1); ++d) acc += Int(d) * degree_dp_f(i - 1, s - d);
      CHECK(acc == degree_dp_f(i, s));
    }
}

static void check_degree_law(int n, int draws, std::uint64_t seed, DirectMethod method) {
  Rng rng(seed);
  std::map<std::vector<int>, int> freq;
  for (int i = 0; i < draws; ++i) {
    const std::vector<int> d = sample_degree_sequence(n, rng, method);
    long long sum = std::accumulate(d.begin(), d.end(), 0LL);
    REQUIRE(sum == 2 * n - 2);
    for (int x : d) REQUIRE(x >= 1);
    ++freq[d];
  }
  // every sequence frequency within 5 sigma of prod d_i / C(3n-3, n-2)
  const Int total = binomial(3 * n - 3, n - 2);
  for (auto& [d, count] : freq) {
    Int prod = 1;
    for (int x : d) prod *= x;
    const double p = to_double(ExactQ(prod, total));
    const double sigma = std::sqrt(p * (1 - p) * draws);
    CHECK(std::abs(count - p * draws) < 5 * sigma + 5);
  }
}

TEST_CASE("DP degree sampler is exact") { check_degree_law(5, 40000, 21, DirectMethod::dp); }

TEST_CASE("rejection degree sampler agrees with the same law") {
  check_degree_law(5, 40000, 22, DirectMethod::rejection);
}

TEST_CASE("DP sampler works at larger n") {
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const std::vector<int> d = sample_degree_sequence_dp(500, rng);
    CHECK(std::accumulate(d.begin(), d.end(), 0LL) == 998);
  }
}

TEST_CASE("direct sampler matches vertex-degree marginals at n=4") {
  SamplerConfig cfg;
  cfg.n = 4;
  cfg.seed = 17;
  cfg.count = 20000;
  int deg1 = 0;
  sample_direct_stream(cfg, [&](std::uint64_t, const LabeledTree& t) {
    if (t.degree(0) == 1) ++deg1;
  });
  // P(d_1 = 1) = 7/12; 3 sigma over 20000 draws
  const double p = 7.0 / 12.0;
  const double sigma = std::sqrt(p * (1 - p) / 20000.0);
  CHECK(std::abs(deg1 / 20000.0 - p) < 3 * sigma);
}

TEST_CASE("direct sampler output is independent of thread count") {
  SamplerConfig cfg;
  cfg.n = 30;
  cfg.seed = 5;
  cfg.count = 60;
  cfg.threads = 1;
  const SampleBatch one = sample_direct(cfg);
  cfg.threads = 3;
  const SampleBatch three = sample_direct(cfg);
  REQUIRE(one.trees.size() == three.trees.size());
  for (std::size_t i = 0; i < one.trees.size(); ++i)
    CHECK(prufer_encode(one.trees[i]).code == prufer_encode(three.trees[i]).code);
}

TEST_CASE("samplers are deterministic in the seed") {
  SamplerConfig cfg;
  cfg.n = 12;
  cfg.seed = 8;
  cfg.count = 10;
  const SampleBatch a = sample_direct(cfg), b = sample_direct(cfg);
  for (std::size_t i = 0; i < a.trees.size(); ++i)
    CHECK(a.trees[i].edges == b.trees[i].edges);
  cfg.seed = 9;
  const SampleBatch c = sample_direct(cfg);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.trees.size(); ++i)
    if (a.trees[i].edges != c.trees[i].edges) any_diff = true;
  CHECK(any_diff);

  cfg.method = SampleMethod::chain;
  cfg.n = 6;
  cfg.seed = 4;
  const SampleBatch d = sample_chain(cfg), e = sample_chain(cfg);
  REQUIRE(d.trees.size() == e.trees.size());
  for (std::size_t i = 0; i < d.trees.size(); ++i)
    CHECK(d.trees[i].edges == e.trees[i].edges);
}

TEST_CASE("chain empirical distribution approaches the stationary law at n=4") {
  const ExactEnsemble ens = enumerate_all(4);
  SamplerConfig cfg;
  cfg.n = 4;
  cfg.method = SampleMethod::chain;
  cfg.seed = 31;
  cfg.count = 200000;
  cfg.thin = 2;
  const SampleBatch batch = sample_chain(cfg);
  std::map<std::uint64_t, double> emp;
  for (const auto& t : batch.trees)
    emp[code_to_rank(prufer_encode(t))] += 1.0 / static_cast<double>(batch.trees.size());
  std::map<std::uint64_t, ExactQ> exact;
  for (std::uint64_t r = 0; r < ens.weights.size(); ++r)
    exact[r] = ExactQ(ens.weights[r], ens.total);
  CHECK(total_variation(emp, exact) < 0.02);
}

TEST_CASE("config validation") {
  SamplerConfig cfg;
  cfg.n = 5;
  cfg.count = 10;
  cfg.steps = 100;
  cfg.burnin = 200;  // burnin >= steps
  cfg.method = SampleMethod::chain;
  CHECK_THROWS_AS(sample_chain(cfg), std::invalid_argument);
  cfg.burnin = 0;
  cfg.steps = 0;
  cfg.thin = 0;
  CHECK_THROWS_AS(sample_chain(cfg), std::invalid_argument);
}
