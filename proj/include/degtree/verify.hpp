#pragma once

#include "degtree/census.hpp"
#include "degtree/exact.hpp"
#include "degtree/forest.hpp"
#include "degtree/limit.hpp"
#include "degtree/oracle.hpp"
#include "degtree/sampler.hpp"
#include "degtree/weights.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace degtree {

struct CheckResult {
  std::string name;
  std::string expected;
  std::string got;
  double tolerance = 0;  // 0: exact equality required
  bool pass = false;
};

namespace checks {

inline std::string q_str(const ExactQ& q) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(q) << "/" << boost::multiprecision::denominator(q);
  return os.str();
}

inline CheckResult exact(std::string name, const ExactQ& expected, const ExactQ& got) {
  return CheckResult{std::move(name), q_str(expected), q_str(got), 0, expected == got};
}

inline CheckResult exact_int(std::string name, const Int& expected, const Int& got) {
  return CheckResult{std::move(name), expected.str(), got.str(), 0, expected == got};
}

inline CheckResult approx(std::string name, double expected, double got, double tol) {
  return CheckResult{std::move(name), std::to_string(expected), std::to_string(got), tol,
                     std::abs(expected - got) <= tol};
}

inline CheckResult truth(std::string name, bool got) {
  return CheckResult{std::move(name), "true", got ? "true" : "false", 0, got};
}

}  // namespace checks

// Labeled decorated-forest fixtures for oracle equivalence, hosted on
// n >= 6 vertices: single nodes, paths, stars, multi-component forests.
inline std::vector<DecoratedForest> decorated_forest_fixtures() {
  using F = DecoratedForest;
  std::vector<F> out;
  out.emplace_back(1, std::vector<std::pair<int, int>>{}, std::vector<int>{1}, std::vector<int>{0});
  out.emplace_back(1, std::vector<std::pair<int, int>>{}, std::vector<int>{2}, std::vector<int>{0});
  out.emplace_back(1, std::vector<std::pair<int, int>>{}, std::vector<int>{3}, std::vector<int>{1});
  out.emplace_back(1, std::vector<std::pair<int, int>>{}, std::vector<int>{4}, std::vector<int>{2});
  out.emplace_back(2, std::vector<std::pair<int, int>>{{0, 1}}, std::vector<int>{1, 1},
                   std::vector<int>{0, 1});
  out.emplace_back(2, std::vector<std::pair<int, int>>{{0, 1}}, std::vector<int>{0, 1},
                   std::vector<int>{0, 1});
  out.emplace_back(2, std::vector<std::pair<int, int>>{{0, 1}}, std::vector<int>{1, 2},
                   std::vector<int>{2, 3});
  out.emplace_back(2, std::vector<std::pair<int, int>>{{0, 1}}, std::vector<int>{0, 0},
                   std::vector<int>{0, 1});
  out.emplace_back(2, std::vector<std::pair<int, int>>{{0, 1}}, std::vector<int>{2, 2},
                   std::vector<int>{1, 4});
  out.emplace_back(3, std::vector<std::pair<int, int>>{{0, 1}, {1, 2}}, std::vector<int>{1, 0, 1},
                   std::vector<int>{0, 1, 2});
  out.emplace_back(3, std::vector<std::pair<int, int>>{{0, 1}, {1, 2}}, std::vector<int>{0, 1, 0},
                   std::vector<int>{0, 1, 2});
  out.emplace_back(3, std::vector<std::pair<int, int>>{{0, 1}, {1, 2}}, std::vector<int>{1, 1, 1},
                   std::vector<int>{3, 4, 5});
  out.emplace_back(3, std::vector<std::pair<int, int>>{{0, 1}, {1, 2}}, std::vector<int>{2, 0, 1},
                   std::vector<int>{0, 2, 4});
  out.emplace_back(4, std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {0, 3}},
                   std::vector<int>{0, 1, 0, 0}, std::vector<int>{0, 1, 2, 3});
  out.emplace_back(4, std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {0, 3}},
                   std::vector<int>{1, 0, 0, 0}, std::vector<int>{2, 0, 1, 3});
  out.emplace_back(4, std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}},
                   std::vector<int>{1, 0, 0, 1}, std::vector<int>{0, 1, 2, 3});
  out.emplace_back(4, std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}},
                   std::vector<int>{0, 1, 1, 0}, std::vector<int>{1, 2, 3, 4});
  // multi-component
  out.emplace_back(2, std::vector<std::pair<int, int>>{}, std::vector<int>{2, 1},
                   std::vector<int>{0, 1});
  out.emplace_back(3, std::vector<std::pair<int, int>>{}, std::vector<int>{1, 1, 2},
                   std::vector<int>{0, 2, 4});
  out.emplace_back(3, std::vector<std::pair<int, int>>{{0, 1}}, std::vector<int>{1, 1, 2},
                   std::vector<int>{0, 1, 4});
  out.emplace_back(4, std::vector<std::pair<int, int>>{{0, 1}, {2, 3}}, std::vector<int>{1, 0, 0, 1},
                   std::vector<int>{0, 1, 2, 3});
  out.emplace_back(4, std::vector<std::pair<int, int>>{{0, 1}, {2, 3}}, std::vector<int>{1, 1, 1, 1},
                   std::vector<int>{0, 1, 3, 5});
  return out;
}

// Unlabeled connected patterns for expected-subtree-count checks.
inline std::vector<DecoratedForest> pattern_fixtures() {
  using F = DecoratedForest;
  std::vector<F> out;
  out.emplace_back(1, std::vector<std::pair<int, int>>{}, std::vector<int>{1});
  out.emplace_back(1, std::vector<std::pair<int, int>>{}, std::vector<int>{2});
  out.emplace_back(1, std::vector<std::pair<int, int>>{}, std::vector<int>{3});
  out.emplace_back(2, std::vector<std::pair<int, int>>{{0, 1}}, std::vector<int>{1, 1});
  out.emplace_back(2, std::vector<std::pair<int, int>>{{0, 1}}, std::vector<int>{0, 1});
  out.emplace_back(2, std::vector<std::pair<int, int>>{{0, 1}}, std::vector<int>{2, 1});
  out.emplace_back(3, std::vector<std::pair<int, int>>{{0, 1}, {1, 2}}, std::vector<int>{1, 0, 1});
  out.emplace_back(3, std::vector<std::pair<int, int>>{{0, 1}, {1, 2}}, std::vector<int>{0, 1, 0});
  out.emplace_back(4, std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {0, 3}},
                   std::vector<int>{1, 0, 0, 0});
  return out;
}

inline double total_variation(const std::map<std::uint64_t, double>& empirical,
                              const std::map<std::uint64_t, ExactQ>& exact) {
  double tv = 0;
  for (auto& [k, p] : exact) {
    auto it = empirical.find(k);
    const double e = it == empirical.end() ? 0.0 : it->second;
    tv += std::abs(e - to_double(p));
  }
  for (auto& [k, e] : empirical)
    if (!exact.count(k)) tv += e;
  return tv / 2;
}

// --- exact suite --------------------------------------------------------

inline std::vector<CheckResult> exact_suite(bool slow) {
  std::vector<CheckResult> out;
  // Total weight over all trees equals (n-2)! C(3n-3, n-2).
  for (int n = 2; n <= (slow ? 8 : 6); ++n) {
    const auto e = enumerate_all(n);
    out.push_back(checks::exact_int("total-weight n=" + std::to_string(n), constant_C(n), e.total));
  }
  // Prufer round-trip, exhaustive.
  for (int n = 2; n <= 6; ++n) {
    bool ok = true;
    for (std::uint64_t r = 0; r < code_count(n); ++r) {
      const PruferCode c = rank_to_code(n, r);
      if (code_to_rank(prufer_encode(prufer_decode(c))) != r) ok = false;
    }
    out.push_back(checks::truth("prufer-roundtrip n=" + std::to_string(n), ok));
  }
  // Exact kernel analysis.
  for (int n : {3, 4, 5}) {
    const auto rep = exact_kernel_analysis(n);
    out.push_back(checks::truth("kernel n=" + std::to_string(n) + " rows", rep.rows_sum_to_one));
    out.push_back(checks::truth("kernel n=" + std::to_string(n) + " stationary", rep.stationary));
    out.push_back(checks::truth("kernel n=" + std::to_string(n) + " balance", rep.detailed_balance));
    out.push_back(checks::truth("kernel n=" + std::to_string(n) + " irreducible", rep.irreducible));
    out.push_back(checks::truth("kernel n=" + std::to_string(n) + " aperiodic", rep.aperiodic));
  }
  // Product-sum identity.
  {
    bool ok = true;
    for (int n = 1; n <= 6; ++n)
      for (int m = n; m <= 16; ++m) {
        auto [lhs, rhs] = product_sum_identity(n, m);
        if (lhs != rhs) ok = false;
      }
    out.push_back(checks::truth("product-sum identity n<=6 m<=16", ok));
  }
  // Degree laws against the oracle.
  for (int n = 4; n <= 6; ++n) {
    const auto e = enumerate_all(n);
    bool ok1 = true, ok2 = true;
    for (int x = 1; x <= n - 1; ++x) {
      const ExactQ oracle = exact_expectation(e, [&](const LabeledTree& t) {
        return Int(t.degree(0) == x ? 1 : 0);
      });
      if (oracle != joint_degree_probability(n, {{0, x}})) ok1 = false;
    }
    for (int x1 = 1; x1 <= n - 1 && n <= 6; ++x1)
      for (int x2 = 1; x2 <= n - 1; ++x2) {
        const ExactQ oracle = exact_expectation(e, [&](const LabeledTree& t) {
          return Int(t.degree(0) == x1 && t.degree(1) == x2 ? 1 : 0);
        });
        if (oracle != joint_degree_probability(n, {{0, x1}, {1, x2}})) ok2 = false;
      }
    out.push_back(checks::truth("degree-law k=1 n=" + std::to_string(n), ok1));
    out.push_back(checks::truth("degree-law k=2 n=" + std::to_string(n), ok2));
  }
  // Forest formulas against the oracle at n = 6.
  {
    const auto e = enumerate_all(6);
    bool ok = true;
    for (const auto& f : decorated_forest_fixtures())
      if (oracle_forest_probability(e, f) != forest_probability(6, f)) ok = false;
    out.push_back(checks::truth("forest-probability fixtures n=6", ok));
    bool ok_e = true;
    for (const auto& p : pattern_fixtures()) {
      const ExactQ oracle = exact_expectation(e, [&](const LabeledTree& t) {
        return Int(labeled_subgraph_count(t, p));
      });
      if (oracle != expected_subtree_count(6, p)) ok_e = false;
    }
    out.push_back(checks::truth("expected-subtree fixtures n=6", ok_e));
  }
  // Limit-measure consistency at a small cutoff plus the l=1 mass.
  {
    bool ok = true;
    for (const auto& b : enumerate_balls(1, 3)) {
      const auto res = consistency_check(b, 15);
      if (boost::multiprecision::abs(res.lhs - res.rhs) > res.tail_bound) ok = false;
    }
    out.push_back(checks::truth("limit consistency l=1 D=15", ok));
    const ExactQ mass = normalization_mass(1, 60);
    out.push_back(checks::truth("limit mass(1,60) ~ 1", to_double(ExactQ(1) - mass) < 1e-20));
  }
  return out;
}

// --- montecarlo suite ---------------------------------------------------

inline std::vector<CheckResult> montecarlo_suite(std::uint64_t seed, bool slow) {
  std::vector<CheckResult> out;
  const std::uint64_t draws = slow ? 1000000 : 100000;
  // Direct sampler vs exact Pi_4 in total variation.
  {
    const auto e = enumerate_all(4);
    std::map<std::uint64_t, ExactQ> exact;
    for (std::uint64_t r = 0; r < e.weights.size(); ++r) exact[r] = ExactQ(e.weights[r], e.total);
    SamplerConfig cfg;
    cfg.n = 4;
    cfg.seed = Rng::derive(seed, 1);
    cfg.count = draws;
    std::map<std::uint64_t, double> emp;
    sample_direct_stream(cfg, [&](std::uint64_t, const LabeledTree& t) {
      emp[code_to_rank(prufer_encode(t))] += 1.0 / draws;
    });
    out.push_back(checks::approx("direct sampler TV n=4", 0.0, total_variation(emp, exact),
                                 slow ? 0.01 : 0.03));
  }
  // Chain sampler vs exact Pi_4.
  {
    const auto e = enumerate_all(4);
    std::map<std::uint64_t, ExactQ> exact;
    for (std::uint64_t r = 0; r < e.weights.size(); ++r) exact[r] = ExactQ(e.weights[r], e.total);
    SamplerConfig cfg;
    cfg.n = 4;
    cfg.method = SampleMethod::chain;
    cfg.seed = Rng::derive(seed, 2);
    cfg.count = draws;
    cfg.thin = 1;
    const auto batch = sample_chain(cfg);
    std::map<std::uint64_t, double> emp;
    for (const auto& t : batch.trees)
      emp[code_to_rank(prufer_encode(t))] += 1.0 / static_cast<double>(batch.trees.size());
    out.push_back(checks::approx("chain sampler TV n=4", 0.0, total_variation(emp, exact),
                                 slow ? 0.02 : 0.05));
  }
  // l=1 empirical census vs the limit root-degree law.
  {
    SamplerConfig cfg;
    cfg.n = 1000;
    cfg.seed = Rng::derive(seed, 3);
    cfg.count = slow ? 1000 : 200;
    BallCensus census;
    census.radius = 1;
    sample_direct_stream(cfg, [&](std::uint64_t, const LabeledTree& t) { census.add_tree(t); });
    double tv = 0;
    std::map<std::string, double> limit_by_key;
    for (int d = 1; d <= 40; ++d) {
      std::vector<int> parent{-1};
      for (int i = 0; i < d; ++i) parent.push_back(0);
      const RootedBall ball = make_ball(1, std::move(parent));
      limit_by_key[ball.key] = to_double(root_degree_pmf(d));
    }
    for (auto& [key, count] : census.counts) {
      const double emp = static_cast<double>(count) / static_cast<double>(census.total);
      auto it = limit_by_key.find(key);
      tv += std::abs(emp - (it == limit_by_key.end() ? 0.0 : it->second));
      if (it != limit_by_key.end()) limit_by_key.erase(it);
    }
    for (auto& [key, p] : limit_by_key) tv += p;
    out.push_back(checks::approx("census l=1 n=1000 TV to limit", 0.0, tv / 2, 0.05));
  }
  // Truncated limit sampler: root degree matches the pmf.
  {
    Rng rng(Rng::derive(seed, 4));
    const std::uint64_t k = slow ? 100000 : 20000;
    std::vector<std::uint64_t> hist(4, 0);
    for (std::uint64_t i = 0; i < k; ++i) {
      const auto s = sample_limit_ball(1, 40, rng);
      const std::size_t d = s.ball.children[0].size();
      ++hist[std::min<std::size_t>(d, 3)];
    }
    const double p1 = to_double(root_degree_pmf(1));
    const double emp = static_cast<double>(hist[1]) / static_cast<double>(k);
    const double sigma = std::sqrt(p1 * (1 - p1) / static_cast<double>(k));
    out.push_back(checks::approx("limit sampler P(root degree 1)", p1, emp, 4 * sigma));
  }
  return out;
}

inline bool all_pass(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace degtree
