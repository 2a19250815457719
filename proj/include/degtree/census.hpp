#pragma once

#include "degtree/ball.hpp"
#include "degtree/forest.hpp"
#include "degtree/sampler.hpp"
#include "degtree/tree.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace degtree {

// Tally of canonical l-ball shapes over every vertex of every processed
// tree (the empirical p(R, F, U(G_n))).
struct BallCensus {
  int radius = 0;
  std::map<std::string, std::uint64_t> counts;  // canonical key -> occurrences
  std::uint64_t total = 0;                      // n * trees processed
  std::uint64_t trees = 0;

  void add_tree(const LabeledTree& t) {
    for (int v = 0; v < t.n; ++v) ++counts[extract_ball(t, v, radius).key];
    total += static_cast<std::uint64_t>(t.n);
    ++trees;
  }

  void merge(const BallCensus& other) {
    for (auto& [k, c] : other.counts) counts[k] += c;
    total += other.total;
    trees += other.trees;
  }
};

inline BallCensus ball_census(const SampleBatch& batch, int radius) {
  BallCensus c;
  c.radius = radius;
  for (const auto& t : batch.trees) c.add_tree(t);
  return c;
}

inline double empirical_neighborhood_prob(const BallCensus& c, const RootedBall& b) {
  auto it = c.counts.find(b.key);
  if (it == c.counts.end() || c.total == 0) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(c.total);
}

// Number of ordered injective embeddings of a connected pattern tree with
// exact host degrees d_{s_i} = d_i^pattern + r_i. Backtracking over pattern
// nodes in BFS order from node 0.
inline std::uint64_t labeled_subgraph_count(const LabeledTree& t, const DecoratedForest& pattern,
                                            int max_k = 8) {
  if (!pattern.is_tree()) throw std::domain_error("labeled_subgraph_count: pattern must be connected");
  if (pattern.m > max_k) throw std::length_error("labeled_subgraph_count: pattern too large");
  const int k = pattern.m;
  // BFS order of pattern nodes and the parent of each in that order.
  std::vector<std::vector<int>> padj(k);
  for (auto& [u, v] : pattern.edges) {
    padj[u].push_back(v);
    padj[v].push_back(u);
  }
  std::vector<int> order{0}, parent_of(k, -1);
  std::vector<char> seen(k, 0);
  seen[0] = 1;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int w : padj[order[i]])
      if (!seen[w]) {
        seen[w] = 1;
        parent_of[w] = order[i];
        order.push_back(w);
      }
  std::vector<int> need(k);
  for (int i = 0; i < k; ++i) need[i] = pattern.deg[i] + pattern.r[i];

  std::vector<int> host(k, -1);
  std::vector<char> used(t.n, 0);
  std::uint64_t count = 0;
  std::function<void(std::size_t)> rec = [&](std::size_t pos) {
    if (pos == order.size()) {
      ++count;
      return;
    }
    const int p = order[pos];
    if (parent_of[p] < 0) {
      for (int v = 0; v < t.n; ++v) {
        if (t.degree(v) != need[p]) continue;
        host[p] = v;
        used[v] = 1;
        rec(pos + 1);
        used[v] = 0;
      }
      return;
    }
    for (int v : t.adj[host[parent_of[p]]]) {
      if (used[v] || t.degree(v) != need[p]) continue;
      host[p] = v;
      used[v] = 1;
      rec(pos + 1);
      used[v] = 0;
    }
  };
  rec(0);
  return count;
}

struct ConcentrationPoint {
  int n = 0;
  std::uint64_t samples = 0;
  double mean = 0;        // empirical mean of X/n
  double variance = 0;    // empirical variance of X/n
  double exact_mean = 0;  // E(X)/n from the closed form
  double mean_sigma = 0;  // standard error of the empirical mean
};

struct ConcentrationReport {
  std::vector<ConcentrationPoint> points;
  double variance_decay_exponent = 0;  // slope of log Var vs log n
};

// Monte Carlo check of concentration of X_n^T / n around its expectation.
inline ConcentrationReport concentration_experiment(const DecoratedForest& pattern,
                                                    const std::vector<int>& ns,
                                                    std::uint64_t samples_per_n, std::uint64_t seed,
                                                    int threads = 1,
                                                    DirectMethod method = DirectMethod::auto_select) {
  ConcentrationReport rep;
  for (std::size_t idx = 0; idx < ns.size(); ++idx) {
    const int n = ns[idx];
    SamplerConfig cfg;
    cfg.n = n;
    cfg.seed = Rng::derive(seed, idx);
    cfg.count = samples_per_n;
    cfg.threads = threads;
    cfg.direct_method = method;
    double sum = 0, sum2 = 0;
    sample_direct_stream(cfg, [&](std::uint64_t, const LabeledTree& t) {
      const double x = static_cast<double>(labeled_subgraph_count(t, pattern)) / n;
      sum += x;
      sum2 += x * x;
    });
    ConcentrationPoint pt;
    pt.n = n;
    pt.samples = samples_per_n;
    pt.mean = sum / samples_per_n;
    pt.variance = sum2 / samples_per_n - pt.mean * pt.mean;
    pt.exact_mean = to_double(expected_subtree_count(n, pattern) / n);
    pt.mean_sigma = std::sqrt(pt.variance / samples_per_n);
    rep.points.push_back(pt);
  }
  // Least-squares slope of log Var against log n.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (auto& p : rep.points) {
    if (p.variance <= 0) continue;
    const double x = std::log(static_cast<double>(p.n)), y = std::log(p.variance);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt >= 2) rep.variance_decay_exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  return rep;
}

}  // namespace degtree
