#pragma once

#include "degtree/exact.hpp"
#include "degtree/forest.hpp"
#include "degtree/tree.hpp"
#include "degtree/weights.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

namespace degtree {

// Rank <-> Prufer code bijection, lexicographic (code read as a base-n
// number, most significant digit first). Test failures can cite a rank.
inline std::uint64_t code_count(int n) {
  std::uint64_t c = 1;
  for (int i = 0; i < n - 2; ++i) c *= static_cast<std::uint64_t>(n);
  return c;
}

inline PruferCode rank_to_code(int n, std::uint64_t rank) {
  std::vector<int> code(n - 2);
  for (int i = n - 3; i >= 0; --i) {
    code[i] = static_cast<int>(rank % n);
    rank /= n;
  }
  return PruferCode(n, std::move(code));
}

inline std::uint64_t code_to_rank(const PruferCode& c) {
  std::uint64_t rank = 0;
  for (int x : c.code) rank = rank * c.n + x;
  return rank;
}

// Complete enumeration of all n^(n-2) labeled trees with their weights.
struct ExactEnsemble {
  int n = 0;
  std::vector<Int> weights;  // indexed by Prufer rank
  Int total = 0;             // equals constant_C(n)

  LabeledTree tree(std::uint64_t rank) const { return prufer_decode(rank_to_code(n, rank)); }
};

inline ExactEnsemble enumerate_all(int n, int max_n = 8) {
  if (n < 2) throw std::domain_error("enumerate_all: n must be >= 2");
  if (n > max_n) throw std::length_error("enumerate_all: n too large for exhaustive enumeration");
  ExactEnsemble e;
  e.n = n;
  const std::uint64_t count = code_count(n);
  e.weights.reserve(count);
  for (std::uint64_t r = 0; r < count; ++r) {
    const Int w = tree_weight(prufer_decode(rank_to_code(n, r)));
    e.weights.push_back(w);
    e.total += w;
  }
  return e;
}

// Pi-weighted exact expectation of an integer statistic.
inline ExactQ exact_expectation(const ExactEnsemble& e,
                                const std::function<Int(const LabeledTree&)>& f) {
  Int acc = 0;
  for (std::uint64_t r = 0; r < e.weights.size(); ++r) acc += e.weights[r] * f(e.tree(r));
  return ExactQ(acc, e.total);
}

// Full exact distribution of a keyed statistic.
template <typename Key>
std::map<Key, ExactQ> exact_distribution(const ExactEnsemble& e,
                                         const std::function<Key(const LabeledTree&)>& f) {
  std::map<Key, Int> acc;
  for (std::uint64_t r = 0; r < e.weights.size(); ++r) acc[f(e.tree(r))] += e.weights[r];
  std::map<Key, ExactQ> out;
  for (auto& [k, w] : acc) out.emplace(k, ExactQ(w, e.total));
  return out;
}

// X_S^F indicator against a concrete tree: every forest edge present
// between the mapped hosts and every host degree exactly d_i^F + r_i.
// Hosts come from the forest's labels (or identity 0..m-1 when unlabeled).
inline bool forest_indicator(const LabeledTree& t, const DecoratedForest& f) {
  std::vector<int> host(f.m);
  for (int i = 0; i < f.m; ++i) {
    host[i] = f.labels.empty() ? i : f.labels[i];
    if (host[i] < 0 || host[i] >= t.n) return false;
  }
  for (int i = 0; i < f.m; ++i)
    if (t.degree(host[i]) != f.deg[i] + f.r[i]) return false;
  for (auto& [u, v] : f.edges) {
    bool found = false;
    for (int w : t.adj[host[u]])
      if (w == host[v]) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

// Oracle counterpart of forest_probability: Pi-weighted fraction of trees
// carrying F on its labeled hosts.
inline ExactQ oracle_forest_probability(const ExactEnsemble& e, const DecoratedForest& f) {
  return exact_expectation(e, [&](const LabeledTree& t) { return Int(forest_indicator(t, f) ? 1 : 0); });
}

inline ExactQ oracle_conditional_forest_probability(const ExactEnsemble& e,
                                                    const DecoratedForest& f1,
                                                    const DecoratedForest& f2) {
  Int both = 0, cond = 0;
  for (std::uint64_t r = 0; r < e.weights.size(); ++r) {
    const LabeledTree t = e.tree(r);
    if (!forest_indicator(t, f2)) continue;
    cond += e.weights[r];
    if (forest_indicator(t, f1)) both += e.weights[r];
  }
  if (cond == 0) throw std::domain_error("oracle_conditional_forest_probability: null conditioning event");
  return ExactQ(both, cond);
}

}  // namespace degtree
