#pragma once

#include <algorithm>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace degtree {

// Labeled tree on nodes 0..n-1, stored as an edge list plus adjacency
// index. Connectivity/acyclicity is verified on construction.
struct LabeledTree {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<int>> adj;

  LabeledTree() = default;
  LabeledTree(int n_, std::vector<std::pair<int, int>> edges_)
      : n(n_), edges(std::move(edges_)) {
    if (n < 1) throw std::invalid_argument("LabeledTree: n must be >= 1");
    if (static_cast<int>(edges.size()) != n - 1)
      throw std::invalid_argument("LabeledTree: expected n-1 edges");
    adj.assign(n, {});
    std::set<std::pair<int, int>> seen;
    for (auto& [u, v] : edges) {
      if (u < 0 || u >= n || v < 0 || v >= n)
        throw std::invalid_argument("LabeledTree: node out of range");
      if (u == v) throw std::invalid_argument("LabeledTree: self-loop");
      if (!seen.insert(std::minmax(u, v)).second)
        throw std::invalid_argument("LabeledTree: duplicate edge");
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    // n-1 edges and no duplicates: connected iff acyclic; check by BFS.
    std::vector<int> stack{0}, dist(n, -1);
    dist[0] = 0;
    int reached = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int w : adj[u])
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          stack.push_back(w);
          ++reached;
        }
    }
    if (reached != n) throw std::invalid_argument("LabeledTree: not connected");
  }

  int degree(int v) const { return static_cast<int>(adj[v].size()); }
};

inline std::vector<int> degree_sequence(const LabeledTree& t) {
  std::vector<int> d(t.n);
  for (int i = 0; i < t.n; ++i) d[i] = t.degree(i);
  return d;
}

struct PruferCode {
  int n = 0;
  std::vector<int> code;

  PruferCode() = default;
  PruferCode(int n_, std::vector<int> code_) : n(n_), code(std::move(code_)) {
    if (n < 2) throw std::invalid_argument("PruferCode: n must be >= 2");
    if (static_cast<int>(code.size()) != n - 2)
      throw std::invalid_argument("PruferCode: expected n-2 labels");
    for (int x : code)
      if (x < 0 || x >= n) throw std::invalid_argument("PruferCode: label out of range");
  }
};

// Linear-time decode with the smallest-leaf convention. Node i ends up with
// degree 1 + (occurrences of i in the code).
inline LabeledTree prufer_decode(const PruferCode& c) {
  const int n = c.n;
  std::vector<int> deg(n, 1);
  for (int x : c.code) ++deg[x];
  std::vector<std::pair<int, int>> edges;
  edges.reserve(n - 1);
  int ptr = 0;
  while (deg[ptr] != 1) ++ptr;
  int leaf = ptr;
  for (int x : c.code) {
    edges.emplace_back(leaf, x);
    if (--deg[x] == 1 && x < ptr) {
      leaf = x;
    } else {
      while (deg[++ptr] != 1) {}
      leaf = ptr;
    }
  }
  edges.emplace_back(leaf, n - 1);
  return LabeledTree(n, std::move(edges));
}

inline PruferCode prufer_encode(const LabeledTree& t) {
  if (t.n < 2) throw std::domain_error("prufer_encode: n must be >= 2");
  const int n = t.n;
  std::vector<int> deg(n);
  std::vector<std::vector<int>> adj = t.adj;
  for (int i = 0; i < n; ++i) deg[i] = t.degree(i);
  std::vector<char> removed(n, 0);
  std::vector<int> code;
  code.reserve(n - 2);
  int ptr = 0;
  while (deg[ptr] != 1) ++ptr;
  int leaf = ptr;
  for (int step = 0; step < n - 2; ++step) {
    int parent = -1;
    for (int w : adj[leaf])
      if (!removed[w]) {
        parent = w;
        break;
      }
    code.push_back(parent);
    removed[leaf] = 1;
    if (--deg[parent] == 1 && parent < ptr) {
      leaf = parent;
    } else {
      while (deg[++ptr] != 1 || removed[ptr]) {}
      leaf = ptr;
    }
  }
  return PruferCode(n, std::move(code));
}

}  // namespace degtree
