#pragma once

#include "degtree/exact.hpp"
#include "degtree/tree.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <vector>

namespace degtree {

// Rooted tree of bounded depth in BFS order (node 0 is the root, parents
// precede children). `radius` is the extraction depth l; the actual depth
// may be smaller when the source tree is exhausted first.
struct RootedBall {
  int radius = 0;
  std::vector<int> parent;  // parent[0] == -1
  std::vector<int> depth;
  std::vector<std::vector<int>> children;
  std::string key;  // canonical AHU form of the whole ball

  int size() const { return static_cast<int>(parent.size()); }

  int max_depth() const {
    int d = 0;
    for (int x : depth) d = std::max(d, x);
    return d;
  }

  // t_j: number of nodes at level j (0 beyond the actual depth).
  int level_size(int j) const {
    int c = 0;
    for (int x : depth)
      if (x == j) ++c;
    return c;
  }

  std::vector<int> nodes_at_level(int j) const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i)
      if (depth[i] == j) out.push_back(i);
    return out;
  }

  // Degree of node i inside the ball: child count plus the parent edge.
  int degree_in_ball(int i) const {
    return static_cast<int>(children[i].size()) + (i == 0 ? 0 : 1);
  }

  // True if some node at depth < radius has no children (a leaf of the
  // source tree strictly above the bottom level).
  bool has_interior_leaf() const {
    for (int i = 0; i < size(); ++i)
      if (depth[i] < radius && children[i].empty()) return true;
    return false;
  }
};

namespace detail {

inline std::string ahu_key(const RootedBall& b, int v, std::vector<std::string>* per_node) {
  std::vector<std::string> ks;
  ks.reserve(b.children[v].size());
  for (int c : b.children[v]) ks.push_back(ahu_key(b, c, per_node));
  std::sort(ks.begin(), ks.end());
  std::string out = "(";
  for (auto& k : ks) out += k;
  out += ")";
  if (per_node) (*per_node)[v] = out;
  return out;
}

}  // namespace detail

// AHU canonical form: equal keys iff rooted-isomorphic.
inline std::string canonical_key(const RootedBall& b) {
  return detail::ahu_key(b, 0, nullptr);
}

// Build a ball from a parent vector in BFS order; computes children lists,
// depths and the canonical key.
inline RootedBall make_ball(int radius, std::vector<int> parent) {
  RootedBall b;
  b.radius = radius;
  b.parent = std::move(parent);
  const int m = b.size();
  if (m == 0 || b.parent[0] != -1)
    throw std::invalid_argument("make_ball: node 0 must be the root");
  b.depth.assign(m, 0);
  b.children.assign(m, {});
  for (int i = 1; i < m; ++i) {
    if (b.parent[i] < 0 || b.parent[i] >= i)
      throw std::invalid_argument("make_ball: parents must precede children");
    b.depth[i] = b.depth[b.parent[i]] + 1;
    if (b.depth[i] > radius) throw std::invalid_argument("make_ball: node deeper than radius");
    b.children[b.parent[i]].push_back(i);
  }
  b.key = canonical_key(b);
  return b;
}

// Rooted l-ball around v: BFS truncated at depth l (trees have unique
// paths, so the induced subgraph is the truncated BFS tree).
inline RootedBall extract_ball(const LabeledTree& t, int v, int radius) {
  if (v < 0 || v >= t.n) throw std::invalid_argument("extract_ball: root out of range");
  if (radius < 0) throw std::invalid_argument("extract_ball: negative radius");
  std::vector<int> parent{-1}, dep{0};
  std::vector<int> src{v}, src_parent{-1};
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (dep[i] == radius) continue;
    for (int w : t.adj[src[i]]) {
      if (w == src_parent[i]) continue;
      parent.push_back(static_cast<int>(i));
      dep.push_back(dep[i] + 1);
      src.push_back(w);
      src_parent.push_back(src[i]);
    }
  }
  return make_ball(radius, std::move(parent));
}

// |Aut| of the rooted ball: product over nodes of the factorials of the
// multiplicities of identical child canonical keys.
inline Int aut_count(const RootedBall& b) {
  std::vector<std::string> per_node(b.size());
  detail::ahu_key(b, 0, &per_node);
  Int aut = 1;
  for (int v = 0; v < b.size(); ++v) {
    std::map<std::string, int> mult;
    for (int c : b.children[v]) ++mult[per_node[c]];
    for (auto& [k, m] : mult) {
      (void)k;
      aut *= factorial(m);
    }
  }
  return aut;
}

// Ball with the bottom level (nodes at depth `radius`) removed; radius
// drops by one.
inline RootedBall truncate_bottom(const RootedBall& b) {
  if (b.radius < 1) throw std::domain_error("truncate_bottom: radius must be >= 1");
  std::vector<int> parent;
  std::vector<int> remap(b.size(), -1);
  for (int i = 0; i < b.size(); ++i) {
    if (b.depth[i] >= b.radius) continue;
    remap[i] = static_cast<int>(parent.size());
    parent.push_back(i == 0 ? -1 : remap[b.parent[i]]);
  }
  return make_ball(b.radius - 1, std::move(parent));
}

}  // namespace degtree
