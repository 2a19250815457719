#pragma once

#include "degtree/ball.hpp"
#include "degtree/exact.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace degtree {

// Labeled forest with per-node remainder degrees r_i. The component
// partition and the sums R_i, R are derived on construction. Optional
// labels identify nodes across forests for gluing.
struct DecoratedForest {
  int m = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> r;
  std::vector<int> labels;  // empty, or one label per node (injective)

  // derived
  std::vector<int> comp;            // component id per node, 0..c-1
  std::vector<std::vector<int>> components;
  std::vector<long long> comp_r_sum;  // R_i
  long long r_sum = 0;                // R
  std::vector<int> deg;               // d_j^F

  DecoratedForest() = default;
  DecoratedForest(int m_, std::vector<std::pair<int, int>> edges_, std::vector<int> r_,
                  std::vector<int> labels_ = {})
      : m(m_), edges(std::move(edges_)), r(std::move(r_)), labels(std::move(labels_)) {
    if (m < 1) throw std::invalid_argument("DecoratedForest: m must be >= 1");
    if (static_cast<int>(r.size()) != m)
      throw std::invalid_argument("DecoratedForest: one remainder degree per node");
    for (int x : r)
      if (x < 0) throw std::invalid_argument("DecoratedForest: remainder degrees must be >= 0");
    if (!labels.empty()) {
      if (static_cast<int>(labels.size()) != m)
        throw std::invalid_argument("DecoratedForest: one label per node");
      std::set<int> s(labels.begin(), labels.end());
      if (static_cast<int>(s.size()) != m)
        throw std::invalid_argument("DecoratedForest: labels must be injective");
    }
    deg.assign(m, 0);
    std::vector<int> dsu(m);
    std::iota(dsu.begin(), dsu.end(), 0);
    auto find = [&](int x) {
      while (dsu[x] != x) x = dsu[x] = dsu[dsu[x]];
      return x;
    };
    std::set<std::pair<int, int>> seen;
    for (auto& [u, v] : edges) {
      if (u < 0 || u >= m || v < 0 || v >= m)
        throw std::invalid_argument("DecoratedForest: node out of range");
      if (u == v) throw std::invalid_argument("DecoratedForest: self-loop");
      if (!seen.insert(std::minmax(u, v)).second)
        throw std::invalid_argument("DecoratedForest: duplicate edge");
      const int a = find(u), b = find(v);
      if (a == b) throw std::invalid_argument("DecoratedForest: cycle");
      dsu[a] = b;
      ++deg[u];
      ++deg[v];
    }
    std::map<int, int> root_to_comp;
    comp.assign(m, -1);
    for (int i = 0; i < m; ++i) {
      const int root = find(i);
      auto [it, inserted] = root_to_comp.try_emplace(root, static_cast<int>(components.size()));
      if (inserted) components.emplace_back();
      comp[i] = it->second;
      components[it->second].push_back(i);
    }
    comp_r_sum.assign(components.size(), 0);
    for (int i = 0; i < m; ++i) {
      comp_r_sum[comp[i]] += r[i];
      r_sum += r[i];
    }
  }

  int component_count() const { return static_cast<int>(components.size()); }
  bool is_tree() const { return component_count() == 1; }
};

struct GluedForest {
  DecoratedForest result;
  std::vector<int> map1;  // node index in f1 -> node index in result
  std::vector<int> map2;
};

// Identify equally labeled nodes of two decorated forests. Each node
// prescribes a host degree d_j^F + r_j; a shared label must prescribe the
// same host degree in both forests. The glued remainder at each node is
// its prescribed host degree minus its degree in the union, so that the
// glued forest describes exactly the intersection of the two events.
// Returns nullopt when the union has a cycle, matched host degrees differ,
// or the union's edges alone already exceed a prescribed degree.
inline std::optional<GluedForest> glue(const DecoratedForest& f1, const DecoratedForest& f2) {
  if (f1.labels.empty() || f2.labels.empty())
    throw std::invalid_argument("glue: both forests need labels");
  std::map<int, int> label_to_new;
  std::vector<int> map1(f1.m), map2(f2.m);
  std::vector<int> host_deg, new_labels;
  auto place = [&](int label, int d) -> std::optional<int> {
    auto it = label_to_new.find(label);
    if (it != label_to_new.end()) {
      if (host_deg[it->second] != d) return std::nullopt;  // prescribed degrees must agree
      return it->second;
    }
    const int idx = static_cast<int>(host_deg.size());
    label_to_new.emplace(label, idx);
    host_deg.push_back(d);
    new_labels.push_back(label);
    return idx;
  };
  for (int i = 0; i < f1.m; ++i) {
    auto idx = place(f1.labels[i], f1.deg[i] + f1.r[i]);
    if (!idx) return std::nullopt;
    map1[i] = *idx;
  }
  for (int j = 0; j < f2.m; ++j) {
    auto idx = place(f2.labels[j], f2.deg[j] + f2.r[j]);
    if (!idx) return std::nullopt;
    map2[j] = *idx;
  }
  const int new_m = static_cast<int>(host_deg.size());
  std::set<std::pair<int, int>> edge_set;
  for (auto& [u, v] : f1.edges) edge_set.insert(std::minmax(map1[u], map1[v]));
  for (auto& [u, v] : f2.edges) edge_set.insert(std::minmax(map2[u], map2[v]));
  std::vector<int> union_deg(new_m, 0);
  for (auto& [u, v] : edge_set) {
    ++union_deg[u];
    ++union_deg[v];
  }
  std::vector<int> new_r(new_m);
  for (int i = 0; i < new_m; ++i) {
    new_r[i] = host_deg[i] - union_deg[i];
    if (new_r[i] < 0) return std::nullopt;  // union forces a larger degree than prescribed
  }
  std::vector<std::pair<int, int>> new_edges(edge_set.begin(), edge_set.end());
  try {
    DecoratedForest g(new_m, std::move(new_edges), std::move(new_r), std::move(new_labels));
    return GluedForest{std::move(g), std::move(map1), std::move(map2)};
  } catch (const std::invalid_argument&) {
    return std::nullopt;  // cycle
  }
}

// H(r,F) = prod_i [ R_i * prod_{j in C_i} (d_j^F + r_j)! / r_j! ].
inline Int h_constant(const DecoratedForest& f) {
  Int h = 1;
  for (int i = 0; i < f.component_count(); ++i) {
    Int term = f.comp_r_sum[i];
    for (int j : f.components[i]) term *= rising_product(f.r[j] + 1, f.deg[j] + f.r[j]);
    h *= term;
  }
  return h;
}

// P(X_S^F = 1): probability that a fixed ordered vertex set carries F with
// host degrees d_{s_i} = d_i^F + r_i exactly. Unrealizable decorated
// configurations give 0.
inline ExactQ forest_probability(int n, const DecoratedForest& f) {
  if (n < f.m + 1) throw std::domain_error("forest_probability: need n >= m+1");
  const int m = f.m, c = f.component_count();
  const long long R = f.r_sum;
  if (n - m + c - 2 < 0) return 0;
  const long long upper = 3LL * n - R - 3 * m + 2 * c - 3;
  const long long lower = static_cast<long long>(n) - R - m + 2 * c - 2;
  if (upper < 0 || lower < 0) return 0;
  // (n-m+c-2)! / (n-2)! = 1 / ((n-m+c-1) * ... * (n-2))
  const Int fall = rising_product(n - m + c - 1, n - 2);
  return ExactQ(binomial(upper, lower) * h_constant(f), binomial(3 * n - 3, n - 2) * fall);
}

inline LogWeight forest_probability_log(int n, const DecoratedForest& f) {
  if (n < f.m + 1) throw std::domain_error("forest_probability_log: need n >= m+1");
  const int m = f.m, c = f.component_count();
  const long long R = f.r_sum;
  if (n - m + c - 2 < 0) return {};
  const long long upper = 3LL * n - R - 3 * m + 2 * c - 3;
  const long long lower = static_cast<long long>(n) - R - m + 2 * c - 2;
  if (upper < 0 || lower < 0 || lower > upper) return {};
  const Int h = h_constant(f);
  if (h == 0) return {};
  double lg = log_binomial(upper, lower) - log_binomial(3 * n - 3, n - 2) + log_int(h);
  lg += log_factorial(n - m + c - 2) - log_factorial(n - 2);
  return LogWeight::from_log(lg);
}

// P(X_{S1}^{F1} = 1 | X_{S2}^{F2} = 1) via the glued forest. No valid
// gluing gives 0; a probability-0 conditioning event is a domain error.
inline ExactQ conditional_forest_probability(int n, const DecoratedForest& f1,
                                             const DecoratedForest& f2) {
  const ExactQ p2 = forest_probability(n, f2);
  if (p2 == 0) throw std::domain_error("conditional_forest_probability: conditioning on a null event");
  auto glued = glue(f1, f2);
  if (!glued) return 0;
  return forest_probability(n, glued->result) / p2;
}

// E(X_n^T) = n(n-1)/(n-k) * C(3n-R-3k-1, n-R-k) / C(3n-3, n-2) * H(r,T)
// for a connected pattern tree T on k nodes.
inline ExactQ expected_subtree_count(int n, const DecoratedForest& t) {
  if (!t.is_tree()) throw std::domain_error("expected_subtree_count: pattern must be connected");
  const int k = t.m;
  if (n <= k) throw std::domain_error("expected_subtree_count: need n > k");
  const long long R = t.r_sum;
  const long long upper = 3LL * n - R - 3 * k - 1;
  const long long lower = static_cast<long long>(n) - R - k;
  if (upper < 0 || lower < 0) return 0;
  return ExactQ(Int(n) * (n - 1) * binomial(upper, lower) * h_constant(t),
                Int(n - k) * binomial(3 * n - 3, n - 2));
}

inline LogWeight expected_subtree_count_log(long long n, const DecoratedForest& t) {
  if (!t.is_tree()) throw std::domain_error("expected_subtree_count_log: pattern must be connected");
  const int k = t.m;
  if (n <= k) throw std::domain_error("expected_subtree_count_log: need n > k");
  const long long R = t.r_sum;
  const long long upper = 3LL * n - R - 3 * k - 1;
  const long long lower = n - R - k;
  if (upper < 0 || lower < 0 || lower > upper) return {};
  const Int h = h_constant(t);
  if (h == 0) return {};
  const double lg = std::log(static_cast<double>(n)) + std::log(static_cast<double>(n - 1)) -
                    std::log(static_cast<double>(n - k)) + log_binomial(upper, lower) -
                    log_binomial(3 * n - 3, n - 2) + log_int(h);
  return LogWeight::from_log(lg);
}

// Exact rational limit of E(X_n^T)/n as n -> infinity, for a pattern that
// is the shape of a depth-l ball with remainder degrees only on the bottom
// level: 9 (4/27)^{sum_{j<=l} t_j} * (sum_{i in T_l} r_i) *
// prod_{i in T_l} (r_i+1) / 3^{sum r_i} * prod_{j not in T_l} d_j!.
inline ExactQ limit_decorated_density(const RootedBall& b, const std::vector<int>& bottom_r) {
  const int l = b.radius;
  const auto bottom = b.nodes_at_level(l);
  if (bottom.size() != bottom_r.size())
    throw std::domain_error("limit_decorated_density: one remainder degree per bottom node");
  long long level_sum = 0;  // sum_{j=0}^{l} t_j = all nodes (depth <= l)
  for (int j = 0; j <= l; ++j) level_sum += b.level_size(j);
  long long rsum = 0;
  Int rprod = 1;
  for (std::size_t i = 0; i < bottom_r.size(); ++i) {
    if (bottom_r[i] < 0) throw std::domain_error("limit_decorated_density: r must be >= 0");
    rsum += bottom_r[i];
    rprod *= bottom_r[i] + 1;
  }
  Int dfact = 1;
  for (int v = 0; v < b.size(); ++v)
    if (b.depth[v] < l) dfact *= factorial(b.degree_in_ball(v));
  const ExactQ base = ExactQ(9) * q_pow(ExactQ(4, 27), static_cast<unsigned>(level_sum));
  return base * ExactQ(Int(rsum) * rprod * dfact, boost::multiprecision::pow(Int(3), static_cast<unsigned>(rsum)));
}

}  // namespace degtree
