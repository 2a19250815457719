#pragma once

#include "degtree/ball.hpp"
#include "degtree/exact.hpp"
#include "degtree/forest.hpp"
#include "degtree/rng.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace degtree {

// p(T_x^l) = 9 (4/27)^{sum_{j<l} t_j} * (t_l / 3^{t_l}) * (1/|Aut|) *
// prod_{depth < l} d_j!. Depth-0 balls have p = 1 by convention; balls that
// fail to reach depth l have p = 0 (finite trees are null in the limit).
inline ExactQ limit_ball_probability(const RootedBall& b) {
  const int l = b.radius;
  if (l == 0) return 1;
  const int t_l = b.level_size(l);
  if (t_l == 0) return 0;
  long long shallow = 0;  // sum_{j=0}^{l-1} t_j
  for (int j = 0; j < l; ++j) shallow += b.level_size(j);
  Int dfact = 1;
  for (int v = 0; v < b.size(); ++v)
    if (b.depth[v] < l) dfact *= factorial(b.degree_in_ball(v));
  ExactQ p = ExactQ(9) * q_pow(ExactQ(4, 27), static_cast<unsigned>(shallow));
  p *= ExactQ(Int(t_l) * dfact, boost::multiprecision::pow(Int(3), t_l) * aut_count(b));
  return p;
}

inline LogWeight limit_ball_probability_log(const RootedBall& b) {
  const int l = b.radius;
  if (l == 0) return LogWeight::from_double(1.0);
  const int t_l = b.level_size(l);
  if (t_l == 0) return {};
  long long shallow = 0;
  for (int j = 0; j < l; ++j) shallow += b.level_size(j);
  double lg = std::log(9.0) + shallow * (std::log(4.0) - std::log(27.0));
  lg += std::log(static_cast<double>(t_l)) - t_l * std::log(3.0);
  for (int v = 0; v < b.size(); ++v)
    if (b.depth[v] < l) lg += log_factorial(b.degree_in_ball(v));
  lg -= log_int(aut_count(b));
  return LogWeight::from_log(lg);
}

// Root-degree law of the limit: (4/3) * d * 3^{-d}.
inline ExactQ root_degree_pmf(int d) {
  if (d < 1) return 0;
  return ExactQ(Int(4) * d, Int(3) * boost::multiprecision::pow(Int(3), d));
}

namespace detail {

// Sum_{c=0}^{cap} (c+1) x^c and sum_{c=0}^{cap} c(c+1) x^c at x = 1/3;
// cap < 0 means the full series (both equal 9/4).
inline ExactQ child_series_a(int cap) {
  if (cap < 0) return ExactQ(9, 4);
  ExactQ s = 0, x = ExactQ(1, 3), p = 1;
  for (int c = 0; c <= cap; ++c, p *= x) s += ExactQ(c + 1) * p;
  return s;
}

inline ExactQ child_series_b(int cap) {
  if (cap < 0) return ExactQ(9, 4);
  ExactQ s = 0, x = ExactQ(1, 3), p = 1;
  for (int c = 0; c <= cap; ++c, p *= x) s += ExactQ(static_cast<long long>(c) * (c + 1)) * p;
  return s;
}

struct ShapeNode {
  std::vector<ShapeNode> kids;
  int height = 0;
  int size = 1;
};

// All rooted shapes of height <= h with every child count <= cap,
// deduplicated by construction (children chosen as nondecreasing index
// multisets over the recursive list).
inline void gen_shapes(int h, int cap, std::vector<ShapeNode>& out, std::size_t limit) {
  out.clear();
  out.push_back(ShapeNode{});
  if (h == 0) return;
  std::vector<ShapeNode> sub;
  gen_shapes(h - 1, cap, sub, limit);
  std::vector<int> pick;
  std::function<void(int, int)> rec = [&](int remaining, int lo) {
    if (remaining == 0) {
      if (pick.empty()) return;  // the bare node is already in `out`
      ShapeNode node;
      for (int idx : pick) {
        node.kids.push_back(sub[idx]);
        node.height = std::max(node.height, sub[idx].height + 1);
        node.size += sub[idx].size;
      }
      out.push_back(std::move(node));
      if (out.size() > limit) throw std::length_error("enumerate_balls: class-count limit exceeded");
      return;
    }
    for (int idx = lo; idx < static_cast<int>(sub.size()); ++idx) {
      pick.push_back(idx);
      rec(remaining - 1, idx);
      pick.pop_back();
    }
  };
  for (int c = 1; c <= cap; ++c) rec(c, 0);
}

inline void flatten(const ShapeNode& node, int parent, std::vector<int>& parents,
                    std::vector<const ShapeNode*>& queue_nodes) {
  // BFS so that parents precede children.
  parents.push_back(parent);
  queue_nodes.push_back(&node);
  for (std::size_t i = parents.size() - 1; i < queue_nodes.size(); ++i)
    for (const auto& kid : queue_nodes[i]->kids) {
      parents.push_back(static_cast<int>(i));
      queue_nodes.push_back(&kid);
    }
}

inline RootedBall shape_to_ball(const ShapeNode& root_shape, int radius) {
  std::vector<int> parents;
  std::vector<const ShapeNode*> nodes;
  flatten(root_shape, -1, parents, nodes);
  return make_ball(radius, std::move(parents));
}

}  // namespace detail

// Every depth-exactly-l rooted tree with all degrees <= max_degree, one
// representative per isomorphism class, sorted by canonical key.
inline std::vector<RootedBall> enumerate_balls(int l, int max_degree,
                                               std::size_t class_limit = 2000000) {
  if (l < 1 || max_degree < 1) throw std::domain_error("enumerate_balls: need l >= 1, D >= 1");
  std::vector<detail::ShapeNode> sub;
  detail::gen_shapes(l - 1, max_degree - 1, sub, class_limit);
  std::vector<RootedBall> out;
  std::vector<int> pick;
  std::function<void(int, int)> rec = [&](int remaining, int lo) {
    if (remaining == 0) {
      detail::ShapeNode root;
      for (int idx : pick) {
        root.kids.push_back(sub[idx]);
        root.height = std::max(root.height, sub[idx].height + 1);
      }
      if (root.height == l) {
        out.push_back(detail::shape_to_ball(root, l));
        if (out.size() > class_limit) throw std::length_error("enumerate_balls: class-count limit exceeded");
      }
      return;
    }
    for (int idx = lo; idx < static_cast<int>(sub.size()); ++idx) {
      pick.push_back(idx);
      rec(remaining - 1, idx);
      pick.pop_back();
    }
  };
  for (int a = 1; a <= max_degree; ++a) rec(a, 0);
  std::sort(out.begin(), out.end(), [](const RootedBall& x, const RootedBall& y) { return x.key < y.key; });
  return out;
}

struct ConsistencyResult {
  ExactQ lhs;         // p(b)
  ExactQ rhs;         // truncated sum over depth-(l+1) extensions
  ExactQ tail_bound;  // exact geometric remainder of the omitted classes
};

// Kolmogorov-style consistency: p(b) = sum over one-level extensions of b
// (new degrees <= max_degree) of their limit probabilities. The truncated
// sum is enumerated class-by-class; the reported tail bound is the closed
// form of the omitted remainder.
inline ConsistencyResult consistency_check(const RootedBall& b, int max_degree) {
  const int lm1 = b.radius;  // b has depth l-1; extensions have depth l
  ConsistencyResult res;
  res.lhs = limit_ball_probability(b);
  const auto bottom = b.nodes_at_level(lm1);
  const int t = static_cast<int>(bottom.size());
  if (t == 0) {
    res.rhs = 0;
    res.tail_bound = 0;
    return res;
  }
  const int cap = lm1 == 0 ? max_degree : max_degree - 1;  // children per bottom node
  // Enumerate child-count assignments, nondecreasing within sibling groups,
  // then deduplicate isomorphic extensions by canonical key.
  std::set<std::string> seen;
  std::vector<int> c(t, 0);
  auto build_and_add = [&]() {
    std::vector<int> parent = b.parent;
    for (int i = 0; i < t; ++i)
      for (int j = 0; j < c[i]; ++j) parent.push_back(bottom[i]);
    RootedBall ext = make_ball(lm1 + 1, std::move(parent));
    if (seen.insert(ext.key).second) res.rhs += limit_ball_probability(ext);
  };
  std::function<void(int)> rec = [&](int i) {
    if (i == t) {
      build_and_add();
      return;
    }
    const int lo = (i > 0 && b.parent[bottom[i]] == b.parent[bottom[i - 1]]) ? c[i - 1] : 0;
    for (int v = lo; v <= cap; ++v) {
      c[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  // Closed-form remainder: the raw-assignment representation of the full
  // sum factorizes per bottom node; the omitted part is a difference of
  // truncated geometric series.
  if (lm1 == 0) {
    // Extensions of the bare root are depth-1 balls with the root-degree law.
    ExactQ covered = 0;
    for (int d = 1; d <= max_degree; ++d) covered += root_degree_pmf(d);
    res.tail_bound = ExactQ(1) - covered;
    return res;
  }
  long long shallow = 0;
  for (int j = 0; j <= lm1; ++j) shallow += b.level_size(j);
  Int dfact = 1;
  for (int v = 0; v < b.size(); ++v)
    if (b.depth[v] < lm1) dfact *= factorial(b.degree_in_ball(v));
  ExactQ prefac = ExactQ(9) * q_pow(ExactQ(4, 27), static_cast<unsigned>(shallow));
  prefac *= ExactQ(dfact, aut_count(b));
  const ExactQ a_full = detail::child_series_a(-1), b_full = detail::child_series_b(-1);
  const ExactQ a_cap = detail::child_series_a(cap), b_cap = detail::child_series_b(cap);
  res.tail_bound = prefac * t *
                   (b_full * q_pow(a_full, t - 1) -
                    b_cap * q_pow(a_cap, t - 1));
  return res;
}

// Total truncated mass sum_{balls of depth exactly l, degrees <= D} p,
// computed exactly from the level generating values (u_j: unmarked subtree
// weight; v_j: subtree weight with one marked bottom node carrying the
// size-bias factor t_l).
inline ExactQ normalization_mass(int l, int max_degree) {
  if (l < 1 || max_degree < 1) throw std::domain_error("normalization_mass: need l >= 1, D >= 1");
  const int cap = max_degree - 1;
  ExactQ u = ExactQ(1, 3), v = ExactQ(1, 3);
  const ExactQ base(4, 27);
  for (int j = l - 1; j >= 1; --j) {
    ExactQ nu = 0, nv = 0, upow = 1;  // upow = u^c
    for (int c = 0; c <= cap; ++c) {
      nu += base * (c + 1) * upow;
      if (c >= 1) nv += base * ExactQ(static_cast<long long>(c) * (c + 1)) * v * upow / u;
      upow *= u;
    }
    u = nu;
    v = nv;
  }
  ExactQ mass = 0, upow = 1;
  for (int a = 1; a <= max_degree; ++a) {
    mass += ExactQ(a) * v * upow;
    upow *= u;
  }
  return ExactQ(9) * base * mass;
}

struct LimitSample {
  RootedBall ball;
  ExactQ truncated_mass;  // renormalization constant actually used
};

// Draw from the truncated limit measure (classes with degrees <= D,
// renormalized). Realized by a per-level categorical decomposition with a
// marked size-bias path, which reproduces the class probabilities without
// materializing the class list.
inline LimitSample sample_limit_ball(int l, int max_degree, Rng& rng, double mass_epsilon = 1e-3) {
  if (l < 1 || max_degree < 1) throw std::domain_error("sample_limit_ball: need l >= 1, D >= 1");
  const ExactQ mass = normalization_mass(l, max_degree);
  if (to_double(ExactQ(1) - mass) > mass_epsilon)
    throw std::domain_error("sample_limit_ball: truncated mass deficit exceeds epsilon; increase max_degree");
  const int cap = max_degree - 1;
  const ExactQ base(4, 27);
  // u[j], v[j] for j = 1..l (values for a subtree hanging at depth j).
  std::vector<ExactQ> u(l + 1), v(l + 1);
  u[l] = v[l] = ExactQ(1, 3);
  for (int j = l - 1; j >= 1; --j) {
    ExactQ nu = 0, nv = 0, upow = 1;
    for (int c = 0; c <= cap; ++c) {
      nu += base * (c + 1) * upow;
      if (c >= 1) nv += base * ExactQ(static_cast<long long>(c) * (c + 1)) * v[j + 1] * upow / u[j + 1];
      upow *= u[j + 1];
    }
    u[j] = nu;
    v[j] = nv;
  }
  // Children counts per node, built level by level. Each entry: (depth, marked).
  std::vector<int> parent{-1};
  std::vector<std::pair<int, bool>> info{{0, true}};
  // Root: degree a with weight a * v1 * u1^{a-1}.
  {
    std::vector<ExactQ> w;
    ExactQ upow = 1;
    for (int a = 1; a <= max_degree; ++a) {
      w.push_back(ExactQ(a) * v[1] * upow);
      upow *= u[1];
    }
    const int a = static_cast<int>(rng.categorical(w)) + 1;
    const std::uint64_t marked = rng.below(a);
    for (int i = 0; i < a; ++i) {
      parent.push_back(0);
      info.emplace_back(1, static_cast<std::uint64_t>(i) == marked);
    }
  }
  for (std::size_t i = 1; i < parent.size(); ++i) {
    const auto [depth, marked] = info[i];
    if (depth == l) continue;
    std::vector<ExactQ> w;
    int offset;  // child count corresponding to weight index 0
    if (marked) {
      offset = 1;
      ExactQ upow = 1;
      for (int c = 1; c <= cap; ++c) {
        w.push_back(ExactQ(static_cast<long long>(c) * (c + 1)) * v[depth + 1] * upow);
        upow *= u[depth + 1];
      }
    } else {
      offset = 0;
      ExactQ upow = 1;
      for (int c = 0; c <= cap; ++c) {
        w.push_back(ExactQ(c + 1) * upow);
        upow *= u[depth + 1];
      }
    }
    const int c = static_cast<int>(rng.categorical(w)) + offset;
    const std::uint64_t mark_at = marked && c > 0 ? rng.below(static_cast<std::uint64_t>(c)) : 0;
    for (int k = 0; k < c; ++k) {
      parent.push_back(static_cast<int>(i));
      info.emplace_back(depth + 1, marked && static_cast<std::uint64_t>(k) == mark_at);
    }
  }
  return LimitSample{make_ball(l, std::move(parent)), mass};
}

struct DecoratedSumResult {
  ExactQ direct;      // limit_ball_probability(b)
  ExactQ summed;      // (1/|Aut|) * truncated sum of decorated densities
  ExactQ tail_bound;  // exact remainder of the omitted remainder-degree mass
};

// p(T_x^l) recovered by summing the per-decorated-tree limit density over
// bottom-level remainder degrees r_i <= D.
inline DecoratedSumResult decorated_sum_check(const RootedBall& b, int r_cap,
                                              std::size_t literal_limit = 2000000) {
  DecoratedSumResult res;
  res.direct = limit_ball_probability(b);
  const int l = b.radius;
  const int t = b.level_size(l);
  if (t == 0 || l == 0) {
    res.summed = res.direct;
    res.tail_bound = 0;
    return res;
  }
  const ExactQ aut(aut_count(b));
  long long all_levels = 0;
  for (int j = 0; j <= l; ++j) all_levels += b.level_size(j);
  Int dfact = 1;
  for (int vtx = 0; vtx < b.size(); ++vtx)
    if (b.depth[vtx] < l) dfact *= factorial(b.degree_in_ball(vtx));
  const ExactQ prefac = ExactQ(9) *
                        q_pow(ExactQ(4, 27), static_cast<unsigned>(all_levels)) *
                        ExactQ(dfact) / aut;

  double literal_cost = 1;
  for (int i = 0; i < t; ++i) literal_cost *= r_cap + 1;
  if (literal_cost <= static_cast<double>(literal_limit)) {
    // Literal sum over remainder-degree vectors through the density formula.
    std::vector<int> r(t, 0);
    ExactQ acc = 0;
    std::function<void(int)> rec = [&](int i) {
      if (i == t) {
        acc += limit_decorated_density(b, r);
        return;
      }
      for (int x = 0; x <= r_cap; ++x) {
        r[i] = x;
        rec(i + 1);
      }
    };
    rec(0);
    res.summed = acc / aut;
  } else {
    // Factorized truncated sum: sum_r (sum r_i) prod (r_i+1) 3^{-r_i}
    // = t * B_cap * A_cap^{t-1}.
    const ExactQ a_cap = detail::child_series_a(r_cap), b_cap = detail::child_series_b(r_cap);
    res.summed = prefac * t * b_cap * q_pow(a_cap, t - 1);
  }
  const ExactQ a_full = detail::child_series_a(-1), b_full = detail::child_series_b(-1);
  const ExactQ a_cap = detail::child_series_a(r_cap), b_cap = detail::child_series_b(r_cap);
  res.tail_bound = prefac * t *
                   (b_full * q_pow(a_full, t - 1) -
                    b_cap * q_pow(a_cap, t - 1));
  return res;
}

}  // namespace degtree
