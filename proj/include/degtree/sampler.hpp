#pragma once

#include "degtree/exact.hpp"
#include "degtree/oracle.hpp"
#include "degtree/rng.hpp"
#include "degtree/tree.hpp"
#include "degtree/weights.hpp"

#include <cassert>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace degtree {

enum class SampleMethod { chain, direct };
enum class DirectMethod { auto_select, dp, rejection };

struct SamplerConfig {
  int n = 2;
  SampleMethod method = SampleMethod::direct;
  std::uint64_t seed = 0;
  std::uint64_t count = 1;  // trees to emit
  // chain parameters
  std::uint64_t steps = 0;    // 0: derived from count/burnin/thin
  std::uint64_t burnin = 0;   // 0: default 50 * n * ln n
  std::uint64_t thin = 1;
  // direct parameters
  DirectMethod direct_method = DirectMethod::auto_select;
  int threads = 1;

  std::uint64_t effective_burnin() const {
    if (burnin > 0) return burnin;
    return static_cast<std::uint64_t>(50.0 * n * std::max(1.0, std::log(static_cast<double>(n))));
  }
  std::uint64_t effective_steps() const {
    const std::uint64_t b = effective_burnin();
    if (steps > 0) {
      if (thin < 1 || b >= steps) throw std::invalid_argument("SamplerConfig: need burnin < steps, thin >= 1");
      return steps;
    }
    return b + count * thin;
  }
};

struct SampleBatch {
  SamplerConfig config;
  std::vector<LabeledTree> trees;
};

// --- Edge-rewiring chain -----------------------------------------------

// Mutable chain state: the tree lives in adjacency-list form, edges are
// tracked by index so a step is O(max degree).
class ChainState {
 public:
  ChainState(LabeledTree start, std::uint64_t seed)
      : n_(start.n), edges_(start.edges), adj_(start.adj), rng_(seed) {}

  static ChainState path_start(int n, std::uint64_t seed) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return ChainState(LabeledTree(n, std::move(e)), seed);
  }

  // One transition: uniform oriented edge (X, V_old), uniform neighbor
  // V_new of V_old; V_new == X leaves the state unchanged.
  void step() {
    ++steps_;
    if (n_ < 3) return;  // single edge: the proposal is always rejected
    const std::uint64_t pick = rng_.below(2ULL * (n_ - 1));
    const std::size_t ei = pick >> 1;
    auto [a, b] = edges_[ei];
    const int mover = (pick & 1) ? a : b;   // X
    const int pivot = (pick & 1) ? b : a;   // V_old
    const int vnew = adj_[pivot][rng_.below(adj_[pivot].size())];
    if (vnew == mover) return;
    detach(mover, pivot);
    attach(mover, vnew);
    edges_[ei] = {mover, vnew};
    if ((steps_ & 0xffff) == 0) assert(valid());
  }

  std::uint64_t steps() const { return steps_; }
  LabeledTree tree() const { return LabeledTree(n_, edges_); }

  bool valid() const {
    try {
      LabeledTree check(n_, edges_);
    } catch (const std::invalid_argument&) {
      return false;
    }
    return true;
  }

 private:
  void detach(int u, int v) {
    erase(adj_[u], v);
    erase(adj_[v], u);
  }
  void attach(int u, int v) {
    adj_[u].push_back(v);
    adj_[v].push_back(u);
  }
  static void erase(std::vector<int>& a, int x) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] == x) {
        a[i] = a.back();
        a.pop_back();
        return;
      }
    throw std::logic_error("ChainState: edge bookkeeping broken");
  }

  int n_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adj_;
  Rng rng_;
  std::uint64_t steps_ = 0;
};

inline SampleBatch sample_chain(const SamplerConfig& cfg) {
  if (cfg.method != SampleMethod::chain) throw std::invalid_argument("sample_chain: wrong method");
  if (cfg.thin < 1) throw std::invalid_argument("sample_chain: thin must be >= 1");
  const std::uint64_t burnin = cfg.effective_burnin();
  const std::uint64_t steps = cfg.effective_steps();
  ChainState s = ChainState::path_start(cfg.n, cfg.seed);
  SampleBatch batch{cfg, {}};
  for (std::uint64_t i = 1; i <= steps; ++i) {
    s.step();
    if (i > burnin && (i - burnin) % cfg.thin == 0) batch.trees.push_back(s.tree());
  }
  return batch;
}

// --- Exact one-step kernel ---------------------------------------------

// Sparse row: resulting-tree rank -> exact transition probability.
using KernelRow = std::map<std::uint64_t, ExactQ>;

inline KernelRow transition_row(const LabeledTree& t) {
  const int n = t.n;
  KernelRow row;
  const ExactQ edge_pick(1, 2 * (n - 1));
  for (std::size_t ei = 0; ei < t.edges.size(); ++ei) {
    auto [a, b] = t.edges[ei];
    for (int orient = 0; orient < 2; ++orient) {
      const int mover = orient ? a : b;
      const int pivot = orient ? b : a;
      const ExactQ p = edge_pick / static_cast<int>(t.adj[pivot].size());
      for (int vnew : t.adj[pivot]) {
        if (vnew == mover) {
          row[code_to_rank(prufer_encode(t))] += p;
          continue;
        }
        std::vector<std::pair<int, int>> e2 = t.edges;
        e2[ei] = {mover, vnew};
        row[code_to_rank(prufer_encode(LabeledTree(n, std::move(e2))))] += p;
      }
    }
  }
  return row;
}

// Full exact kernel, indexed by Prufer rank; sparse rows.
inline std::vector<KernelRow> transition_matrix(int n, int max_n = 7) {
  if (n < 2) throw std::domain_error("transition_matrix: n must be >= 2");
  if (n > max_n) throw std::length_error("transition_matrix: state space too large");
  if (n == 2) return {KernelRow{{0, ExactQ(1)}}};
  const std::uint64_t count = code_count(n);
  std::vector<KernelRow> rows;
  rows.reserve(count);
  for (std::uint64_t r = 0; r < count; ++r) rows.push_back(transition_row(prufer_decode(rank_to_code(n, r))));
  return rows;
}

struct KernelReport {
  int n = 0;
  bool rows_sum_to_one = false;
  bool stationary = false;        // Pi P = Pi exactly
  bool detailed_balance = false;  // Pi(T) P(T,T') = Pi(T') P(T',T)
  bool irreducible = false;
  bool aperiodic = false;         // P(T,T) > 0 everywhere
  bool ok() const { return rows_sum_to_one && stationary && detailed_balance && irreducible && aperiodic; }
};

inline KernelReport exact_kernel_analysis(int n, int max_n = 6) {
  if (n > max_n) throw std::length_error("exact_kernel_analysis: n too large");
  const auto P = transition_matrix(n, max_n);
  const ExactEnsemble e = enumerate_all(n);
  const std::uint64_t count = e.weights.size();
  KernelReport rep;
  rep.n = n;
  rep.rows_sum_to_one = true;
  rep.aperiodic = true;
  for (std::uint64_t i = 0; i < count; ++i) {
    ExactQ s = 0;
    for (auto& [j, p] : P[i]) s += p;
    if (s != 1) rep.rows_sum_to_one = false;
    auto self = P[i].find(i);
    if (self == P[i].end() || self->second <= 0) rep.aperiodic = false;
  }
  // Stationarity: (Pi P)_j = Pi_j with Pi_i = w_i / total.
  std::vector<ExactQ> acc(count, 0);
  for (std::uint64_t i = 0; i < count; ++i)
    for (auto& [j, p] : P[i]) acc[j] += ExactQ(e.weights[i], e.total) * p;
  rep.stationary = true;
  for (std::uint64_t j = 0; j < count; ++j)
    if (acc[j] != ExactQ(e.weights[j], e.total)) rep.stationary = false;
  // Detailed balance over all nonzero entries.
  rep.detailed_balance = true;
  for (std::uint64_t i = 0; i < count; ++i)
    for (auto& [j, p] : P[i]) {
      ExactQ back = 0;
      auto it = P[j].find(i);
      if (it != P[j].end()) back = it->second;
      if (ExactQ(e.weights[i], e.total) * p != ExactQ(e.weights[j], e.total) * back)
        rep.detailed_balance = false;
    }
  // Irreducibility: one communicating class via BFS on nonzero entries.
  std::vector<char> vis(count, 0);
  std::vector<std::uint64_t> stack{0};
  vis[0] = 1;
  std::uint64_t reached = 1;
  while (!stack.empty()) {
    const std::uint64_t i = stack.back();
    stack.pop_back();
    for (auto& [j, p] : P[i])
      if (p > 0 && !vis[j]) {
        vis[j] = 1;
        stack.push_back(j);
        ++reached;
      }
  }
  rep.irreducible = reached == count;
  return rep;
}

// --- Degree-sequence samplers ------------------------------------------

// f(i,s): weighted count sum over (d_1..d_i), d_j >= 1, sum d_j = s, of
// prod d_j. Closed form C(s+i-1, s-i); the product-sum identity ties this
// to the DP recurrence f(i,s) = sum_d d * f(i-1, s-d).
inline Int degree_dp_f(long long i, long long s) { return binomial(s + i - 1, s - i); }

// Exact sequential conditional sampling of (d_1..d_n) with
// P((d_i)) = prod d_i / C(3n-3, n-2).
inline std::vector<int> sample_degree_sequence_dp(int n, Rng& rng) {
  if (n < 2) throw std::domain_error("sample_degree_sequence_dp: n must be >= 2");
  std::vector<int> d(n);
  long long s = 2LL * n - 2;
  Int f = degree_dp_f(n, s);  // C(3n-3, n-2)
  for (int i = n; i >= 2; --i) {
    // P(d = x | i nodes left, sum s) = x * f(i-1, s-x) / f(i,s)
    const ExactQ u(rng.below_big(f));
    // w_x = x * f(i-1, s-x); walk x = 1,2,... with exact ratio updates.
    ExactQ w = ExactQ(f) * (2 * i - 1) * (2 * i - 2) / ((s + i - 1) * (s + i - 2));  // w_1
    ExactQ cum = w;
    long long x = 1;
    while (cum <= u) {
      // w_{x+1} / w_x = ((x+1)/x) * (s-x-i+1) / (s-x+i-2)
      w *= ExactQ(Int(x + 1) * (s - x - i + 1), Int(x) * (s - x + i - 2));
      ++x;
      cum += w;
    }
    d[n - i] = static_cast<int>(x);
    // New table value f(i-1, s-x) = w_x / x (an integer).
    const ExactQ fq = w / x;
    f = boost::multiprecision::numerator(fq);
    if (boost::multiprecision::denominator(fq) != 1)
      throw std::logic_error("sample_degree_sequence_dp: nonintegral table value");
    s -= x;
  }
  if (s < 1) throw std::logic_error("sample_degree_sequence_dp: invalid remainder");
  d[n - 1] = static_cast<int>(s);
  return d;
}

// Rejection sampler: d_i - 1 i.i.d. with P(g = k) = (4/9)(k+1) 3^{-k}
// (a sum of two Geometric(2/3) variables), accepted when sum d_i = 2n-2.
inline std::vector<int> sample_degree_sequence_rejection(int n, Rng& rng) {
  if (n < 2) throw std::domain_error("sample_degree_sequence_rejection: n must be >= 2");
  auto geometric = [&rng]() {
    // P(G = k) = (2/3)(1/3)^k, k >= 0
    return static_cast<long long>(std::floor(std::log1p(-rng.uniform01()) / std::log(1.0 / 3.0)));
  };
  std::vector<int> d(n);
  while (true) {
    long long sum = 0;
    for (int i = 0; i < n; ++i) {
      const long long g = geometric() + geometric();
      d[i] = static_cast<int>(g + 1);
      sum += d[i];
    }
    if (sum == 2LL * n - 2) return d;
  }
}

inline std::vector<int> sample_degree_sequence(int n, Rng& rng,
                                               DirectMethod m = DirectMethod::auto_select) {
  if (m == DirectMethod::auto_select) m = n <= 2000 ? DirectMethod::dp : DirectMethod::rejection;
  return m == DirectMethod::dp ? sample_degree_sequence_dp(n, rng)
                               : sample_degree_sequence_rejection(n, rng);
}

// --- Direct sampler ----------------------------------------------------

// One exact draw from Pi_n: sample degrees, shuffle the multiset
// {i repeated d_i - 1 times} into a Prufer code, decode.
inline LabeledTree sample_direct_one(int n, Rng& rng, DirectMethod m = DirectMethod::auto_select) {
  if (n == 2) return prufer_decode(PruferCode(2, {}));
  const std::vector<int> d = sample_degree_sequence(n, rng, m);
  std::vector<int> code;
  code.reserve(n - 2);
  for (int i = 0; i < n; ++i)
    for (int j = 1; j < d[i]; ++j) code.push_back(i);
  for (std::size_t i = code.size(); i > 1; --i) std::swap(code[i - 1], code[rng.below(i)]);
  return prufer_decode(PruferCode(n, std::move(code)));
}

// Streams `count` i.i.d. draws to `sink` in sample-index order. Each draw
// has its own substream, so thread scheduling cannot change the output.
inline void sample_direct_stream(const SamplerConfig& cfg,
                                 const std::function<void(std::uint64_t, const LabeledTree&)>& sink) {
  const int threads = std::max(1, cfg.threads);
  if (threads == 1) {
    for (std::uint64_t i = 0; i < cfg.count; ++i) {
      Rng rng(Rng::derive(cfg.seed, i));
      sink(i, sample_direct_one(cfg.n, rng, cfg.direct_method));
    }
    return;
  }
  std::vector<std::vector<LabeledTree>> parts(threads);
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t]() {
      for (std::uint64_t i = t; i < cfg.count; i += threads) {
        Rng rng(Rng::derive(cfg.seed, i));
        parts[t].push_back(sample_direct_one(cfg.n, rng, cfg.direct_method));
      }
    });
  for (auto& th : pool) th.join();
  for (std::uint64_t i = 0; i < cfg.count; ++i) sink(i, parts[i % threads][i / threads]);
}

inline SampleBatch sample_direct(const SamplerConfig& cfg) {
  if (cfg.method != SampleMethod::direct) throw std::invalid_argument("sample_direct: wrong method");
  SampleBatch batch{cfg, {}};
  batch.trees.reserve(cfg.count);
  sample_direct_stream(cfg, [&](std::uint64_t, const LabeledTree& t) { batch.trees.push_back(t); });
  return batch;
}

inline SampleBatch sample(const SamplerConfig& cfg) {
  return cfg.method == SampleMethod::chain ? sample_chain(cfg) : sample_direct(cfg);
}

}  // namespace degtree
