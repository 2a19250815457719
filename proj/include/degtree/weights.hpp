#pragma once

#include "degtree/exact.hpp"
#include "degtree/tree.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace degtree {

// Unnormalized weight prod_i d_i!.
inline Int tree_weight(const LabeledTree& t) {
  Int w = 1;
  for (int i = 0; i < t.n; ++i) w *= factorial(t.degree(i));
  return w;
}

// Normalizing constant C = (n-2)! * C(3n-3, n-2) = sum over all labeled
// trees of prod d_i!.
inline Int constant_C(int n) {
  if (n < 2) throw std::domain_error("constant_C: n must be >= 2");
  return factorial(n - 2) * binomial(3 * n - 3, n - 2);
}

inline ExactQ tree_probability(const LabeledTree& t) {
  if (t.n < 2) throw std::domain_error("tree_probability: n must be >= 2");
  return ExactQ(tree_weight(t), constant_C(t.n));
}

// Probability of an exact labeled degree sequence: prod d_i / C(3n-3, n-2).
inline ExactQ degree_sequence_probability(const std::vector<int>& d) {
  const int n = static_cast<int>(d.size());
  if (n < 2) throw std::domain_error("degree_sequence_probability: n must be >= 2");
  long long sum = 0;
  Int prod = 1;
  for (int x : d) {
    if (x < 1) throw std::domain_error("degree_sequence_probability: degrees must be >= 1");
    sum += x;
    prod *= x;
  }
  if (sum != 2LL * n - 2)
    throw std::domain_error("degree_sequence_probability: degrees must sum to 2n-2");
  return ExactQ(prod, binomial(3 * n - 3, n - 2));
}

// lhs: DP over compositions of m into n positive parts, summing prod d_i.
// rhs: the closed form C(n+m-1, m-n). Returns both for comparison.
inline std::pair<Int, Int> product_sum_identity(int n, int m) {
  if (n < 1) throw std::domain_error("product_sum_identity: n must be >= 1");
  if (m < n) return {0, 0};
  // f[s] after i rounds = sum over (d_1..d_i), d_j >= 1, sum = s, of prod d_j.
  std::vector<Int> f(m + 1, 0);
  f[0] = 1;
  for (int i = 1; i <= n; ++i) {
    std::vector<Int> g(m + 1, 0);
    for (int s = i; s <= m; ++s)
      for (int d = 1; s - d >= 0; ++d) {
        if (f[s - d] == 0) continue;
        g[s] += d * f[s - d];
      }
    f = std::move(g);
  }
  return {f[m], binomial(n + m - 1, m - n)};
}

// The joint-degree hypothesis M <= n+k-2 of the closed form.
inline bool joint_degree_in_hypothesis(int n, const std::vector<std::pair<int, int>>& a) {
  long long M = 0;
  for (auto& [v, x] : a) {
    (void)v;
    M += x;
  }
  return M <= static_cast<long long>(n) + static_cast<long long>(a.size()) - 2;
}

// P(d_{v_i} = x_i for i=1..k) = C(3n-M-k-3, n-M+k-2) / C(3n-3, n-2) * prod x_i.
// Unrealizable configurations (vanishing binomial) give 0.
inline ExactQ joint_degree_probability(int n, const std::vector<std::pair<int, int>>& a) {
  if (n < 2) throw std::domain_error("joint_degree_probability: n must be >= 2");
  const int k = static_cast<int>(a.size());
  if (k < 1 || k > n) throw std::domain_error("joint_degree_probability: bad vertex count");
  long long M = 0;
  Int prod = 1;
  std::vector<char> seen(n, 0);
  for (auto& [v, x] : a) {
    if (v < 0 || v >= n) throw std::domain_error("joint_degree_probability: vertex out of range");
    if (seen[v]) throw std::domain_error("joint_degree_probability: repeated vertex");
    seen[v] = 1;
    if (x < 1) throw std::domain_error("joint_degree_probability: degree must be >= 1");
    M += x;
    prod *= x;
  }
  const long long upper = 3LL * n - M - k - 3;
  const long long lower = static_cast<long long>(n) - M + k - 2;
  if (upper < 0 || lower < 0) return 0;
  return ExactQ(binomial(upper, lower) * prod, binomial(3 * n - 3, n - 2));
}

// Asymptotic bound (1+delta) * (4/3) * (k/3^k) * n on P(D > k). Can exceed 1.
inline double max_degree_upper_tail_bound(int n, int k, double delta) {
  if (k < 1) throw std::domain_error("max_degree_upper_tail_bound: k must be >= 1");
  if (delta <= 0) throw std::domain_error("max_degree_upper_tail_bound: delta must be > 0");
  return (1.0 + delta) * (4.0 / 3.0) * (k * std::pow(3.0, -k)) * n;
}

// Bound (1/9) * sqrt(n) * exp(-n * (4/9) * (k+1) / 3^k) on P(D <= k).
inline double max_degree_lower_tail_bound(int n, int k) {
  if (k < 1) throw std::domain_error("max_degree_lower_tail_bound: k must be >= 1");
  return std::sqrt(static_cast<double>(n)) / 9.0 *
         std::exp(-n * (4.0 / 9.0) * (k + 1) * std::pow(3.0, -k));
}

// Whether k * C(3n-k-4, n-k-1) / C(3n-3, n-2) < (1+delta)(4/3) k / 3^k holds
// at this finite n: the pre-asymptotic inequality behind the upper-tail
// bound, checked exactly instead of assuming n is past n_0(delta).
inline bool upper_tail_prefactor_holds(int n, int k, double delta) {
  const ExactQ lhs(binomial(3 * n - k - 4, n - k - 1), binomial(3 * n - 3, n - 2));
  // Compare lhs < (1+delta)*(4/3)/3^k exactly with a rational delta proxy.
  const ExactQ rhs = ExactQ(4, 3) * (ExactQ(1) + ExactQ(static_cast<long long>(delta * 1e9), 1000000000)) /
                     boost::multiprecision::pow(Int(3), k);
  return lhs < rhs;
}

}  // namespace degtree
