#pragma once

#include "degtree/exact.hpp"

#include <cstdint>
#include <vector>

namespace degtree {

// Counter-based 64-bit generator (SplitMix64 output function applied to
// key + counter). Substreams derived by hashing (master, index) are
// independent of generation order, so parallel sampling by index is
// deterministic.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(finalize(seed ^ 0x5851f42d4c957f2dULL)) {}

  static std::uint64_t derive(std::uint64_t master, std::uint64_t index) {
    return finalize(master ^ finalize(index + 0x9e3779b97f4a7c15ULL));
  }

  std::uint64_t next() {
    const std::uint64_t z = key_ + (++counter_) * 0x9e3779b97f4a7c15ULL;
    return finalize(z);
  }

  // Uniform on [0, n), n >= 1. Rejection from the top of the range.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform big integer on [0, n), n >= 1, by bit-block rejection.
  Int below_big(const Int& n) {
    if (n <= 0) throw std::domain_error("Rng::below_big: n must be positive");
    if (n == 1) return 0;
    const unsigned bits = boost::multiprecision::msb(n) + 1;
    const unsigned words = (bits + 63) / 64;
    Int x;
    do {
      x = 0;
      for (unsigned i = 0; i < words; ++i) {
        x <<= 64;
        x |= Int(next());
      }
      x >>= words * 64 - bits;
    } while (x >= n);
    return x;
  }

  // Index i with probability w[i] / sum(w); weights are exact nonnegative
  // rationals with positive total.
  std::size_t categorical(const std::vector<ExactQ>& w) {
    ExactQ total = 0;
    for (const auto& x : w) total += x;
    if (total <= 0) throw std::domain_error("Rng::categorical: empty distribution");
    // Scale every weight to an integer over a common denominator, then draw
    // an exact uniform integer below the scaled total.
    Int scale = 1;
    for (const auto& x : w) {
      const Int d = boost::multiprecision::denominator(x);
      scale = boost::multiprecision::lcm(scale, d);
    }
    std::vector<Int> scaled(w.size());
    Int total_scaled = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      scaled[i] = boost::multiprecision::numerator(w[i]) *
                  (scale / boost::multiprecision::denominator(w[i]));
      total_scaled += scaled[i];
    }
    const Int u = below_big(total_scaled);
    Int cum = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      cum += scaled[i];
      if (u < cum) return i;
    }
    return w.size() - 1;  // unreachable for consistent weights
  }

 private:
  static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace degtree
