#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace degtree {

using Int = boost::multiprecision::cpp_int;
using ExactQ = boost::multiprecision::cpp_rational;

inline Int factorial(long long k) {
  if (k < 0) throw std::domain_error("factorial: negative argument");
  Int r = 1;
  for (long long i = 2; i <= k; ++i) r *= i;
  return r;
}

// C(a,b). Returns 0 for b < 0 or b > a; a must be nonnegative.
inline Int binomial(long long a, long long b) {
  if (a < 0) throw std::domain_error("binomial: negative upper index");
  if (b < 0 || b > a) return 0;
  if (b > a - b) b = a - b;
  Int r = 1;
  for (long long i = 1; i <= b; ++i) {
    r *= a - b + i;
    r /= i;
  }
  return r;
}

// Product of integers lo..hi; empty when hi == lo-1. Equals (hi)!/(lo-1)!.
inline Int rising_product(long long lo, long long hi) {
  if (lo < 1 || hi < lo - 1)
    throw std::domain_error("rising_product: require lo >= 1 and hi >= lo-1");
  Int r = 1;
  for (long long i = lo; i <= hi; ++i) r *= i;
  return r;
}

// Natural log of a positive big integer, via the top 64 bits.
inline double log_int(const Int& x) {
  if (x <= 0) throw std::domain_error("log_int: nonpositive argument");
  const auto bits = boost::multiprecision::msb(x);  // floor(log2 x)
  if (bits <= 52) return std::log(static_cast<double>(x.convert_to<std::uint64_t>()));
  const Int top = x >> (bits - 52);
  return std::log(static_cast<double>(top.convert_to<std::uint64_t>())) +
         static_cast<double>(bits - 52) * 0.6931471805599453;
}

// Safe double conversion for rationals whose numerator/denominator may
// individually overflow double range.
inline double to_double(const ExactQ& q) {
  if (q == 0) return 0.0;
  const Int num = boost::multiprecision::numerator(q);
  const Int den = boost::multiprecision::denominator(q);
  const double sign = num < 0 ? -1.0 : 1.0;
  return sign * std::exp(log_int(boost::multiprecision::abs(num)) - log_int(den));
}

inline double log_factorial(long long k) {
  if (k < 0) throw std::domain_error("log_factorial: negative argument");
  return std::lgamma(static_cast<double>(k) + 1.0);
}

inline double log_binomial(long long a, long long b) {
  if (a < 0) throw std::domain_error("log_binomial: negative upper index");
  if (b < 0 || b > a) throw std::domain_error("log_binomial: value is zero, log undefined");
  return log_factorial(a) - log_factorial(b) - log_factorial(a - b);
}

// Integer power of an exact rational.
inline ExactQ q_pow(const ExactQ& base, long long e) {
  if (e < 0) throw std::domain_error("q_pow: negative exponent");
  ExactQ r = 1, b = base;
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

// Nonnegative real carried in the log domain, for formula evaluation at n
// where exact rationals are too slow. Zero is tracked explicitly.
struct LogWeight {
  bool zero = true;
  double lg = 0.0;  // natural log; meaningful only when !zero

  LogWeight() = default;
  LogWeight(bool z, double l) : zero(z), lg(l) {}
  static LogWeight from_log(double l) { return LogWeight{false, l}; }
  static LogWeight from_double(double v) {
    if (v < 0) throw std::domain_error("LogWeight: negative value");
    return v == 0 ? LogWeight{} : LogWeight{false, std::log(v)};
  }
  static LogWeight from_int(const Int& x) {
    if (x < 0) throw std::domain_error("LogWeight: negative value");
    return x == 0 ? LogWeight{} : LogWeight{false, log_int(x)};
  }
  static LogWeight from_exact(const ExactQ& q) {
    if (q < 0) throw std::domain_error("LogWeight: negative value");
    if (q == 0) return {};
    return LogWeight{false, log_int(boost::multiprecision::numerator(q)) -
                                log_int(boost::multiprecision::denominator(q))};
  }

  double value() const { return zero ? 0.0 : std::exp(lg); }

  friend LogWeight operator*(const LogWeight& a, const LogWeight& b) {
    if (a.zero || b.zero) return {};
    return from_log(a.lg + b.lg);
  }
  friend LogWeight operator/(const LogWeight& a, const LogWeight& b) {
    if (b.zero) throw std::domain_error("LogWeight: division by zero");
    if (a.zero) return {};
    return from_log(a.lg - b.lg);
  }
};

}  // namespace degtree
