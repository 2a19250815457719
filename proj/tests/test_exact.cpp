#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "degtree/exact.hpp"
#include "degtree/rng.hpp"

#include <cmath>
#include <vector>

using namespace degtree;

TEST_CASE("factorial basics") {
  CHECK(factorial(0) == 1);
  CHECK(factorial(1) == 1);
  CHECK(factorial(5) == 120);
  CHECK(factorial(20) == Int("2432902008176640000"));
  CHECK_THROWS_AS(factorial(-1), std::domain_error);
}

TEST_CASE("binomial values and edge cases") {
  CHECK(binomial(0, 0) == 1);
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(10, 10) == 1);
  CHECK(binomial(9, 2) == 36);  // C(3n-3, n-2) at n=4
  CHECK(binomial(5, -1) == 0);
  CHECK(binomial(5, 6) == 0);
  CHECK_THROWS_AS(binomial(-1, 0), std::domain_error);
  // Pascal identity on a grid.
  for (long long a = 1; a <= 30; ++a)
    for (long long b = 0; b <= a; ++b)
      CHECK(binomial(a, b) == binomial(a - 1, b - 1) + binomial(a - 1, b));
}

TEST_CASE("rising product equals factorial ratio") {
  CHECK(rising_product(1, 0) == 1);  // empty
  CHECK(rising_product(3, 2) == 1);  // empty
  CHECK(rising_product(1, 5) == 120);
  for (long long lo = 1; lo <= 8; ++lo)
    for (long long hi = lo - 1; hi <= 12; ++hi)
      CHECK(rising_product(lo, hi) * factorial(lo - 1) == factorial(hi));
  CHECK_THROWS_AS(rising_product(0, 3), std::domain_error);
  CHECK_THROWS_AS(rising_product(4, 1), std::domain_error);
}

TEST_CASE("log_int agrees with std::log") {
  for (std::uint64_t x : {1ULL, 2ULL, 1000ULL, 123456789ULL, 1000000000000007ULL})
    CHECK(log_int(Int(x)) == doctest::Approx(std::log(static_cast<double>(x))).epsilon(1e-12));
  // 1000! via lgamma
  CHECK(log_int(factorial(1000)) == doctest::Approx(std::lgamma(1001.0)).epsilon(1e-12));
  CHECK_THROWS_AS(log_int(Int(0)), std::domain_error);
}

TEST_CASE("to_double survives huge numerators and denominators") {
  const ExactQ q(factorial(500), factorial(499));
  CHECK(to_double(q) == doctest::Approx(500.0).epsilon(1e-12));
  CHECK(to_double(ExactQ(0)) == 0.0);
  CHECK(to_double(ExactQ(-3, 4)) == doctest::Approx(-0.75).epsilon(1e-12));
}

TEST_CASE("q_pow") {
  CHECK(q_pow(ExactQ(2, 3), 0) == 1);
  CHECK(q_pow(ExactQ(2, 3), 3) == ExactQ(8, 27));
  CHECK(q_pow(ExactQ(4, 27), 2) == ExactQ(16, 729));
  CHECK_THROWS_AS(q_pow(ExactQ(1, 2), -1), std::domain_error);
}

TEST_CASE("LogWeight tracks ExactQ within 1e-9 relative") {
  Rng rng(42);
  for (int trial = 0; trial < 1000; ++trial) {
    // random products/quotients of medium rationals
    ExactQ q = 1;
    LogWeight w = LogWeight::from_exact(ExactQ(1));
    for (int j = 0; j < 6; ++j) {
      const Int num = Int(1) + Int(rng.below(1000000));
      const Int den = Int(1) + Int(rng.below(1000000));
      const ExactQ f(num, den);
      if (rng.below(2)) {
        q *= f;
        w = w * LogWeight::from_exact(f);
      } else {
        q /= f;
        w = w / LogWeight::from_exact(f);
      }
    }
    CHECK(w.value() == doctest::Approx(to_double(q)).epsilon(1e-9));
  }
  // zero propagation
  const LogWeight z = LogWeight::from_exact(ExactQ(0));
  CHECK(z.value() == 0.0);
  CHECK((z * LogWeight::from_double(3.5)).value() == 0.0);
  CHECK_THROWS_AS(LogWeight::from_double(1.0) / z, std::domain_error);
  CHECK_THROWS_AS(LogWeight::from_exact(ExactQ(-1, 2)), std::domain_error);
}

TEST_CASE("Rng determinism and substreams") {
  Rng a(123), b(123), c(124);
  bool same = true, differ = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next(), y = b.next(), z = c.next();
    same = same && x == y;
    differ = differ || x != z;
  }
  CHECK(same);
  CHECK(differ);
  CHECK(Rng::derive(5, 0) != Rng::derive(5, 1));
  CHECK(Rng::derive(5, 0) == Rng::derive(5, 0));
}

TEST_CASE("Rng::below and below_big ranges and rough uniformity") {
  Rng rng(7);
  std::vector<int> hist(10, 0);
  for (int i = 0; i < 100000; ++i) {
    const auto x = rng.below(10);
    REQUIRE(x < 10);
    ++hist[x];
  }
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);  // ~5 sigma is 474

  const Int big = Int(1) << 100;
  for (int i = 0; i < 100; ++i) {
    const Int x = rng.below_big(big);
    REQUIRE(x >= 0);
    REQUIRE(x < big);
  }
  // below_big matches below distributionally for small moduli
  std::vector<int> hist2(7, 0);
  for (int i = 0; i < 70000; ++i) ++hist2[rng.below_big(Int(7)).convert_to<int>()];
  for (int h : hist2) CHECK(std::abs(h - 10000) < 500);
}

TEST_CASE("Rng::categorical is exact over rational weights") {
  Rng rng(99);
  const std::vector<ExactQ> w{ExactQ(1, 2), ExactQ(1, 3), ExactQ(1, 6)};
  std::vector<int> hist(3, 0);
  const int k = 60000;
  for (int i = 0; i < k; ++i) ++hist[rng.categorical(w)];
  CHECK(std::abs(hist[0] - k / 2) < 600);
  CHECK(std::abs(hist[1] - k / 3) < 600);
  CHECK(std::abs(hist[2] - k / 6) < 600);
  CHECK_THROWS_AS(rng.categorical({ExactQ(0), ExactQ(0)}), std::domain_error);
}

TEST_CASE("uniform01 in range") {
  Rng rng(1);
  double mn = 1, mx = 0, sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    mn = std::min(mn, u);
    mx = std::max(mx, u);
    sum += u;
  }
  CHECK(mn >= 0.0);
  CHECK(mx < 1.0);
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}
