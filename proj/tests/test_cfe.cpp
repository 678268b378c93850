#include <doctest.h>

#include <cmath>
#include <span>
#include <vector>

#include "cfdyn/cfe.hpp"
#include "gen.hpp"

using namespace cfdyn;
using F = ReducedFraction<std::int64_t>;
using W = CfeWord<std::int64_t>;
using Q = Rational<std::int64_t>;

namespace {

// Euclid on (q, p): quotients of q/p, p/(q mod p), ...
std::vector<std::int64_t> euclid(std::int64_t p, std::int64_t q) {
  std::vector<std::int64_t> d;
  while (p != 0) {
    d.push_back(q / p);
    const std::int64_t r = q % p;
    q = p;
    p = r;
  }
  return d;
}

// [a1, ..., an] evaluated from the tail: x = 1 / (a1 + 1 / (a2 + ...)).
Q evaluate(const std::vector<std::int64_t>& d) {
  Q x(0);
  for (auto it = d.rbegin(); it != d.rend(); ++it) x = Q(1) / (Q(*it) + x);
  return x;
}

}  // namespace

TEST_CASE("reduced fraction validation") {
  CHECK_THROWS(F(0, 5));
  CHECK_THROWS(F(5, 5));
  CHECK_THROWS(F(2, 4));
  CHECK_NOTHROW(F(1, 2));
}

TEST_CASE("canonical words") {
  CHECK_THROWS(W({}));
  CHECK_THROWS(W({2, 1}));
  CHECK_THROWS(W({1}));
  CHECK_THROWS(W({0, 2}));
  CHECK_NOTHROW(W({1, 2}));
}

TEST_CASE("gauss map examples") {
  CHECK(*gauss_map(F(2, 3)) == F(1, 2));
  CHECK_FALSE(gauss_map(F(1, 7)).has_value());
  CHECK(*gauss_map(F(5, 8)) == F(3, 5));
}

TEST_CASE("cfe digits, len and from_digits examples") {
  CHECK(cfe_digits(F(2, 3)) == W({1, 2}));
  CHECK(cfe_digits(F(113, 355)) == W({3, 7, 16}));
  CHECK(cfe_digits(F(1, 5)) == W({5}));
  CHECK(cfe_len(F(2, 3)) == 2);
  CHECK(cfe_len(F(1, 17)) == 1);
  CHECK(cfe_len(F(113, 355)) == 3);
  CHECK(from_digits(W({1, 2})) == F(2, 3));
  CHECK(from_digits(W({5})) == F(1, 5));
  CHECK(from_digits(W({3, 7, 16})) == F(113, 355));
}

TEST_CASE("convergents examples") {
  auto qs = [](const W& w) {
    std::vector<std::int64_t> v;
    for (const auto& c : convergents(w)) v.push_back(c.q);
    return v;
  };
  CHECK(qs(W({3, 7, 16})) == std::vector<std::int64_t>{1, 3, 22, 355});
  CHECK(qs(W({2})) == std::vector<std::int64_t>{1, 2});
  CHECK(qs(W({1, 2})) == std::vector<std::int64_t>{1, 1, 3});
}

TEST_CASE("exhaustive round trip and length bound for q <= 5000") {
  for (std::int64_t q = 2; q <= 5000; ++q) {
    const double bound = 2.0 * std::log2(static_cast<double>(q));
    for (std::int64_t p = 1; p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      const F x(p, q);
      const W w = cfe_digits(x);
      REQUIRE(from_digits(w) == x);
      REQUIRE(static_cast<double>(w.size()) <= bound);
    }
  }
}

TEST_CASE("digits agree with an independent Euclid and evaluation") {
  testgen::Gen g(21);
  for (int i = 0; i < 2000; ++i) {
    const F x = g.fraction(2, 1000000);
    const auto d = euclid(x.p(), x.q());
    INFO("seed 21 case " << i << " x=" << x.p() << "/" << x.q());
    const W w = cfe_digits(x);
    REQUIRE(std::vector<std::int64_t>(w.digits().begin(), w.digits().end()) == d);
    REQUIRE(evaluate(d) == x.value());
    REQUIRE(cfe_len(x) == d.size());
  }
}

TEST_CASE("convergent recursion matches truncated evaluation") {
  testgen::Gen g(22);
  for (int i = 0; i < 500; ++i) {
    const W w = g.word(12, 9);
    const auto c = convergents(w);
    REQUIRE(c.size() == w.size() + 1);
    std::vector<std::int64_t> prefix;
    for (std::size_t k = 1; k <= w.size(); ++k) {
      prefix.push_back(w[k - 1]);
      REQUIRE(Q(c[k].p, c[k].q) == evaluate(prefix));
      // determinant identity of consecutive convergents
      REQUIRE(c[k].p * c[k - 1].q - c[k - 1].p * c[k].q == ((k % 2) ? 1 : -1));
    }
  }
}

TEST_CASE("gauss map shifts the digit word") {
  testgen::Gen g(23);
  for (int i = 0; i < 1000; ++i) {
    const F x = g.fraction(3, 100000);
    const W w = cfe_digits(x);
    const auto tx = gauss_map(x);
    REQUIRE(tx.has_value() == (w.size() > 1));
    if (tx) {
      const W tw = cfe_digits(*tx);
      REQUIRE(std::vector<std::int64_t>(tw.digits().begin(), tw.digits().end()) ==
              std::vector<std::int64_t>(w.digits().begin() + 1, w.digits().end()));
    }
  }
}

TEST_CASE("T^2(x) = T(1 - x) on (1/2, 1), q <= 2000") {
  for (std::int64_t q = 3; q <= 2000; ++q) {
    for (std::int64_t p = q / 2 + 1; p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      const auto t1 = gauss_map(F(p, q));
      REQUIRE(t1.has_value());
      const auto t2 = gauss_map(*t1);
      const auto tc = gauss_map(F(q - p, q));
      REQUIRE(t2.has_value() == tc.has_value());
      if (t2) REQUIRE(*t2 == *tc);
    }
  }
}

TEST_CASE("digit histogram") {
  const auto h1 = digit_histogram(W({1, 2}), 5);
  CHECK(h1.count(1) == 1);
  CHECK(h1.count(2) == 1);
  CHECK(h1.overflow == 0);
  const auto h2 = digit_histogram(W({3, 7, 16}), 5);
  CHECK(h2.count(3) == 1);
  CHECK(h2.overflow == 2);
  const auto h3 = digit_histogram(W({1, 1, 1, 2}), 2);
  CHECK(h3.count(1) == 3);
  CHECK(h3.count(2) == 1);
  CHECK(from_digits(W({1, 1, 1, 2})) == F(5, 8));
  CHECK_THROWS(digit_histogram(W({2}), 0));
  DigitHistogram m(5);
  m.merge(h1);
  m.merge(h2);
  CHECK(m.total() == 5);
  CHECK_THROWS(m.merge(h3));
}

TEST_CASE("word frequency") {
  const std::vector<std::int64_t> one{1}, seven{7};
  CHECK(word_frequency(F(2, 3), std::span<const std::int64_t>(one)) == Q(1, 2));
  CHECK(word_frequency(F(2, 3), std::span<const std::int64_t>(seven)) == Q(0));
  CHECK(word_frequency(F(2, 3), W({1, 2})) == Q(1, 2));
  CHECK(word_frequency(F(2, 3), W({7})) == Q(0));
  CHECK(word_frequency(F(113, 355), W({3, 7})) == Q(1, 3));
  CHECK(word_frequency(F(5, 8), W({1, 1, 2})) == Q(1, 4));
}

TEST_CASE("big-integer expansions") {
  // F_91 / F_92 = [1, ..., 1, 2] with 90 digits
  BigInt a = 0, b = 1;
  for (int i = 0; i < 91; ++i) {
    const BigInt c = a + b;
    a = b;
    b = c;
  }
  const ReducedFraction<BigInt> x(a, b);
  const auto w = cfe_digits(x);
  CHECK(w.size() == 90);
  for (std::size_t i = 0; i + 1 < w.size(); ++i) REQUIRE(w[i] == 1);
  CHECK(w.back() == 2);
  CHECK(from_digits(w) == x);
}
