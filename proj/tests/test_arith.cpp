#include <doctest.h>

#include <numeric>
#include <vector>

#include "cfdyn/arith.hpp"
#include "gen.hpp"

using namespace cfdyn;
using Q = Rational<std::int64_t>;

namespace {

std::int64_t brute_phi(std::int64_t q) {
  if (q == 1) return 1;
  std::int64_t n = 0;
  for (std::int64_t p = 1; p < q; ++p) n += std::gcd(p, q) == 1;
  return n;
}

std::int64_t brute_count(std::int64_t q, std::int64_t num, std::int64_t den) {
  std::int64_t n = 0;
  for (std::int64_t l = 1; l * den <= num * q; ++l) n += std::gcd(l, q) == 1;
  return n;
}

}  // namespace

TEST_CASE("factorize small moduli") {
  CHECK(factorize<std::int64_t>(12).prime_factors() == std::vector<PrimePower>{{2, 2}, {3, 1}});
  CHECK(factorize<std::int64_t>(1).prime_factors().empty());
  CHECK(factorize<std::int64_t>(97).prime_factors() == std::vector<PrimePower>{{97, 1}});
  CHECK_THROWS_AS(factorize<std::int64_t>(0), std::domain_error);
}

TEST_CASE("factorize reconstructs q") {
  for (std::int64_t q = 1; q <= 5000; ++q) {
    std::int64_t prod = 1;
    std::int64_t last = 1;
    const auto m = factorize<std::int64_t>(q);
    for (const auto& f : m.prime_factors()) {
      REQUIRE(f.prime > last);
      for (int e = 0; e < f.exponent; ++e) prod *= f.prime;
      last = f.prime;
    }
    REQUIRE(prod == q);
  }
}

TEST_CASE("sieve agrees with trial division") {
  FactorSieve sieve(20000);
  for (std::int64_t q = 1; q <= 20000; ++q)
    REQUIRE(sieve.factorize(q).prime_factors() == factorize<std::int64_t>(q).prime_factors());
  CHECK_THROWS(sieve.factorize(20001));
}

TEST_CASE("euler_phi and omega") {
  CHECK(euler_phi(factorize<std::int64_t>(12)) == 4);
  CHECK(euler_phi(factorize<std::int64_t>(1)) == 1);
  CHECK(euler_phi(factorize<std::int64_t>(97)) == 96);
  CHECK(omega(factorize<std::int64_t>(12)) == 2);
  CHECK(omega(factorize<std::int64_t>(1)) == 0);
  CHECK(omega(factorize<std::int64_t>(30)) == 3);
  for (std::int64_t q = 1; q <= 3000; ++q) REQUIRE(euler_phi(factorize<std::int64_t>(q)) == brute_phi(q));
}

TEST_CASE("euler_phi on big integers") {
  const BigInt q = BigInt(1000003) * BigInt(1000033);
  CHECK(euler_phi(factorize<BigInt>(q)) == BigInt(1000002) * BigInt(1000032));
}

TEST_CASE("coprime residues") {
  auto list = [](std::int64_t q) {
    const auto m = factorize<std::int64_t>(q);
    std::vector<std::int64_t> v;
    for (auto p : coprime_residues(m)) v.push_back(p);
    return v;
  };
  CHECK(list(5) == std::vector<std::int64_t>{1, 2, 3, 4});
  CHECK(list(12) == std::vector<std::int64_t>{1, 5, 7, 11});
  CHECK(list(1) == std::vector<std::int64_t>{1});
  for (std::int64_t q = 2; q <= 500; ++q) REQUIRE(static_cast<std::int64_t>(list(q).size()) == brute_phi(q));
}

TEST_CASE("count_coprime_upto examples") {
  const auto m12 = factorize<std::int64_t>(12);
  CHECK(count_coprime_upto(m12, Q(1, 2)) == 2);
  CHECK(count_coprime_upto(m12, Q(0)) == 0);
  CHECK(count_coprime_upto(factorize<std::int64_t>(5), Q(1)) == 4);
  CHECK_THROWS(count_coprime_upto(m12, Q(3, 2)));
}

TEST_CASE("count_coprime_upto matches enumeration and the 2^omega bound") {
  testgen::Gen g(7);
  for (int i = 0; i < 400; ++i) {
    const std::int64_t q = g.integer(1, 3000);
    const std::int64_t den = g.integer(1, 50);
    const std::int64_t num = g.integer(0, den);
    const auto m = factorize<std::int64_t>(q);
    const auto c = count_coprime_upto(m, Q(num, den));
    INFO("seed 7 case " << i << " q=" << q << " alpha=" << num << "/" << den);
    REQUIRE(c == brute_count(q, num, den));
    // |c - alpha phi| <= 2^omega, cleared of denominators
    const std::int64_t dev = std::abs(c * den - num * euler_phi(m));
    REQUIRE(dev <= (std::int64_t{1} << omega(m)) * den);
  }
}

TEST_CASE("extended_gcd and mod_inverse") {
  testgen::Gen g(11);
  for (int i = 0; i < 1000; ++i) {
    const std::int64_t a = g.integer(-100000, 100000), b = g.integer(-100000, 100000);
    const auto [d, x, y] = extended_gcd(a, b);
    REQUIRE(d == std::gcd(a, b));
    REQUIRE(a * x + b * y == d);
  }
  CHECK(mod_inverse<std::int64_t>(3, 10) == 7);
  CHECK_THROWS(mod_inverse<std::int64_t>(4, 10));
}

TEST_CASE("dual residue") {
  CHECK(dual_residue<std::int64_t>(3, factorize<std::int64_t>(10)) == 3);
  CHECK(dual_residue<std::int64_t>(2, factorize<std::int64_t>(5)) == 2);
  for (std::int64_t q = 2; q <= 400; ++q) {
    const auto m = factorize<std::int64_t>(q);
    REQUIRE(dual_residue<std::int64_t>(1, m) == q - 1);
    for (auto p : coprime_residues(m)) {
      const auto pd = dual_residue(p, m);
      REQUIRE(pd >= 1);
      REQUIRE(pd < q);
      REQUIRE((p * pd + 1) % q == 0);
      REQUIRE(dual_residue(pd, m) == p);
    }
  }
  CHECK_THROWS(dual_residue<std::int64_t>(4, factorize<std::int64_t>(10)));
}
