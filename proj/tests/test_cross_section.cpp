#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cfdyn/arith.hpp"
#include "cfdyn/cross_section.hpp"
#include "gen.hpp"

using namespace cfdyn;
using F = ReducedFraction<std::int64_t>;
using P = CrossSectionPoint<Q64>;

namespace {

Float50 f50(const Q64& v) { return Float50(v.num()) / Float50(v.den()); }

// Return time written out at 50 digits from the endpoints of the section point:
// r = -2 ln y - (1/2) ln((z/y)(1 - yz)) + (1/2) ln((z'/y')(1 - y'z')).
Float50 return_time_50(const P& a, const P& b) {
  using boost::multiprecision::log;
  const Float50 y = f50(a.y), z = f50(a.z), y2 = f50(b.y), z2 = f50(b.z);
  return -2 * log(y) - log(z / y * (1 - y * z)) / 2 + log(z2 / y2 * (1 - y2 * z2)) / 2;
}

}  // namespace

TEST_CASE("first crossing examples") {
  CHECK(first_crossing(F(2, 5)) == P{Q64(1, 2), Q64(2, 5), -1});
  CHECK(first_crossing(F(3, 5)) == P{Q64(1, 2), Q64(2, 5), +1});
  CHECK_THROWS_AS(first_crossing(F(1, 3)), DegenerateStart);
  CHECK_THROWS_AS(first_crossing(F(6, 7)), DegenerateStart);
  CHECK(first_crossing_time(F(2, 5)) == doctest::Approx(std::log(5.0)).epsilon(1e-14));
}

TEST_CASE("return map examples") {
  const auto a = return_map(P{Q64(2, 5), Q64(1, 3), +1});
  REQUIRE(a.has_value());
  CHECK(*a == P{Q64(1, 2), Q64(26, 75), -1});
  CHECK_FALSE(return_map(P{Q64(1, 2), Q64(1, 3), +1}).has_value());
  const auto b = return_map(P{Q64(2, 5), Q64(2, 5), -1});
  REQUIRE(b.has_value());
  CHECK(*b == P{Q64(1, 2), Q64(42, 125), +1});
  CHECK_THROWS_AS(return_map(P{Q64(1, 2), Q64(9, 10), +1}), std::domain_error);
}

TEST_CASE("return time against a 50-digit evaluation") {
  const P a{Q64(2, 5), Q64(1, 3), +1};
  const P b{Q64(1, 2), Q64(26, 75), -1};
  const double r = static_cast<double>(return_time(a));
  CHECK(r == doctest::Approx(static_cast<double>(return_time_50(a, b))).epsilon(1e-15));

  testgen::Gen g(51);
  for (int i = 0; i < 300; ++i) {
    const F x = g.fraction(4, 100000);
    if (is_degenerate_start(x)) continue;
    const auto seq = crossing_sequence(x);
    for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
      const double rt = static_cast<double>(return_time(seq[k].point));
      REQUIRE(rt == doctest::Approx(static_cast<double>(return_time_50(seq[k].point, seq[k + 1].point))).epsilon(1e-14));
      REQUIRE(rt > 0.69);
    }
  }
}

TEST_CASE("crossing sequence examples") {
  CHECK(crossing_sequence(F(2, 5)).size() == 1);
  const auto s = crossing_sequence(F(113, 355));
  REQUIRE(s.size() == 2);
  CHECK(s[0].point.y == Q64(16, 113));
  CHECK(s[1].point.y == Q64(1, 16));
  const auto s35 = crossing_sequence(F(3, 5));
  CHECK(s35.front().point.y == gauss_map(*gauss_map(F(3, 5)))->value());
}

TEST_CASE("crossing sequence structure") {
  testgen::Gen g(52);
  for (int i = 0; i < 500; ++i) {
    const F x = g.fraction(4, 10000);
    if (is_degenerate_start(x)) continue;
    INFO("seed 52 case " << i << " x=" << x.p() << "/" << x.q());
    const auto seq = crossing_sequence(x);
    const std::size_t len = cfe_len(x);
    const bool lower = 2 * x.p() < x.q();
    REQUIRE(seq.size() == (lower ? len - 1 : len - 2));
    auto y = lower ? gauss_map(x) : gauss_map(*gauss_map(x));
    for (std::size_t k = 0; k < seq.size(); ++k) {
      REQUIRE(y.has_value());
      REQUIRE(seq[k].point.y == y->value());
      REQUIRE(seq[k].point.eps == (k % 2 == 0 ? (lower ? -1 : 1) : (lower ? 1 : -1)));
      if (k > 0) REQUIRE(seq[k].t > seq[k - 1].t);
      y = gauss_map(*y);
    }
    REQUIRE_FALSE(y.has_value());
    REQUIRE(seq.back().t <= 2.0 * std::log(static_cast<double>(x.q())) + 1e-9);
  }
}

TEST_CASE("last crossing of p and first crossing of its dual add to 2 ln q") {
  // timing identity from the symmetry x0 u_{p/q} a(2 ln q) = tau(x0 u_{p'/q})
  testgen::Gen g(53);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    const F x = g.fraction(5, 1000);
    if (is_degenerate_start(x)) continue;
    const auto pd = dual_residue(x.p(), factorize<std::int64_t>(x.q()));
    const F xd(pd, x.q());
    const double total = crossing_sequence(x).back().t + first_crossing_time(xd);
    REQUIRE(total == doctest::Approx(2.0 * std::log(static_cast<double>(x.q()))).epsilon(1e-10));
    ++checked;
  }
  CHECK(checked > 300);
  CHECK(crossing_sequence(F(2, 5)).back().t + first_crossing_time(F(2, 5)) ==
        doctest::Approx(2.0 * std::log(5.0)));
  CHECK(crossing_sequence(F(5, 13)).back().t + first_crossing_time(F(5, 13)) ==
        doctest::Approx(2.0 * std::log(13.0)));
}

TEST_CASE("numeric detection agrees with the symbolic sequence") {
  const auto r25 = detect_crossings_numeric(F(2, 5), 1e-3);
  CHECK(r25.events.size() == 1);
  CHECK(r25.boundary.size() == 2);
  const auto r12 = detect_crossings_numeric(F(1, 2), 1e-3);
  CHECK(r12.events.empty());
  CHECK_THROWS(detect_crossings_numeric(F(2, 5), 0.01));

  testgen::Gen g(54);
  for (int i = 0; i < 100; ++i) {
    const F x = g.fraction(4, 1000);
    if (is_degenerate_start(x)) continue;
    INFO("seed 54 case " << i << " x=" << x.p() << "/" << x.q());
    const auto seq = crossing_sequence(x);
    const auto num = detect_crossings_numeric(x, 1e-3);
    REQUIRE(num.events.size() == seq.size());
    REQUIRE(num.boundary.size() == 2);
    for (std::size_t k = 0; k < seq.size(); ++k) {
      REQUIRE(num.events[k].point == seq[k].point);
      REQUIRE(num.events[k].t == doctest::Approx(seq[k].t).epsilon(1e-8));
      // the geometric crossing time of the Farey edge {r, s}
      const double xv = x.to_double(), r = num.events[k].edge_lo.to<double>(), s = num.events[k].edge_hi.to<double>();
      REQUIRE(-0.5 * std::log((xv - r) * (s - xv)) == doctest::Approx(seq[k].t).epsilon(1e-9));
    }
  }
}

TEST_CASE("section point from endpoints") {
  const auto a = section_point_from_endpoints(Float50(-3), Float50(0.25));
  REQUIRE(a.has_value());
  CHECK(a->eps == 1);
  CHECK(static_cast<double>(a->y) == doctest::Approx(0.25));
  CHECK(static_cast<double>(a->z) == doctest::Approx(1.0 / 3.25));
  const auto b = section_point_from_endpoints(Float50(2.5), Float50(0.25));
  REQUIRE(b.has_value());
  CHECK(b->eps == -1);
  CHECK(static_cast<double>(b->y) == doctest::Approx(0.75));
  CHECK(static_cast<double>(b->z) == doctest::Approx(1.0 / 2.25));
  CHECK_FALSE(section_point_from_endpoints(Float50(-3), Float50(2)).has_value());
}

TEST_CASE("haar mean return time, small sample") {
  std::mt19937_64 rng(5);
  const auto s = haar_mean_return_time(2000, 25, rng);
  const double target = std::numbers::pi * std::numbers::pi / (6.0 * std::numbers::ln2);
  CHECK(s.failed == 0);
  CHECK(s.crossings == 2000u * 25u);
  CHECK(s.mean == doctest::Approx(target).epsilon(0.03));
  CHECK(s.min > std::log(2.0) - 1e-6);
}

TEST_CASE("kappa") {
  CHECK(kappa_quadrature() == doctest::Approx(3.0 / (std::numbers::pi * std::numbers::pi)).epsilon(1e-12));
  CHECK(std::abs(kappa_integral()) == doctest::Approx(std::numbers::pi * std::numbers::pi / 12.0).epsilon(1e-12));
  CHECK(2.0 * std::numbers::ln2 * kappa_quadrature() == doctest::Approx(0.4213823).epsilon(1e-6));
}
