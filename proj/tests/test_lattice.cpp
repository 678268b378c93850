#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "cfdyn/lattice.hpp"
#include "gen.hpp"

using namespace cfdyn;
using F = ReducedFraction<std::int64_t>;

namespace {

// Shortest vector by enumerating m, n in a box.
double brute_shortest(const Matrix2<double>& b, int box) {
  double best = std::numeric_limits<double>::infinity();
  for (int m = -box; m <= box; ++m)
    for (int n = -box; n <= box; ++n) {
      if (m == 0 && n == 0) continue;
      const Vector2<double> v = m * b.row(0) + n * b.row(1);
      best = std::min(best, v.norm());
    }
  return best;
}

// Shortest vector of the orbit point: (m e^{-t/2}, (m p + n q) e^{t/2} / q); for
// each m only the two n nearest -m p / q can win.
double orbit_shortest(const F& x, double t) {
  const double s1 = std::exp(-t / 2), s2 = std::exp(t / 2) / static_cast<double>(x.q());
  double best = std::numeric_limits<double>::infinity();
  const auto m_max = static_cast<std::int64_t>(1.1 / s1) + 1;
  for (std::int64_t m = 0; m <= m_max; ++m) {
    const std::int64_t n0 = -((m * x.p()) / x.q());
    for (std::int64_t n = n0 - 1; n <= n0 + 1; ++n) {
      if (m == 0 && n == 0) continue;
      const double a = static_cast<double>(m) * s1;
      const double b = static_cast<double>(m * x.p() + n * x.q()) * s2;
      best = std::min(best, std::hypot(a, b));
    }
  }
  return best;
}

Matrix2<double> random_sl2z(testgen::Gen& g, int steps) {
  Matrix2<double> m = Matrix2<double>::Identity();
  Matrix2<double> s, t;
  s << 0, -1, 1, 0;
  for (int i = 0; i < steps; ++i) {
    t << 1, static_cast<double>(g.integer(-3, 3)), 0, 1;
    m = (g.integer(0, 1) ? s : Matrix2<double>::Identity()) * t * m;
  }
  return m;
}

}  // namespace

TEST_CASE("orbit point at t = 0") {
  const auto b = orbit_point(F(1, 2), 0.0);
  CHECK(b.matrix()(0, 0) == doctest::Approx(1.0));
  CHECK(b.matrix()(0, 1) == doctest::Approx(0.5));
  CHECK(b.matrix()(1, 0) == doctest::Approx(0.0));
  CHECK(b.matrix()(1, 1) == doctest::Approx(1.0));
  CHECK(b.det() == doctest::Approx(1.0));
}

TEST_CASE("orbit point at t = 2 ln q contains (1, 0)") {
  testgen::Gen g(41);
  for (int i = 0; i < 200; ++i) {
    const F x = g.fraction(2, 100000);
    const double t = 2.0 * std::log(static_cast<double>(x.q()));
    const auto b = orbit_point(x, t);
    const Vector2<double> v = static_cast<double>(x.q()) * b.row(0) - static_cast<double>(x.p()) * b.row(1);
    REQUIRE(v(0) == doctest::Approx(1.0).epsilon(1e-9));
    // difference of two terms of size p q
    REQUIRE(std::abs(v(1)) < 1e-15 * static_cast<double>(x.p()) * static_cast<double>(x.q()));
    REQUIRE(height(b) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("orbit point far in the past has a short vertical vector") {
  const double t = -20.0;
  const auto b = orbit_point(F(1, 2), t);
  CHECK(height(b) == doctest::Approx(std::exp(-t / 2)).epsilon(1e-12));
}

TEST_CASE("reduce_basis and height examples") {
  const LatticeBasis<double> id(Matrix2<double>::Identity());
  CHECK(reduce_basis(id).matrix().isApprox(Matrix2<double>::Identity()));
  CHECK(height(id) == doctest::Approx(1.0));
  CHECK(shortest_length(orbit_point(F(1, 2), 0.0)) == doctest::Approx(1.0));
  CHECK(height(orbit_point(F(1, 2), 0.0)) == doctest::Approx(1.0));
  Matrix2<double> d;
  d << 10, 0, 0, 0.1;
  CHECK(shortest_length(LatticeBasis<double>(d)) == doctest::Approx(0.1));
  const double t = 4.0;
  d << std::exp(-t / 2), 0, 0, std::exp(t / 2);
  CHECK(height(LatticeBasis<double>(d)) == doctest::Approx(std::exp(2.0)).epsilon(1e-12));
  Matrix2<double> singular;
  singular << 1, 2, 2, 4;
  CHECK_THROWS_AS(LatticeBasis<double>{singular}, std::domain_error);
}

TEST_CASE("reduction against enumeration on random bases") {
  testgen::Gen g(42);
  for (int i = 0; i < 300; ++i) {
    const auto h = haar_draw(g.engine());
    const Matrix2<double> m = random_sl2z(g, 3) * h.basis.matrix();
    const LatticeBasis<double> b(m);
    const auto r = reduce_basis(b);
    INFO("seed 42 case " << i);
    REQUIRE(r.matrix().row(0).norm() <= r.matrix().row(1).norm() * (1 + 1e-12));
    REQUIRE(std::abs(r.matrix().row(0).dot(r.matrix().row(1))) <=
            0.5 * r.matrix().row(0).squaredNorm() * (1 + 1e-9));
    REQUIRE(shortest_length(b) == doctest::Approx(brute_shortest(r.matrix(), 6)).epsilon(1e-9));
    REQUIRE(std::abs(std::abs(r.det()) - 1.0) < 1e-9);
  }
}

TEST_CASE("orbit heights against the orbit enumeration oracle") {
  testgen::Gen g(43);
  for (int i = 0; i < 300; ++i) {
    const F x = g.fraction(2, 500);
    const double t = g.real(-2.0, 2.0 * std::log(static_cast<double>(x.q())) + 1.0);
    INFO("seed 43 case " << i << " x=" << x.p() << "/" << x.q() << " t=" << t);
    REQUIRE(shortest_length(orbit_point(x, t)) == doctest::Approx(orbit_shortest(x, t)).epsilon(1e-9));
  }
}

TEST_CASE("dual point") {
  const LatticeBasis<double> id(Matrix2<double>::Identity());
  CHECK(dual_point(id).matrix().isApprox(Matrix2<double>::Identity()));
  Matrix2<double> d;
  d << std::exp(-0.5), 0, 0, std::exp(0.5);
  Matrix2<double> e;
  e << std::exp(0.5), 0, 0, std::exp(-0.5);
  CHECK(dual_point(LatticeBasis<double>(d)).matrix().isApprox(e));
  Matrix2<double> u;
  u << 1, 0.5, 0, 1;
  Matrix2<double> l;
  l << 1, 0, -0.5, 1;
  CHECK(dual_point(LatticeBasis<double>(u)).matrix().isApprox(l));

  testgen::Gen g(44);
  for (int i = 0; i < 200; ++i) {
    const F x = g.fraction(2, 10000);
    const double t = g.real(0.0, 2.0 * std::log(static_cast<double>(x.q())));
    const auto b = orbit_point(x, t);
    const auto db = dual_point(b);
    REQUIRE(db.shadow().has_value());
    // the dual of a planar unimodular lattice is its quarter-turn rotation
    REQUIRE(height(db) == doctest::Approx(height(b)).epsilon(1e-9));
    REQUIRE(dual_point(db).matrix().isApprox(b.matrix(), 1e-9));
    REQUIRE((b.matrix() * db.matrix().transpose()).isApprox(Matrix2<double>::Identity(), 1e-9));
  }
}

TEST_CASE("flow composes") {
  const auto b = orbit_point(F(3, 10), 0.0);
  const auto f = flow(flow(b, 1.25), 0.75);
  CHECK(f.matrix().isApprox(orbit_point(F(3, 10), 2.0).matrix(), 1e-12));
}

TEST_CASE("symmetry witness examples") {
  const auto w = verify_symmetry<std::int64_t>(3, 10);
  CHECK(w.p_dual == 3);
  CHECK(w.q_dual == 1);
  Matrix2<std::int64_t> gamma;
  gamma << 10, -3, -3, 1;
  CHECK(w.gamma == gamma);
  const auto w2 = verify_symmetry<std::int64_t>(1, 2);
  gamma << 2, -1, -1, 1;
  CHECK(w2.p_dual == 1);
  CHECK(w2.q_dual == 1);
  CHECK(w2.gamma == gamma);
  for (std::int64_t q = 2; q <= 200; ++q) REQUIRE(verify_symmetry<std::int64_t>(1, q).p_dual == q - 1);
}

TEST_CASE("symmetry witness with big integers") {
  const BigInt q = BigInt(1000003) * BigInt(1000033);
  const BigInt p = BigInt(123456789);
  const auto w = verify_symmetry<BigInt>(p, q);
  CHECK((p * w.p_dual + 1) % q == 0);
}

TEST_CASE("symmetry is realised numerically") {
  // the orbit at time 2 ln q is the dual of the p' orbit at time 0
  testgen::Gen g(45);
  for (int i = 0; i < 100; ++i) {
    const F x = g.fraction(3, 2000);
    const auto w = verify_symmetry<std::int64_t>(x.p(), x.q());
    const double t = 2.0 * std::log(static_cast<double>(x.q()));
    const auto a = to_fundamental_domain(orbit_point(x, t));
    const auto b = to_fundamental_domain(dual_point(orbit_point(F(w.p_dual, x.q()), 0.0)));
    REQUIRE(a.x == doctest::Approx(b.x).epsilon(1e-9));
    REQUIRE(a.y == doctest::Approx(b.y).epsilon(1e-9));
  }
}

TEST_CASE("fundamental domain examples") {
  const auto i = to_fundamental_domain(LatticeBasis<double>(Matrix2<double>::Identity()));
  CHECK(i.x == doctest::Approx(0.0));
  CHECK(i.y == doctest::Approx(1.0));
  const auto z = to_fundamental_domain(basis_from_point(0.3, 1.2, 0.7));
  CHECK(z.x == doctest::Approx(0.3));
  CHECK(z.y == doctest::Approx(1.2));
  const auto h = to_fundamental_domain(orbit_point(F(1, 2), 0.0));
  CHECK(h.y == doctest::Approx(1.0));
  // boundary ties go to x = -1/2
  const auto e = to_fundamental_domain(basis_from_point(0.5, 2.0));
  CHECK(e.x == doctest::Approx(-0.5));
}

TEST_CASE("fundamental domain is invariant under SL2(Z) and records a valid word") {
  testgen::Gen g(46);
  for (int k = 0; k < 300; ++k) {
    const auto h = haar_draw(g.engine());
    const Matrix2<double> m = random_sl2z(g, 5) * h.basis.matrix();
    const auto z = to_fundamental_domain(LatticeBasis<double>(m));
    INFO("seed 46 case " << k);
    REQUIRE(std::abs(z.x) <= 0.5 + 1e-12);
    REQUIRE(z.x * z.x + z.y * z.y >= 1.0 - 1e-9);
    REQUIRE(z.x == doctest::Approx(h.x).epsilon(1e-7));
    REQUIRE(z.y == doctest::Approx(h.y).epsilon(1e-7));
    REQUIRE(z.y == doctest::Approx(std::pow(height(LatticeBasis<double>(m)), 2)).epsilon(1e-9));
    for (const auto& mv : z.word)
      if (mv.kind == FdMove::kTranslate) REQUIRE(mv.shift != 0);
  }
}

TEST_CASE("orbit tracker matches direct reduction") {
  testgen::Gen g(47);
  for (int i = 0; i < 60; ++i) {
    const F x = g.fraction(2, 100000);
    OrbitTrack track(x.p(), x.q());
    const double T = 2.0 * std::log(static_cast<double>(x.q()));
    for (double t = 0.0; t <= T; t += 0.37) {
      track.set_time(t);
      const auto b = orbit_point(x, t);
      REQUIRE(track.height() == doctest::Approx(height(b)).epsilon(1e-9));
      double fx = 0.0, fy = 0.0;
      track.fd_point(fx, fy);
      const auto z = to_fundamental_domain(b);
      REQUIRE(fy == doctest::Approx(z.y).epsilon(1e-9));
      if (std::abs(std::abs(z.x) - 0.5) > 1e-9 && std::abs(z.x * z.x + z.y * z.y - 1.0) > 1e-9)
        REQUIRE(fx == doctest::Approx(z.x).epsilon(1e-9));
    }
  }
  CHECK_THROWS(OrbitTrack(2, 4));
}

TEST_CASE("haar sampler moments") {
  std::mt19937_64 rng(2024);
  const int n = 400000;
  std::uint64_t proposals = 0;
  double inv_y = 0.0;
  int tail = 0;
  for (int i = 0; i < n; ++i) {
    const auto d = haar_draw(rng);
    proposals += d.proposals;
    inv_y += 1.0 / d.y;
    // independent oracle: enumerate small vectors of the rotated basis
    if (1.0 / brute_shortest(d.basis.matrix(), 3) >= 2.0) ++tail;
  }
  const double pi = std::numbers::pi;
  // area of the fundamental domain over the area of the proposal strip
  CHECK(static_cast<double>(n) / static_cast<double>(proposals) == doctest::Approx(pi * std::sqrt(3.0) / 6.0).epsilon(0.01));
  CHECK(inv_y / n == doctest::Approx(3.0 * std::log(3.0) / (2.0 * pi)).epsilon(0.01));
  CHECK(static_cast<double>(tail) / n == doctest::Approx(3.0 / (4.0 * pi)).epsilon(0.02));
}
