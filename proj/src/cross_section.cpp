#include "cfdyn/cross_section.hpp"

#include <algorithm>
#include <array>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cfdyn/lattice.hpp"

namespace cfdyn {

double first_crossing_time(const ReducedFraction<std::int64_t>& x) {
  const auto pt = first_crossing(x);
  return static_cast<double>(-2.0L * pt.z.log() + section_offset(pt) / 2.0L);
}

std::vector<CrossingRecord> crossing_sequence(const ReducedFraction<std::int64_t>& x) {
  std::vector<CrossingRecord> out;
  auto pt = first_crossing(x);
  long double t = -2.0L * pt.z.log() + section_offset(pt) / 2.0L;
  for (;;) {
    out.push_back({pt, static_cast<double>(t)});
    const auto next = return_map(pt);
    if (!next) break;
    t += return_time(pt);
    pt = *next;
  }
  return out;
}

namespace {

using I128 = __int128;

// Projective point m/n with n >= 0; (1, 0) is infinity.
struct Cusp {
  std::int64_t m;
  std::int64_t n;
  friend auto operator<=>(const Cusp&, const Cusp&) = default;
};

Cusp make_cusp(I128 m, I128 n) {
  if (n < 0 || (n == 0 && m < 0)) {
    m = -m;
    n = -n;
  }
  I128 a = m < 0 ? -m : m, b = n;
  while (b != 0) {
    const I128 r = a % b;
    a = b;
    b = r;
  }
  if (a > 1) {
    m /= a;
    n /= a;
  }
  return {static_cast<std::int64_t>(m), static_cast<std::int64_t>(n)};
}

using Triangle = std::array<Cusp, 3>;

// Integer-exact tracker of the Farey triangle containing x + i e^{-t}.
class FareyTracker {
 public:
  FareyTracker(std::int64_t p, std::int64_t q) : p_(p), q_(q) { rows_ << 1, p, 0, q; }

  Triangle triangle_at(double t) {
    const double s1 = std::exp(-t / 2);
    const double s2 = std::exp(t / 2) / static_cast<double>(q_);
    detail::lagrange_reduce(rows_, s1, s2);
    // g' = [v2; v1] with det +1 maps the base point into the fundamental domain.
    Matrix2i g;
    g.row(0) = rows_.row(1);
    g.row(1) = rows_.row(0);
    if (g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0) < 0) g.row(0) *= -1;
    const double a = s1 * s1, b = s2 * s2;
    const double dot = detail::shadow_dot(g, 0, 1, a, b);
    // gamma = g' [[1, p], [0, q]]^{-1}
    const std::int64_t ga = g(0, 0), gb = (g(0, 1) - p_ * g(0, 0)) / q_;
    const std::int64_t gc = g(1, 0), gd = (g(1, 1) - p_ * g(1, 0)) / q_;
    auto preimage = [&](std::int64_t m, std::int64_t n) {
      return make_cusp(I128(gd) * m - I128(gb) * n, -I128(gc) * m + I128(ga) * n);
    };
    Triangle tri = dot >= 0.0 ? Triangle{preimage(0, 1), preimage(1, 1), preimage(1, 0)}
                              : Triangle{preimage(-1, 1), preimage(0, 1), preimage(1, 0)};
    std::sort(tri.begin(), tri.end());
    return tri;
  }

 private:
  std::int64_t p_, q_;
  Matrix2i rows_;
};

int shared_count(const Triangle& a, const Triangle& b) {
  int n = 0;
  for (const auto& u : a)
    for (const auto& v : b) n += (u == v);
  return n;
}

std::pair<Cusp, Cusp> shared_edge(const Triangle& a, const Triangle& b) {
  std::vector<Cusp> s;
  for (const auto& u : a)
    for (const auto& v : b)
      if (u == v) s.push_back(u);
  return {s[0], s[1]};
}

enum class EdgeKind { kNone, kEvent, kBoundary };

struct EdgeTest {
  EdgeKind kind = EdgeKind::kNone;
  CrossSectionPoint<Q64> point{Q64(0), Q64(0), 0};
};

// Tests both orientations h, hS of the SL2(Z) element taking {0, inf} to
// the edge {r, s}: alpha' = h^{-1}(inf), omega' = h^{-1}(x).
EdgeTest test_edge(const Cusp& r, const Cusp& s, std::int64_t p, std::int64_t q) {
  if (r.n == 0 || s.n == 0) throw std::logic_error("detect_crossings_numeric: crossed an edge at infinity");
  Matrix2i h;
  h << s.m, r.m, s.n, r.n;
  if (h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0) < 0) h.col(1) *= -1;
  if (h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0) != 1) throw std::logic_error("detect_crossings_numeric: edge is not a Farey pair");
  Matrix2i sm;
  sm << 0, -1, 1, 0;
  EdgeTest best;
  for (const Matrix2i& hk : {Matrix2i(h), Matrix2i(h * sm)}) {
    const std::int64_t A = hk(0, 0), B = hk(0, 1), C = hk(1, 0), D = hk(1, 1);
    if (C == 0) continue;
    const Q64 alpha(D, -C);
    const std::int64_t den = -C * p + A * q;
    if (den == 0) continue;
    const Q64 omega(D * p - B * q, den);
    const Q64 one(1), zero(0);
    const bool plus_closed = alpha <= -one && omega > zero && omega <= one;
    const bool minus_closed = alpha >= one && omega < zero && omega >= -one;
    if (!plus_closed && !minus_closed) continue;
    const bool interior = plus_closed ? (alpha < -one && omega < one) : (alpha > one && omega > -one);
    const int eps = plus_closed ? 1 : -1;
    EdgeTest e{interior ? EdgeKind::kEvent : EdgeKind::kBoundary,
               {omega.abs(), Q64(1) / (omega - alpha).abs(), eps}};
    if (e.kind == EdgeKind::kEvent || best.kind == EdgeKind::kNone) best = e;
  }
  return best;
}

}  // namespace

NumericCrossingReport detect_crossings_numeric(const ReducedFraction<std::int64_t>& x, double dt) {
  if (!(dt > 0.0 && dt <= 1e-3)) throw std::domain_error("detect_crossings_numeric: need 0 < dt <= 1e-3");
  const std::int64_t p = x.p(), q = x.q();
  const double t_end = 2.0 * std::log(static_cast<double>(q)) + 2.0;
  const double tol = 1e-11;
  FareyTracker tracker(p, q);
  NumericCrossingReport report;

  auto record = [&](double t, const Triangle& a, const Triangle& b) {
    auto [r, s] = shared_edge(a, b);
    const Q64 rv(r.m, r.n), sv(s.m, s.n);
    const auto e = test_edge(r, s, p, q);
    ++report.edges_crossed;
    const NumericCrossing c{t, std::min(rv, sv), std::max(rv, sv), e.point};
    if (e.kind == EdgeKind::kEvent) report.events.push_back(c);
    if (e.kind == EdgeKind::kBoundary) report.boundary.push_back(c);
  };

  auto resolve = [&](auto&& self, double ta, const Triangle& ka, double tb, const Triangle& kb) -> void {
    const int shared = shared_count(ka, kb);
    if (shared == 3) return;
    if (shared == 2 && tb - ta < tol) {
      record(0.5 * (ta + tb), ka, kb);
      return;
    }
    const double tm = 0.5 * (ta + tb);
    if (tm <= ta || tm >= tb) throw std::logic_error("detect_crossings_numeric: unresolved change of triangle");
    const Triangle km = tracker.triangle_at(tm);
    if (shared_count(km, ka) == 3) {
      self(self, tm, km, tb, kb);
    } else if (shared_count(km, kb) == 3) {
      self(self, ta, ka, tm, km);
    } else {
      self(self, ta, ka, tm, km);
      self(self, tm, km, tb, kb);
    }
  };

  const auto steps = static_cast<std::int64_t>(std::ceil(t_end / dt));
  double t_prev = 0.0;
  Triangle prev = tracker.triangle_at(0.0);
  for (std::int64_t i = 1; i <= steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    const Triangle cur = tracker.triangle_at(t);
    if (cur != prev) {
      resolve(resolve, t_prev, prev, t, cur);
    }
    prev = cur;
    t_prev = t;
  }
  return report;
}

std::optional<CrossSectionPoint<Float50>> section_point_from_endpoints(Float50 alpha, Float50 omega,
                                                                       std::uint64_t cap) {
  using boost::multiprecision::floor;
  const Float50 one(1), two(2);
  for (std::uint64_t it = 0; it < cap; ++it) {
    const Float50 n = floor(omega);
    omega -= n;
    alpha -= n;
    if (omega == Float50(0)) return std::nullopt;
    if (alpha <= -one) return CrossSectionPoint<Float50>{omega, one / (omega - alpha), +1};
    if (alpha >= two) return CrossSectionPoint<Float50>{one - omega, one / (alpha - omega), -1};
    if (alpha == Float50(0)) return std::nullopt;
    alpha = -one / alpha;
    omega = -one / omega;
  }
  return std::nullopt;
}

ReturnTimeSample haar_mean_return_time(std::uint64_t orbits, int returns, std::mt19937_64& rng, int burn_in) {
  if (returns < 1 || burn_in < 0) throw std::domain_error("haar_mean_return_time: need returns >= 1, burn_in >= 0");
  ReturnTimeSample out{0.0, std::numeric_limits<double>::infinity(), 0, orbits, 0};
  Float50 sum(0);
  // Double endpoints are rationals with short expansions; random low-order
  // bits make them generic at 50-digit precision.
  auto jitter = [&](double v) {
    return Float50(v) * (Float50(1) + Float50(uniform01(rng) - 0.5) * Float50(0x1.0p-52));
  };
  for (std::uint64_t i = 0; i < orbits; ++i) {
    const auto g = haar_sample(rng).matrix();
    // alpha = g(inf), omega = g(0) for the Moebius action of g
    const Float50 alpha = jitter(g(0, 0) / g(1, 0));
    const Float50 omega = jitter(g(0, 1) / g(1, 1));
    auto pt = section_point_from_endpoints(alpha, omega);
    if (!pt) {
      ++out.failed;
      continue;
    }
    for (int k = 0; k < burn_in + returns; ++k) {
      const auto next = return_map(*pt);
      if (!next) {
        ++out.failed;
        break;
      }
      if (k >= burn_in) {
        const Float50 r = return_time(*pt);
        sum += r;
        out.min = std::min(out.min, static_cast<double>(r));
        ++out.crossings;
      }
      pt = next;
    }
  }
  out.mean = out.crossings ? static_cast<double>(sum / Float50(out.crossings)) : 0.0;
  return out;
}

double kappa_integral() {
  // y = e^{-u}: int_0^inf -u e^{-u} / (1 + e^{-u}) du
  auto f = [](double u) { return -u * std::exp(-u) / (1.0 + std::exp(-u)); };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-14, &err);
}

double kappa_quadrature() { return 1.0 / (-4.0 * kappa_integral()); }

}  // namespace cfdyn
