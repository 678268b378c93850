#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "cfdyn/cfe.hpp"
#include "cfdyn/rational.hpp"
#include "cfdyn/types.hpp"

namespace cfdyn {

using Q64 = Rational<std::int64_t>;

/// Coordinates (y, z, eps) on the section: y = |omega|, z = 1/|omega - alpha|,
/// eps = +1 when 0 < omega < 1 and alpha <= -1, eps = -1 for the mirror case.
template <class T>
struct CrossSectionPoint {
  T y;
  T z;
  int eps;

  friend bool operator==(const CrossSectionPoint&, const CrossSectionPoint&) = default;
};

namespace detail {

template <class T>
inline constexpr bool is_rational = false;
template <class Int>
inline constexpr bool is_rational<Rational<Int>> = true;

// Slack on z (1 + y) <= 1 for rounded arithmetic.
template <class T>
T section_slack() {
  if constexpr (is_rational<T>)
    return T(0);
  else
    return T(std::numeric_limits<T>::epsilon() * 64);
}

template <class T>
bool in_section(const CrossSectionPoint<T>& pt) {
  return pt.y > T(0) && pt.y < T(1) && pt.z > T(0) && pt.z * (T(1) + pt.y) <= T(1) + section_slack<T>() &&
         (pt.eps == 1 || pt.eps == -1);
}

template <class T>
T frac_of_inverse(const T& y) {
  using std::floor;
  const T inv = T(1) / y;
  return inv - T(floor(inv));
}

template <class Int>
Rational<Int> frac_of_inverse(const Rational<Int>& y) {
  const Rational<Int> inv = Rational<Int>(1) / y;
  return inv - Rational<Int>(inv.floor());
}

template <class T>
auto log_of(const T& v) {
  using std::log;
  return log(v);
}
template <class Int>
long double log_of(const Rational<Int>& v) {
  return v.log();
}

}  // namespace detail

/// Raised for starts excluded from the first-crossing rule: 1/n, 1 - 1/n.
class DegenerateStart : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Whether x is of the form 1/n or 1 - 1/n (including 1/2).
template <class Int>
bool is_degenerate_start(const ReducedFraction<Int>& x) {
  return x.p() == 1 || x.q() - x.p() == 1;
}

/// First meeting of t -> x0 u_x a(t) with the section: (T(x), x, -1) for
/// x < 1/2 and (T(1 - x), 1 - x, +1) for x > 1/2.
template <class Int>
CrossSectionPoint<Rational<Int>> first_crossing(const ReducedFraction<Int>& x) {
  if (is_degenerate_start(x)) throw DegenerateStart("first_crossing: x = 1/n or 1 - 1/n");
  if (Int(2) * x.p() < x.q()) {
    const auto tx = gauss_map(x);
    return {tx->value(), x.value(), -1};
  }
  const ReducedFraction<Int> y(x.q() - x.p(), x.q());
  const auto ty = gauss_map(y);
  return {ty->value(), y.value(), +1};
}

/// T_C(y, z, eps) = (T(y), y (1 - y z), -eps); nullopt when T(y) = 0.
template <class T>
std::optional<CrossSectionPoint<T>> return_map(const CrossSectionPoint<T>& pt) {
  if (!detail::in_section(pt)) throw std::domain_error("return_map: point outside the section");
  const T ty = detail::frac_of_inverse(pt.y);
  if (ty == T(0)) return std::nullopt;
  CrossSectionPoint<T> out{ty, pt.y * (T(1) - pt.y * pt.z), -pt.eps};
  if (!detail::in_section(out)) throw std::logic_error("return_map: image violates z <= 1/(1+y)");
  return out;
}

/// ln((z / y) (1 - y z)): the offset between a section point and the time
/// its base point crosses the edge it lies on.
template <class T>
auto section_offset(const CrossSectionPoint<T>& pt) {
  return detail::log_of(T(pt.z / pt.y * (T(1) - pt.y * pt.z)));
}

/// r_C = -2 ln y - (1/2) ln((z/y)(1 - yz)) + (1/2) ln((z'/y')(1 - y'z')).
template <class T>
auto return_time(const CrossSectionPoint<T>& pt) {
  const auto next = return_map(pt);
  if (!next) throw std::domain_error("return_time: orbit terminates at this point");
  using R = decltype(section_offset(pt));
  return R(-2) * detail::log_of(pt.y) - section_offset(pt) / R(2) + section_offset(*next) / R(2);
}

struct CrossingRecord {
  CrossSectionPoint<Q64> point;
  double t;
};

/// Flow time of the first crossing: -2 ln z + (1/2) ln((z/y)(1 - yz)).
double first_crossing_time(const ReducedFraction<std::int64_t>& x);

/// Section points along the orbit with absolute flow times.
std::vector<CrossingRecord> crossing_sequence(const ReducedFraction<std::int64_t>& x);

/// Event found by the numeric tracker: the geodesic crossed the Farey edge
/// {r, s} at time t (bracketed to within the bisection tolerance).
struct NumericCrossing {
  double t;
  Q64 edge_lo;
  Q64 edge_hi;
  CrossSectionPoint<Q64> point;
};

struct NumericCrossingReport {
  std::vector<NumericCrossing> events;
  /// Edge crossings whose endpoints sit exactly on the boundary of the
  /// section (|alpha| = 1 or |omega| = 1).
  std::vector<NumericCrossing> boundary;
  std::size_t edges_crossed = 0;
};

/// Steps t over [0, 2 ln q + 2] with spacing dt, tracks the Farey triangle
/// containing the base point x + i e^{-t} through the lattice reduction, and
/// bisects each change of triangle to the crossed edge. Each edge is tested
/// against the endpoint conditions with exact rationals.
NumericCrossingReport detect_crossings_numeric(const ReducedFraction<std::int64_t>& x, double dt);

/// Section point reached from a geodesic with endpoints (alpha, omega) by
/// translations and inversions; nullopt if the cap is hit.
std::optional<CrossSectionPoint<Float50>> section_point_from_endpoints(Float50 alpha, Float50 omega,
                                                                       std::uint64_t cap = 10000000);

struct ReturnTimeSample {
  double mean;
  double min;
  std::uint64_t crossings;
  std::uint64_t orbits;
  std::uint64_t failed;
};

/// Mean of r_C over `returns` consecutive crossings of `orbits` Haar-random
/// geodesics, after discarding `burn_in` crossings per orbit (the first
/// crossing after a fixed time favours long returns). 50-digit floats.
ReturnTimeSample haar_mean_return_time(std::uint64_t orbits, int returns, std::mt19937_64& rng, int burn_in = 3);

/// 1 / (-4 int_0^1 ln(y)/(1+y) dy) by adaptive Gauss-Kronrod.
double kappa_quadrature();

/// int_0^1 ln(y)/(1+y) dy.
double kappa_integral();

}  // namespace cfdyn
