#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>

#include "cfdyn/cfe.hpp"

namespace cfdyn {

/// Closed subinterval [a, b] of [0, 1].
struct Interval {
  double a;
  double b;
};

/// Cylinder of a digit prefix with exact endpoints lo < hi.
template <class Int>
struct CylinderInterval {
  Rational<Int> lo;
  Rational<Int> hi;
  /// True when the prefix convergent p_n/q_n is the left endpoint (n even).
  bool convergent_is_left;

  Interval to_interval() const { return {lo.template to<double>(), hi.template to<double>()}; }
};

/// Gauss-Kuzmin density 1 / ((1 + s) ln 2).
double gauss_density(double s);

/// Gauss-Kuzmin measure of [a, b]: log2((1 + b) / (1 + a)).
double measure_interval(const Interval& i);

/// Gauss-Kuzmin CDF on [0, 1].
inline double gauss_cdf(double s) { return std::log1p(s) / std::numbers::ln2; }

/// Probability that the first digit equals k: log2(1 + 1 / (k (k + 2))).
double digit_probability(std::int64_t k);

/// Gauss-Kuzmin measure of an exact interval; accurate for tiny cylinders.
template <class Int>
double measure_interval(const Rational<Int>& a, const Rational<Int>& b) {
  if (a < Rational<Int>(0) || b > Rational<Int>(1) || b < a)
    throw std::domain_error("measure_interval: need 0 <= a <= b <= 1");
  // log2(1 + (b - a) / (1 + a))
  const Rational<Int> ratio = (b - a) / (Rational<Int>(1) + a);
  return static_cast<double>(std::log1p(ratio.template to<long double>()) / std::numbers::ln2_v<long double>);
}

/// Reals in (0,1) whose expansion starts with `digits`. The endpoints are
/// p_n/q_n and (p_n + p_{n-1})/(q_n + q_{n-1}); which one is on the left
/// depends on the parity of n.
template <class Int>
CylinderInterval<Int> cylinder_interval(std::span<const Int> digits) {
  if (digits.empty()) throw std::domain_error("cylinder_interval: empty prefix");
  const auto c = convergents<Int>(digits);
  const auto& last = c[c.size() - 1];
  const auto& prev = c[c.size() - 2];
  Rational<Int> conv(last.p, last.q);
  Rational<Int> other(last.p + prev.p, last.q + prev.q);
  const bool conv_left = conv < other;
  return conv_left ? CylinderInterval<Int>{conv, other, true} : CylinderInterval<Int>{other, conv, false};
}

template <class Int>
CylinderInterval<Int> cylinder_interval(const CfeWord<Int>& w) {
  return cylinder_interval<Int>(w.digits());
}

/// nu_Gauss of the cylinder of a digit prefix.
template <class Int>
double gauss_word_measure(std::span<const Int> digits) {
  const auto c = cylinder_interval<Int>(digits);
  return measure_interval(c.lo, c.hi);
}

}  // namespace cfdyn
