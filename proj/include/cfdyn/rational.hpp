#pragma once

#include <cmath>
#include <compare>
#include <concepts>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "cfdyn/types.hpp"

namespace cfdyn {

namespace detail {

template <class Int>
inline constexpr bool is_builtin_int = std::is_integral_v<Int>;

template <class Int>
Int checked_mul(const Int& a, const Int& b) {
  if constexpr (is_builtin_int<Int>) {
    Int r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("integer overflow in multiplication");
    return r;
  } else {
    return a * b;
  }
}

template <class Int>
Int checked_add(const Int& a, const Int& b) {
  if constexpr (is_builtin_int<Int>) {
    Int r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("integer overflow in addition");
    return r;
  } else {
    return a + b;
  }
}

template <class Int>
Int checked_sub(const Int& a, const Int& b) {
  if constexpr (is_builtin_int<Int>) {
    Int r;
    if (__builtin_sub_overflow(a, b, &r)) throw std::overflow_error("integer overflow in subtraction");
    return r;
  } else {
    return a - b;
  }
}

// Wide enough type for exact cross-multiplication of two Int values.
template <class Int>
struct wide {
  using type = Int;
};
template <>
struct wide<std::int64_t> {
  using type = __int128;
};
template <>
struct wide<std::int32_t> {
  using type = std::int64_t;
};

template <class Int>
long double to_long_double(const Int& v) {
  if constexpr (is_builtin_int<Int>) {
    return static_cast<long double>(v);
  } else {
    return v.template convert_to<long double>();
  }
}

// Natural log of a positive integer that may exceed long double range.
template <class Int>
long double log_int(const Int& v) {
  if constexpr (is_builtin_int<Int>) {
    return std::log(static_cast<long double>(v));
  } else {
    const std::size_t bits = boost::multiprecision::msb(v) + 1;
    if (bits < 16000) return std::log(v.template convert_to<long double>());
    const std::size_t shift = bits - 64;
    const Int top = v >> shift;
    return std::log(top.template convert_to<long double>()) + static_cast<long double>(shift) * std::log(2.0L);
  }
}

}  // namespace detail

template <class Int>
Int gcd_abs(Int a, Int b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Int r = a % b;
    a = b;
    b = r;
  }
  return a;
}

/// Exact rational number in lowest terms with positive denominator.
///
/// Arithmetic cross-reduces before multiplying so intermediate values stay
/// close to the size of the result; builtin integer types throw
/// std::overflow_error instead of wrapping.
template <class Int>
class Rational {
 public:
  using integer_type = Int;

  Rational() : num_(0), den_(1) {}
  Rational(Int n) : num_(std::move(n)), den_(1) {}  // NOLINT(google-explicit-constructor)
  template <std::integral I>
    requires(!std::is_same_v<I, Int>)
  Rational(I n) : num_(static_cast<Int>(n)), den_(1) {}  // NOLINT(google-explicit-constructor)
  Rational(Int n, Int d) : num_(std::move(n)), den_(std::move(d)) {
    if (den_ == 0) throw std::domain_error("rational with zero denominator");
    normalize();
  }

  const Int& num() const { return num_; }
  const Int& den() const { return den_; }

  Rational operator-() const { return from_reduced(-num_, den_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    const Int g = gcd_abs(a.den_, b.den_);
    const Int da = a.den_ / g;
    const Int db = b.den_ / g;
    Int n = detail::checked_add(detail::checked_mul(a.num_, db), detail::checked_mul(b.num_, da));
    Int d = detail::checked_mul(a.den_, db);
    return Rational(std::move(n), std::move(d));
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    const Int g1 = gcd_abs(a.num_, b.den_);
    const Int g2 = gcd_abs(b.num_, a.den_);
    if (g1 == 0 || g2 == 0) return Rational();
    Int n = detail::checked_mul(Int(a.num_ / g1), Int(b.num_ / g2));
    Int d = detail::checked_mul(Int(a.den_ / g2), Int(b.den_ / g1));
    return from_reduced(std::move(n), std::move(d));
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    Rational inv = b.num_ < 0 ? from_reduced(-b.den_, -b.num_) : from_reduced(b.den_, b.num_);
    return a * inv;
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    using W = typename detail::wide<Int>::type;
    const W lhs = W(a.num_) * W(b.den_);
    const W rhs = W(b.num_) * W(a.den_);
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  /// Largest integer not exceeding the value.
  Int floor() const {
    Int q = num_ / den_;
    if (num_ < 0 && q * den_ != num_) q -= 1;
    return q;
  }

  Rational abs() const { return num_ < 0 ? -*this : *this; }

  template <class Real = double>
  Real to() const {
    if constexpr (detail::is_builtin_int<Int>) {
      return static_cast<Real>(static_cast<long double>(num_) / static_cast<long double>(den_));
    } else {
      using boost::multiprecision::cpp_rational;
      return static_cast<Real>(cpp_rational(num_, den_).template convert_to<long double>());
    }
  }

  /// Natural logarithm of a positive value, accurate for huge components.
  long double log() const {
    if (num_ <= 0) throw std::domain_error("log of non-positive rational");
    return detail::log_int(num_) - detail::log_int(den_);
  }

  std::string str() const {
    std::ostringstream os;
    os << *this;
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    os << r.num_;
    if (r.den_ != 1) os << '/' << r.den_;
    return os;
  }

 private:
  static Rational from_reduced(Int n, Int d) {
    Rational r;
    r.num_ = std::move(n);
    r.den_ = std::move(d);
    return r;
  }

  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const Int g = gcd_abs(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  Int num_;
  Int den_;
};

}  // namespace cfdyn

namespace Eigen {

template <class Int>
struct NumTraits<cfdyn::Rational<Int>> : GenericNumTraits<cfdyn::Rational<Int>> {
  using Real = cfdyn::Rational<Int>;
  using NonInteger = cfdyn::Rational<Int>;
  using Literal = cfdyn::Rational<Int>;
  using Nested = cfdyn::Rational<Int>;
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 4,
    MulCost = 4
  };
  static Real epsilon() { return Real(0); }
  static Real dummy_precision() { return Real(0); }
  static int digits10() { return 0; }
};

}  // namespace Eigen
