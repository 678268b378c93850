#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cfdyn/rational.hpp"

namespace cfdyn {

/// p/q in lowest terms with 0 < p < q.
template <class Int = std::int64_t>
class ReducedFraction {
 public:
  ReducedFraction(Int p, Int q) : p_(std::move(p)), q_(std::move(q)) {
    if (!(p_ > 0 && p_ < q_)) throw std::domain_error("ReducedFraction: need 0 < p < q");
    if (gcd_abs(p_, q_) != 1) throw std::domain_error("ReducedFraction: p and q must be coprime");
  }

  const Int& p() const { return p_; }
  const Int& q() const { return q_; }

  Rational<Int> value() const { return Rational<Int>(p_, q_); }
  double to_double() const { return value().template to<double>(); }

  friend bool operator==(const ReducedFraction&, const ReducedFraction&) = default;

 private:
  Int p_;
  Int q_;
};

/// Canonical continued-fraction word [a1, ..., an]: every digit >= 1 and
/// the last digit >= 2 whenever n >= 2.
template <class Int = std::int64_t>
class CfeWord {
 public:
  explicit CfeWord(std::vector<Int> digits) : digits_(std::move(digits)) {
    if (digits_.empty()) throw std::domain_error("CfeWord: empty word");
    for (const auto& a : digits_)
      if (a < 1) throw std::domain_error("CfeWord: digits must be positive");
    if (digits_.size() >= 2 && digits_.back() == 1)
      throw std::domain_error("CfeWord: non-canonical word (trailing digit 1)");
    if (digits_.size() == 1 && digits_.front() == 1)
      throw std::domain_error("CfeWord: [1] is the endpoint 1, outside (0,1)");
  }

  std::span<const Int> digits() const { return digits_; }
  std::size_t size() const { return digits_.size(); }
  const Int& operator[](std::size_t i) const { return digits_[i]; }
  const Int& back() const { return digits_.back(); }

  friend bool operator==(const CfeWord&, const CfeWord&) = default;

 private:
  std::vector<Int> digits_;
};

template <class Int>
struct Convergent {
  Int p;
  Int q;
};

/// (p_k, q_k) for k = 0..n with (p_0, q_0) = (0, 1) and the recursion
/// q_{k+1} = a_{k+1} q_k + q_{k-1} seeded by (p_{-1}, q_{-1}) = (1, 0).
template <class Int>
using ConvergentList = std::vector<Convergent<Int>>;

/// T(x) = {1/x}. Returns nullopt (the distinguished Zero) when 1/x is an integer.
template <class Int>
std::optional<ReducedFraction<Int>> gauss_map(const ReducedFraction<Int>& x) {
  Int r = x.q() % x.p();
  if (r == 0) return std::nullopt;
  return ReducedFraction<Int>(std::move(r), x.p());
}

template <class Int>
CfeWord<Int> cfe_digits(const ReducedFraction<Int>& x) {
  std::vector<Int> digits;
  Int num = x.p();
  Int den = x.q();
  while (num != 0) {
    Int a = den / num;
    Int r = den - a * num;
    digits.push_back(std::move(a));
    den = std::move(num);
    num = std::move(r);
  }
  return CfeWord<Int>(std::move(digits));
}

/// Number of Gauss-map steps until the orbit reaches 0.
template <class Int>
std::size_t cfe_len(const ReducedFraction<Int>& x) {
  std::size_t n = 0;
  Int num = x.p();
  Int den = x.q();
  while (num != 0) {
    Int r = den % num;
    den = std::move(num);
    num = std::move(r);
    ++n;
  }
  return n;
}

/// Accepts any sequence of positive digits (cylinder prefixes need not be canonical).
template <class Int>
ConvergentList<Int> convergents(std::span<const Int> digits) {
  ConvergentList<Int> out;
  out.reserve(digits.size() + 1);
  Int p_prev = 1, q_prev = 0;
  Int p_cur = 0, q_cur = 1;
  out.push_back({p_cur, q_cur});
  for (const auto& a : digits) {
    if (a < 1) throw std::domain_error("convergents: digits must be positive");
    Int p_next = detail::checked_add(detail::checked_mul(a, p_cur), p_prev);
    Int q_next = detail::checked_add(detail::checked_mul(a, q_cur), q_prev);
    p_prev = std::move(p_cur);
    q_prev = std::move(q_cur);
    p_cur = std::move(p_next);
    q_cur = std::move(q_next);
    out.push_back({p_cur, q_cur});
  }
  return out;
}

template <class Int>
ConvergentList<Int> convergents(const CfeWord<Int>& w) {
  return convergents<Int>(w.digits());
}

template <class Int>
ReducedFraction<Int> from_digits(const CfeWord<Int>& w) {
  const auto c = convergents(w);
  return ReducedFraction<Int>(c.back().p, c.back().q);
}

/// Counts of digit values 1..cap; larger digits go to the overflow bucket.
struct DigitHistogram {
  std::vector<std::uint64_t> counts;  // counts[d - 1]
  std::uint64_t overflow = 0;

  explicit DigitHistogram(std::size_t cap = 0) : counts(cap, 0) {}

  std::size_t cap() const { return counts.size(); }
  std::uint64_t total() const {
    std::uint64_t t = overflow;
    for (auto c : counts) t += c;
    return t;
  }
  std::uint64_t count(std::size_t digit) const { return counts.at(digit - 1); }

  template <class Int>
  void add(const Int& digit) {
    if (digit <= Int(counts.size()))
      ++counts[static_cast<std::size_t>(digit) - 1];
    else
      ++overflow;
  }
  void merge(const DigitHistogram& o) {
    if (o.cap() != cap()) throw std::invalid_argument("DigitHistogram::merge: cap mismatch");
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
    overflow += o.overflow;
  }
};

template <class Int>
DigitHistogram digit_histogram(const CfeWord<Int>& w, std::size_t cap) {
  if (cap < 1) throw std::domain_error("digit_histogram: cap must be >= 1");
  DigitHistogram h(cap);
  for (const auto& a : w.digits()) h.add(a);
  return h;
}

/// Sliding-window occurrences of a digit pattern in the expansion of x,
/// divided by len(x). Patterns need not be canonical words.
template <class Int>
Rational<std::int64_t> word_frequency(const ReducedFraction<Int>& x, std::span<const Int> pattern) {
  if (pattern.empty()) throw std::domain_error("word_frequency: empty pattern");
  const auto digits = cfe_digits(x);
  const auto d = digits.digits();
  std::int64_t hits = 0;
  if (pattern.size() <= d.size()) {
    for (std::size_t i = 0; i + pattern.size() <= d.size(); ++i) {
      bool match = true;
      for (std::size_t j = 0; j < pattern.size() && match; ++j) match = (d[i + j] == pattern[j]);
      if (match) ++hits;
    }
  }
  return Rational<std::int64_t>(hits, static_cast<std::int64_t>(d.size()));
}

template <class Int>
Rational<std::int64_t> word_frequency(const ReducedFraction<Int>& x, const CfeWord<Int>& word) {
  return word_frequency(x, word.digits());
}

}  // namespace cfdyn
