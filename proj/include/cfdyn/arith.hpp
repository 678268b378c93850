#pragma once

#include <cmath>
#include <cstdint>
#include <iterator>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "cfdyn/rational.hpp"

namespace cfdyn {

struct PrimePower {
  std::int64_t prime;
  int exponent;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// A positive modulus together with its prime factorization.
/// Conventions for q = 1: no prime factors, phi = 1, omega = 0.
template <class Int = std::int64_t>
class Modulus {
 public:
  Modulus(Int q, std::vector<PrimePower> factors) : q_(std::move(q)), factors_(std::move(factors)) {
    if (q_ < 1) throw std::domain_error("modulus must be positive");
  }

  const Int& value() const { return q_; }
  const std::vector<PrimePower>& prime_factors() const { return factors_; }

  bool is_coprime(const Int& p) const {
    for (const auto& f : factors_)
      if (p % Int(f.prime) == 0) return false;
    return true;
  }

 private:
  Int q_;
  std::vector<PrimePower> factors_;
};

/// Trial division up to sqrt(q); fine for q well below 10^12.
template <class Int = std::int64_t>
Modulus<Int> factorize(Int q) {
  if (q < 1) throw std::domain_error("factorize: q must be >= 1");
  std::vector<PrimePower> out;
  Int n = q;
  for (std::int64_t d = 2; Int(d) * Int(d) <= n; d += (d == 2 ? 1 : 2)) {
    if (n % Int(d) != 0) continue;
    int e = 0;
    while (n % Int(d) == 0) {
      n /= Int(d);
      ++e;
    }
    out.push_back({d, e});
  }
  if (n > 1) out.push_back({static_cast<std::int64_t>(n), 1});
  return Modulus<Int>(std::move(q), std::move(out));
}

/// Smallest-prime-factor table for fast factorization of every q <= limit.
class FactorSieve {
 public:
  explicit FactorSieve(std::int64_t limit);

  std::int64_t limit() const { return static_cast<std::int64_t>(spf_.size()) - 1; }
  Modulus<std::int64_t> factorize(std::int64_t q) const;

 private:
  std::vector<std::int32_t> spf_;
};

template <class Int>
Int euler_phi(const Modulus<Int>& m) {
  Int phi = m.value();
  for (const auto& f : m.prime_factors()) phi = phi / Int(f.prime) * Int(f.prime - 1);
  return phi;
}

template <class Int>
int omega(const Modulus<Int>& m) {
  return static_cast<int>(m.prime_factors().size());
}

/// Forward range over {1 <= p <= q : gcd(p, q) = 1} in increasing order.
/// For q = 1 it yields the single residue 1.
template <class Int = std::int64_t>
class CoprimeResidues {
 public:
  explicit CoprimeResidues(const Modulus<Int>& m) : m_(&m) {}

  class iterator {
   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = Int;
    using difference_type = std::ptrdiff_t;
    using pointer = const Int*;
    using reference = const Int&;

    iterator() = default;
    iterator(const Modulus<Int>* m, Int p) : m_(m), p_(std::move(p)) { skip(); }

    reference operator*() const { return p_; }
    iterator& operator++() {
      ++p_;
      skip();
      return *this;
    }
    iterator operator++(int) {
      iterator tmp = *this;
      ++*this;
      return tmp;
    }
    friend bool operator==(const iterator& a, const iterator& b) { return a.p_ == b.p_; }

   private:
    void skip() {
      const Int& q = m_->value();
      if (q == 1) return;
      while (p_ < q && !m_->is_coprime(p_)) ++p_;
    }
    const Modulus<Int>* m_ = nullptr;
    Int p_{};
  };

  iterator begin() const { return iterator(m_, Int(1)); }
  iterator end() const {
    const Int& q = m_->value();
    return iterator(m_, q == 1 ? Int(2) : q);
  }

 private:
  const Modulus<Int>* m_;
};

template <class Int>
CoprimeResidues<Int> coprime_residues(const Modulus<Int>& m) {
  return CoprimeResidues<Int>(m);
}

/// #{1 <= l <= alpha*q : gcd(l, q) = 1}, exact, by inclusion-exclusion over
/// the squarefree divisors of q.
template <class Int>
Int count_coprime_upto(const Modulus<Int>& m, const Rational<Int>& alpha) {
  if (alpha < Rational<Int>(0) || alpha > Rational<Int>(1))
    throw std::domain_error("count_coprime_upto: alpha must lie in [0, 1]");
  const auto& f = m.prime_factors();
  const std::size_t k = f.size();
  // alpha * q = num * q / den
  const Int scaled = alpha.num() * m.value();
  Int total = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    Int d = 1;
    int bits = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask & (std::size_t{1} << i)) {
        d *= Int(f[i].prime);
        ++bits;
      }
    }
    const Int term = scaled / (alpha.den() * d);
    total += (bits % 2 == 0) ? term : Int(-term);
  }
  return total;
}

/// Returns (g, x, y) with a*x + b*y = g = gcd(a, b).
template <class Int>
std::tuple<Int, Int, Int> extended_gcd(Int a, Int b) {
  Int x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b != 0) {
    Int qt = a / b;
    Int r = a - qt * b;
    a = b;
    b = r;
    Int tx = x0 - qt * x1;
    x0 = x1;
    x1 = tx;
    Int ty = y0 - qt * y1;
    y0 = y1;
    y1 = ty;
  }
  if (a < 0) return {-a, -x0, -y0};
  return {a, x0, y0};
}

template <class Int>
Int mod_inverse(const Int& a, const Int& q) {
  auto [g, x, y] = extended_gcd(Int(((a % q) + q) % q), q);
  (void)y;
  if (g != 1) throw std::domain_error("mod_inverse: argument not invertible");
  return ((x % q) + q) % q;
}

/// The unique p' in (Z/qZ)^x with p * p' = -1 (mod q).
template <class Int>
Int dual_residue(const Int& p, const Modulus<Int>& m) {
  const Int& q = m.value();
  if (q < 2) throw std::domain_error("dual_residue: q must be >= 2");
  if (gcd_abs(p, q) != 1) throw std::domain_error("dual_residue: p is not coprime to q");
  const Int inv = mod_inverse(p, q);
  return (q - inv) % q;
}

}  // namespace cfdyn
