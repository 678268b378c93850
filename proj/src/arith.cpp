#include "cfdyn/arith.hpp"

namespace cfdyn {

FactorSieve::FactorSieve(std::int64_t limit) {
  if (limit < 1 || limit > (std::int64_t{1} << 31)) throw std::domain_error("FactorSieve: limit out of range");
  spf_.assign(static_cast<std::size_t>(limit) + 1, 0);
  for (std::int64_t i = 2; i <= limit; ++i) {
    if (spf_[i] != 0) continue;
    for (std::int64_t j = i; j <= limit; j += i)
      if (spf_[j] == 0) spf_[j] = static_cast<std::int32_t>(i);
  }
}

Modulus<std::int64_t> FactorSieve::factorize(std::int64_t q) const {
  if (q < 1 || q > limit()) throw std::domain_error("FactorSieve::factorize: q outside sieve range");
  std::vector<PrimePower> out;
  std::int64_t n = q;
  while (n > 1) {
    const std::int64_t p = spf_[n];
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.push_back({p, e});
  }
  return Modulus<std::int64_t>(q, std::move(out));
}

}  // namespace cfdyn
