#include "cfdyn/zaremba.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "cfdyn/arith.hpp"
#include "cfdyn/lattice.hpp"
#include "cfdyn/stats.hpp"

namespace cfdyn {

std::int64_t ZarembaCensus::total(std::int64_t q_max) const {
  std::int64_t s = 0;
  for (std::int64_t q = 2; q <= std::min(q_max, Q); ++q) s += relaxed[static_cast<std::size_t>(q)];
  return s;
}

void ZarembaCensus::merge(const ZarembaCensus& o) {
  if (o.K != K || o.Q != Q) throw std::invalid_argument("ZarembaCensus::merge: K or Q mismatch");
  for (std::size_t i = 0; i < relaxed.size(); ++i) {
    relaxed[i] += o.relaxed[i];
    strict[i] += o.strict[i];
  }
}

bool zaremba_member(const CfeWord<std::int64_t>& w, std::int64_t K, bool strict) {
  const auto d = w.digits();
  for (std::size_t i = 0; i + 1 < d.size(); ++i)
    if (d[i] > K) return false;
  return d.back() <= (strict ? K : K + 1);
}

namespace {

void check_args(std::int64_t Q, std::int64_t K) {
  if (K < 1) throw std::domain_error("zaremba: need K >= 1");
  if (Q < 2) throw std::domain_error("zaremba: need Q >= 2");
}

// Words [a_1, .., a_k] with all digits <= K; (p, q) the current convergent.
// Each node can be closed with a final digit a_n in [2, K + 1].
template <class F>
void dfs(std::int64_t Q, std::int64_t K, std::int64_t p_prev, std::int64_t q_prev, std::int64_t p, std::int64_t q,
         F& visit) {
  for (std::int64_t a = 2; a <= K + 1; ++a) {
    const std::int64_t qn = a * q + q_prev;
    if (qn > Q) break;
    visit(a * p + p_prev, qn, a <= K);
  }
  for (std::int64_t a = 1; a <= K; ++a) {
    const std::int64_t qn = a * q + q_prev;
    // an interior digit must be followed by a final digit >= 2
    if (2 * qn + q > Q) break;
    dfs(Q, K, p, q, a * p + p_prev, qn, visit);
  }
}

// All members whose first digit is a1.
template <class F>
void branch(std::int64_t Q, std::int64_t K, std::int64_t a1, F& visit) {
  // single-digit word [a1] = 1/a1 needs a1 >= 2
  if (a1 >= 2 && a1 <= K + 1 && a1 <= Q) visit(1, a1, a1 <= K);
  if (a1 <= K) dfs(Q, K, 0, 1, 1, a1, visit);
}

}  // namespace

void for_each_bounded(std::int64_t Q, std::int64_t K,
                      const std::function<void(std::int64_t, std::int64_t, bool)>& visit) {
  check_args(Q, K);
  for (std::int64_t a1 = 1; a1 <= K + 1; ++a1) branch(Q, K, a1, visit);
}

ZarembaCensus enumerate_bounded(std::int64_t Q, std::int64_t K, const SweepOptions& opt) {
  check_args(Q, K);
  auto empty = [&]() {
    ZarembaCensus c;
    c.K = K;
    c.Q = Q;
    c.relaxed.assign(static_cast<std::size_t>(Q + 1), 0);
    c.strict.assign(static_cast<std::size_t>(Q + 1), 0);
    return c;
  };
  SweepOptions branches = opt;
  branches.chunk = 1;
  return chunked_reduce(
      1, K + 2, branches, empty(),
      [&](std::int64_t lo, std::int64_t hi) {
        ZarembaCensus c = empty();
        auto visit = [&](std::int64_t, std::int64_t q, bool strict) {
          ++c.relaxed[static_cast<std::size_t>(q)];
          if (strict) ++c.strict[static_cast<std::size_t>(q)];
        };
        for (std::int64_t a1 = lo; a1 < hi; ++a1) branch(Q, K, a1, visit);
        return c;
      },
      [](ZarembaCensus& a, const ZarembaCensus& b) { a.merge(b); });
}

ZarembaCensus brute_force_census(std::int64_t Q, std::int64_t K) {
  check_args(Q, K);
  ZarembaCensus c;
  c.K = K;
  c.Q = Q;
  c.relaxed.assign(static_cast<std::size_t>(Q + 1), 0);
  c.strict.assign(static_cast<std::size_t>(Q + 1), 0);
  for (std::int64_t q = 2; q <= Q; ++q) {
    for (std::int64_t p = 1; p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      const auto w = cfe_digits(ReducedFraction<std::int64_t>(p, q));
      if (zaremba_member(w, K)) ++c.relaxed[static_cast<std::size_t>(q)];
      if (zaremba_member(w, K, true)) ++c.strict[static_cast<std::size_t>(q)];
    }
  }
  return c;
}

ExponentFit exponent_fit(const ZarembaCensus& c, std::int64_t min_q) {
  std::vector<double> xs, ys;
  std::int64_t lo = 1;
  while (lo < std::max<std::int64_t>(min_q, 2)) lo *= 2;
  for (; 2 * lo - 1 <= c.Q; lo *= 2) {
    const std::int64_t hi = 2 * lo;
    double sum_q = 0.0, sum_c = 0.0;
    for (std::int64_t q = lo; q < hi; ++q) {
      sum_q += static_cast<double>(q);
      sum_c += static_cast<double>(c.count(q));
    }
    const double n = static_cast<double>(hi - lo);
    if (sum_c <= 0.0) continue;
    xs.push_back(std::log(sum_q / n));
    ys.push_back(std::log(sum_c / n));
  }
  if (xs.size() < 4) throw std::domain_error("exponent_fit: fewer than 4 usable dyadic windows");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx, static_cast<int>(xs.size())};
}

HeightBoundReport height_bound_check(std::int64_t q, std::int64_t K, double dt, bool report_only) {
  if (q < 2 || q > 1000000) throw std::domain_error("height_bound_check: need 2 <= q <= 10^6");
  if (K < 1) throw std::domain_error("height_bound_check: need K >= 1");
  if (!(dt > 0.0 && dt <= 0.1)) throw std::domain_error("height_bound_check: need 0 < dt <= 0.1");
  HeightBoundReport rep;
  rep.q = q;
  rep.K = K;
  rep.bound = std::sqrt(2.0 * std::pow(static_cast<double>(K + 1), 3));
  const TimeGrid grid = make_time_grid(q, dt);
  std::int64_t first_p = 0;
  double first_t = 0.0, first_ht = 0.0;
  for (std::int64_t p = 1; p < q; ++p) {
    if (std::gcd(p, q) != 1) continue;
    if (!zaremba_member(cfe_digits(ReducedFraction<std::int64_t>(p, q)), K)) continue;
    ++rep.members;
    OrbitTrack track(p, q);
    for (std::int64_t i = 0; i <= grid.n; ++i) {
      track.set_time(grid.time(i));
      const double ht = track.height();
      if (ht > rep.max_height) {
        rep.max_height = ht;
        rep.argmax_p = p;
        rep.argmax_t = grid.time(i);
      }
      if (ht > rep.bound) {
        if (rep.violations++ == 0) {
          first_p = p;
          first_t = grid.time(i);
          first_ht = ht;
        }
      }
    }
  }
  if (rep.violations > 0 && !report_only)
    throw InvariantViolation("height_bound_check: ht=" + std::to_string(first_ht) + " exceeds " +
                             std::to_string(rep.bound) + " at p=" + std::to_string(first_p) +
                             " q=" + std::to_string(q) + " t=" + std::to_string(first_t));
  return rep;
}

DualClosure dual_closure(std::int64_t q, std::int64_t K) {
  if (q < 3) throw std::domain_error("dual_closure: need q >= 3");
  const auto m = factorize<std::int64_t>(q);
  DualClosure d;
  for (std::int64_t p = 1; p < q; ++p) {
    if (!m.is_coprime(p)) continue;
    if (!zaremba_member(cfe_digits(ReducedFraction<std::int64_t>(p, q)), K)) continue;
    ++d.members;
    const std::int64_t pd = dual_residue(p, m);
    if (zaremba_member(cfe_digits(ReducedFraction<std::int64_t>(pd, q)), K)) ++d.dual_members;
  }
  return d;
}

void write_census_csv(std::ostream& os, const ZarembaCensus& c) {
  os << "q,count_relaxed,count_strict\n";
  for (std::int64_t q = 2; q <= c.Q; ++q) os << q << ',' << c.count(q) << ',' << c.count_strict(q) << '\n';
}

}  // namespace cfdyn
