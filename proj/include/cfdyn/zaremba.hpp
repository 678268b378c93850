#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "cfdyn/cfe.hpp"
#include "cfdyn/parallel.hpp"

namespace cfdyn {

/// Counts of Lambda_{q,K} for 2 <= q <= Q. Relaxed membership: canonical
/// digits a_i <= K for i < n and a_n <= K + 1 (the word ending in K + 1 is
/// also [.., K, 1]). Strict membership: every canonical digit <= K.
struct ZarembaCensus {
  std::int64_t K = 0;
  std::int64_t Q = 0;
  std::vector<std::int64_t> relaxed;  // indexed by q, size Q + 1
  std::vector<std::int64_t> strict;

  std::int64_t count(std::int64_t q) const { return relaxed.at(static_cast<std::size_t>(q)); }
  std::int64_t count_strict(std::int64_t q) const { return strict.at(static_cast<std::size_t>(q)); }
  std::int64_t total(std::int64_t q_max) const;
  void merge(const ZarembaCensus& o);
};

bool zaremba_member(const CfeWord<std::int64_t>& w, std::int64_t K, bool strict = false);

/// Depth-first walk of the convergent recursion q_{k+1} = a q_k + q_{k-1},
/// pruned at q > Q. Branches on the first digit are run in parallel.
ZarembaCensus enumerate_bounded(std::int64_t Q, std::int64_t K, const SweepOptions& opt = {});

/// Visits every relaxed member p/q with q <= Q (order unspecified within a
/// first-digit branch, branches in increasing a_1).
void for_each_bounded(std::int64_t Q, std::int64_t K,
                      const std::function<void(std::int64_t p, std::int64_t q, bool strict)>& visit);

/// Census by filtering cfe_digits over all reduced p/q with q <= Q.
ZarembaCensus brute_force_census(std::int64_t Q, std::int64_t K);

struct ExponentFit {
  double exponent;
  double intercept;
  int windows;
};

/// Least-squares slope of ln(mean |Lambda_{q,K}|) against ln(mean q) over
/// the dyadic windows [2^j, 2^{j+1}) inside [min_q, Q]. Windows with zero
/// mean are skipped; at least four are required.
ExponentFit exponent_fit(const ZarembaCensus& c, std::int64_t min_q = 16);

struct HeightBoundReport {
  std::int64_t q = 0;
  std::int64_t K = 0;
  double bound = 0.0;  // sqrt(2 (K + 1)^3)
  double max_height = 0.0;
  std::int64_t argmax_p = 0;
  double argmax_t = 0.0;
  std::int64_t members = 0;
  std::int64_t violations = 0;
};

/// Samples ht along t in [0, 2 ln q] for every p in Lambda_{q,K} and compares
/// with sqrt(2 (K+1)^3). Throws InvariantViolation with the witness unless
/// `report_only`.
HeightBoundReport height_bound_check(std::int64_t q, std::int64_t K, double dt = 0.05, bool report_only = false);

struct DualClosure {
  std::int64_t members = 0;
  std::int64_t dual_members = 0;  // p in Lambda with p' also in Lambda
};

/// Measures how often p' (p p' = -1 mod q) stays in Lambda_{q,K}.
DualClosure dual_closure(std::int64_t q, std::int64_t K);

/// CSV rows: q,count_relaxed,count_strict.
void write_census_csv(std::ostream& os, const ZarembaCensus& c);

}  // namespace cfdyn
