#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "cfdyn/arith.hpp"
#include "cfdyn/cfe.hpp"
#include "cfdyn/parallel.hpp"

namespace cfdyn {

/// Raised when a bound that holds as a theorem fails on computed data.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Weighted histogram on [lo, hi] with equal bins, half-open except the last.
class EmpiricalMeasure {
 public:
  explicit EmpiricalMeasure(std::size_t bins = 256, double lo = 0.0, double hi = 1.0);

  std::size_t bins() const { return weights_.size(); }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double edge(std::size_t k) const;

  std::size_t bin_index(double v) const;
  /// Exact bin of a rational in [0, 1] on the unit range.
  template <class Int>
  std::size_t bin_index(const Rational<Int>& v) const {
    if (lo_ != 0.0 || hi_ != 1.0) return bin_index(v.template to<double>());
    if (v < Rational<Int>(0) || v > Rational<Int>(1)) throw std::domain_error("EmpiricalMeasure: value outside range");
    using W = typename detail::wide<Int>::type;
    const auto k = static_cast<std::size_t>(W(v.num()) * W(bins()) / W(v.den()));
    return k >= bins() ? bins() - 1 : k;
  }

  void add(double v, double w = 1.0) { add_to_bin(bin_index(v), w); }
  void add_to_bin(std::size_t k, double w);
  /// Bin-wise sum; requires identical binning.
  void merge(const EmpiricalMeasure& o);
  void scale(double f);
  /// Overrides the running total, for callers that know it exactly.
  void set_total_weight(double w) { total_ = w; }

  const std::vector<double>& weights() const { return weights_; }
  double total_weight() const { return total_; }
  /// Normalized mass of [lo, edge(k)).
  double cdf_at_edge(std::size_t k) const;

 private:
  double lo_, hi_;
  std::vector<double> weights_;
  double total_ = 0.0;
};

/// nu_{p/q}: orbit points T^i(p/q), i < len, each with weight 1/len.
EmpiricalMeasure nu_pq(const ReducedFraction<std::int64_t>& x, std::size_t bins = 256);

/// sup over bin edges of |CDF_e - log2(1 + s)|.
double ks_distance(const EmpiricalMeasure& e);

struct SweepConfig {
  std::size_t bins = 256;
  std::size_t digit_cap = 32;
  std::vector<double> deltas;
  SweepOptions parallel;
};

struct SweepSummary {
  std::int64_t q = 0;
  std::int64_t phi = 0;
  std::int64_t sum_len = 0;
  std::int64_t sum_len_sq = 0;
  std::int64_t max_len = 0;
  double mean_len = 0.0;
  double var_len = 0.0;
  DigitHistogram digits;
  EmpiricalMeasure nu_bar;
  double ks_to_gauss = 0.0;
  std::int64_t skipped_count = 0;
  /// dispersion[i]: fraction of p with |len/(2 ln q) - ln2/zeta(2)| > deltas[i].
  std::vector<double> dispersion;

  double digit_frequency(std::size_t d) const {
    return static_cast<double>(digits.count(d)) / static_cast<double>(sum_len);
  }
  double heilbronn_ratio() const;
};

/// One pass over (Z/qZ)^x: exact length moments, pooled digit counts,
/// nu_bar_q and dispersion at the configured deltas.
SweepSummary sweep(const Modulus<std::int64_t>& q, const SweepConfig& cfg = {});

inline SweepSummary len_stats(const Modulus<std::int64_t>& q, const SweepConfig& cfg = {}) { return sweep(q, cfg); }

/// Average of nu_pq over all p coprime to q.
EmpiricalMeasure nu_bar(const Modulus<std::int64_t>& q, std::size_t bins = 256, const SweepOptions& opt = {});

/// Fraction of p with |len(p/q)/(2 ln q) - ln2/zeta(2)| > delta.
double dispersion(const Modulus<std::int64_t>& q, double delta, const SweepOptions& opt = {});

/// ln 2 / zeta(2) = 6 ln 2 / pi^2.
double heilbronn_limit();

/// Trapezoid grid on [0, 2 ln q]: n = ceil(T/dt) intervals of width T/n.
struct TimeGrid {
  double T;
  std::int64_t n;
  double h;
  double time(std::int64_t i) const { return h * static_cast<double>(i); }
  double weight(std::int64_t i) const { return (i == 0 || i == n) ? 0.5 : 1.0; }
};
TimeGrid make_time_grid(std::int64_t q, double dt);

/// Trapezoid-weighted fraction of grid times in [0, 2 ln q] with ht >= M.
double orbit_height_tail(const ReducedFraction<std::int64_t>& x, double M, double dt = 0.05);

/// Histogram on the fundamental domain in the coordinates (x, u = 1/y),
/// where Haar measure is uniform with density 3/pi on u <= 1/sqrt(1 - x^2).
class FdHistogram {
 public:
  FdHistogram(std::size_t nx = 16, std::size_t nu = 16);

  std::size_t nx() const { return nx_; }
  std::size_t nu() const { return nu_; }
  static double u_max();

  void add(double x, double y, double w = 1.0);
  void merge(const FdHistogram& o);
  double total_weight() const { return total_; }
  const std::vector<double>& weights() const { return w_; }
  std::vector<double> probabilities() const;
  /// Marginal probabilities of the u coordinate.
  std::vector<double> u_marginal() const;

 private:
  std::size_t nx_, nu_;
  std::vector<double> w_;
  double total_ = 0.0;
};

/// Exact Haar cell probabilities by quadrature over the cell/domain overlap.
std::vector<double> haar_cell_probabilities(std::size_t nx, std::size_t nu);

/// Monte Carlo Haar reference from haar_sample.
FdHistogram haar_reference(std::size_t nx, std::size_t nu, std::uint64_t samples, std::mt19937_64& rng);

/// sum (p - r)^2 / r over cells with r > 0.
double discrepancy(const std::vector<double>& p, const std::vector<double>& r);

struct OrbitSweepConfig {
  double M = 2.0;
  double dt = 0.05;
  std::size_t nx = 16;
  std::size_t nu = 16;
  SweepOptions parallel;
};

struct OrbitSweepResult {
  std::int64_t q = 0;
  std::int64_t phi = 0;
  /// (1/phi) sum_p orbit_height_tail(p/q, M, dt)
  double tail = 0.0;
  FdHistogram fd;
  double max_height = 0.0;
};

/// Walks every orbit t -> x0 u_{p/q} a(t), t in [0, 2 ln q], once and
/// accumulates both the height tail and the fundamental-domain histogram.
OrbitSweepResult orbit_sweep(const Modulus<std::int64_t>& q, const OrbitSweepConfig& cfg = {});

inline FdHistogram fd_histogram(const Modulus<std::int64_t>& q, const OrbitSweepConfig& cfg = {}) {
  return orbit_sweep(q, cfg).fd;
}

struct MassEscapeReport {
  std::int64_t count = 0;
  double bound = 0.0;  // 4 phi(q) / M^2
  std::int64_t phi = 0;
  std::int64_t escalations = 0;
  bool hypothesis_holds = true;
  std::int64_t witness_p = 0;  // some counted p, 0 if none
};

/// #{p : x0 u_{p/q} a(t) has a nonzero vector of norm <= 1/M}. Requires
/// 0 <= t <= ln q - 2 omega(q) unless `unchecked`; throws InvariantViolation
/// if the count exceeds 4 phi(q) / M^2 in that range.
MassEscapeReport mass_escape_count(const Modulus<std::int64_t>& q, double M, double t, bool unchecked = false);

}  // namespace cfdyn
