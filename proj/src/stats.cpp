#include "cfdyn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cfdyn/gauss_measure.hpp"
#include "cfdyn/lattice.hpp"

namespace cfdyn {

EmpiricalMeasure::EmpiricalMeasure(std::size_t bins, double lo, double hi) : lo_(lo), hi_(hi), weights_(bins, 0.0) {
  if (bins == 0) throw std::domain_error("EmpiricalMeasure: need at least one bin");
  if (!(lo < hi)) throw std::domain_error("EmpiricalMeasure: need lo < hi");
}

double EmpiricalMeasure::edge(std::size_t k) const {
  if (k == bins()) return hi_;
  return lo_ + (hi_ - lo_) * static_cast<double>(k) / static_cast<double>(bins());
}

std::size_t EmpiricalMeasure::bin_index(double v) const {
  if (!(v >= lo_ && v <= hi_)) throw std::domain_error("EmpiricalMeasure: value outside range");
  const auto k = static_cast<std::size_t>((v - lo_) / (hi_ - lo_) * static_cast<double>(bins()));
  return std::min(k, bins() - 1);
}

void EmpiricalMeasure::add_to_bin(std::size_t k, double w) {
  if (!(w >= 0.0)) throw std::domain_error("EmpiricalMeasure: negative weight");
  weights_.at(k) += w;
  total_ += w;
}

void EmpiricalMeasure::merge(const EmpiricalMeasure& o) {
  if (o.bins() != bins() || o.lo_ != lo_ || o.hi_ != hi_)
    throw std::invalid_argument("EmpiricalMeasure::merge: incompatible binning");
  for (std::size_t k = 0; k < bins(); ++k) weights_[k] += o.weights_[k];
  total_ += o.total_;
}

void EmpiricalMeasure::scale(double f) {
  for (auto& w : weights_) w *= f;
  total_ *= f;
}

double EmpiricalMeasure::cdf_at_edge(std::size_t k) const {
  if (total_ <= 0.0) throw std::domain_error("EmpiricalMeasure: empty measure");
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += weights_[i];
  return s / total_;
}

namespace {

// Gauss orbit of p/q as (numerator, denominator) pairs; returns len.
template <class F>
std::int64_t walk_orbit(std::int64_t p, std::int64_t q, F&& visit) {
  std::int64_t num = p, den = q, len = 0;
  while (num != 0) {
    const std::int64_t a = den / num;
    visit(num, den, a);
    const std::int64_t r = den - a * num;
    den = num;
    num = r;
    ++len;
  }
  return len;
}

std::size_t exact_bin(std::int64_t num, std::int64_t den, std::size_t bins) {
  const auto k = static_cast<std::size_t>(static_cast<__int128>(num) * static_cast<__int128>(bins) / den);
  return std::min(k, bins - 1);
}

}  // namespace

EmpiricalMeasure nu_pq(const ReducedFraction<std::int64_t>& x, std::size_t bins) {
  EmpiricalMeasure e(bins);
  std::vector<std::size_t> hits;
  const std::int64_t len = walk_orbit(x.p(), x.q(), [&](std::int64_t n, std::int64_t d, std::int64_t) {
    hits.push_back(exact_bin(n, d, bins));
  });
  const double w = 1.0 / static_cast<double>(len);
  for (auto k : hits) e.add_to_bin(k, w);
  e.set_total_weight(1.0);
  return e;
}

double ks_distance(const EmpiricalMeasure& e) {
  if (e.lo() != 0.0 || e.hi() != 1.0) throw std::invalid_argument("ks_distance: measure must live on [0, 1]");
  double worst = 0.0, s = 0.0;
  for (std::size_t k = 0; k <= e.bins(); ++k) {
    worst = std::max(worst, std::abs(s / e.total_weight() - gauss_cdf(e.edge(k))));
    if (k < e.bins()) s += e.weights()[k];
  }
  return worst;
}

double heilbronn_limit() { return 6.0 * std::numbers::ln2 / (std::numbers::pi * std::numbers::pi); }

double SweepSummary::heilbronn_ratio() const { return mean_len / (2.0 * std::log(static_cast<double>(q))); }

namespace {

struct SweepPartial {
  std::int64_t phi = 0, sum_len = 0, sum_len_sq = 0, max_len = 0;
  DigitHistogram digits;
  EmpiricalMeasure hist;
  std::vector<std::int64_t> dispersed;

  SweepPartial(std::size_t cap, std::size_t bins, std::size_t n_delta)
      : digits(cap), hist(bins), dispersed(n_delta, 0) {}

  void merge(const SweepPartial& o) {
    phi += o.phi;
    sum_len += o.sum_len;
    sum_len_sq += o.sum_len_sq;
    max_len = std::max(max_len, o.max_len);
    digits.merge(o.digits);
    hist.merge(o.hist);
    for (std::size_t i = 0; i < dispersed.size(); ++i) dispersed[i] += o.dispersed[i];
  }
};

}  // namespace

SweepSummary sweep(const Modulus<std::int64_t>& m, const SweepConfig& cfg) {
  const std::int64_t q = m.value();
  if (q < 3) throw std::domain_error("sweep: need q >= 3");
  if (cfg.bins == 0 || cfg.digit_cap == 0) throw std::domain_error("sweep: bins and digit cap must be positive");
  for (double d : cfg.deltas)
    if (!(d > 0.0)) throw std::domain_error("sweep: delta must be positive");
  const double two_ln_q = 2.0 * std::log(static_cast<double>(q));
  const double limit = heilbronn_limit();
  const std::size_t bins = cfg.bins;

  auto work = [&](std::int64_t lo, std::int64_t hi) {
    SweepPartial part(cfg.digit_cap, bins, cfg.deltas.size());
    std::vector<std::size_t> hits;
    for (std::int64_t p = lo; p < hi; ++p) {
      if (!m.is_coprime(p)) continue;
      hits.clear();
      const std::int64_t len = walk_orbit(p, q, [&](std::int64_t n, std::int64_t d, std::int64_t a) {
        hits.push_back(exact_bin(n, d, bins));
        part.digits.add(a);
      });
      const double w = 1.0 / static_cast<double>(len);
      for (auto k : hits) part.hist.add_to_bin(k, w);
      ++part.phi;
      part.sum_len += len;
      part.sum_len_sq += len * len;
      part.max_len = std::max(part.max_len, len);
      const double dev = std::abs(static_cast<double>(len) / two_ln_q - limit);
      for (std::size_t i = 0; i < cfg.deltas.size(); ++i)
        if (dev > cfg.deltas[i]) ++part.dispersed[i];
    }
    return part;
  };
  SweepPartial total = chunked_reduce(1, q, cfg.parallel, SweepPartial(cfg.digit_cap, bins, cfg.deltas.size()), work,
                                      [](SweepPartial& a, const SweepPartial& b) { a.merge(b); });

  SweepSummary s;
  s.q = q;
  s.phi = total.phi;
  s.sum_len = total.sum_len;
  s.sum_len_sq = total.sum_len_sq;
  s.max_len = total.max_len;
  const long double phi = static_cast<long double>(total.phi);
  s.mean_len = static_cast<double>(static_cast<long double>(total.sum_len) / phi);
  const __int128 num = static_cast<__int128>(total.phi) * total.sum_len_sq -
                       static_cast<__int128>(total.sum_len) * total.sum_len;
  s.var_len = static_cast<double>(static_cast<long double>(num) / (phi * phi));
  s.digits = std::move(total.digits);
  s.nu_bar = std::move(total.hist);
  s.nu_bar.scale(1.0 / static_cast<double>(total.phi));
  s.nu_bar.set_total_weight(1.0);
  s.ks_to_gauss = ks_distance(s.nu_bar);
  for (auto c : total.dispersed) s.dispersion.push_back(static_cast<double>(c) / static_cast<double>(total.phi));
  return s;
}

EmpiricalMeasure nu_bar(const Modulus<std::int64_t>& q, std::size_t bins, const SweepOptions& opt) {
  SweepConfig cfg;
  cfg.bins = bins;
  cfg.parallel = opt;
  return sweep(q, cfg).nu_bar;
}

double dispersion(const Modulus<std::int64_t>& q, double delta, const SweepOptions& opt) {
  SweepConfig cfg;
  cfg.deltas = {delta};
  cfg.parallel = opt;
  return sweep(q, cfg).dispersion.front();
}

TimeGrid make_time_grid(std::int64_t q, double dt) {
  if (!(dt > 0.0)) throw std::domain_error("make_time_grid: dt must be positive");
  const double T = 2.0 * std::log(static_cast<double>(q));
  const auto n = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(T / dt)));
  return {T, n, T / static_cast<double>(n)};
}

double orbit_height_tail(const ReducedFraction<std::int64_t>& x, double M, double dt) {
  if (!(M >= 1.0)) throw std::domain_error("orbit_height_tail: need M >= 1");
  if (!(dt > 0.0 && dt <= 0.1)) throw std::domain_error("orbit_height_tail: need 0 < dt <= 0.1");
  const TimeGrid grid = make_time_grid(x.q(), dt);
  OrbitTrack track(x.p(), x.q());
  double hit = 0.0;
  for (std::int64_t i = 0; i <= grid.n; ++i) {
    track.set_time(grid.time(i));
    if (track.height() >= M) hit += grid.weight(i);
  }
  return hit / static_cast<double>(grid.n);
}

FdHistogram::FdHistogram(std::size_t nx, std::size_t nu) : nx_(nx), nu_(nu), w_(nx * nu, 0.0) {
  if (nx == 0 || nu == 0) throw std::domain_error("FdHistogram: grid must be nonempty");
}

double FdHistogram::u_max() { return 2.0 / std::numbers::sqrt3; }

void FdHistogram::add(double x, double y, double w) {
  const double u = 1.0 / y;
  const auto ix = std::min(nx_ - 1, static_cast<std::size_t>(std::max(0.0, (x + 0.5) * static_cast<double>(nx_))));
  const auto iu = std::min(nu_ - 1, static_cast<std::size_t>(std::max(0.0, u / u_max() * static_cast<double>(nu_))));
  w_[ix * nu_ + iu] += w;
  total_ += w;
}

void FdHistogram::merge(const FdHistogram& o) {
  if (o.nx_ != nx_ || o.nu_ != nu_) throw std::invalid_argument("FdHistogram::merge: grid mismatch");
  for (std::size_t i = 0; i < w_.size(); ++i) w_[i] += o.w_[i];
  total_ += o.total_;
}

std::vector<double> FdHistogram::probabilities() const {
  std::vector<double> p(w_.size(), 0.0);
  if (total_ > 0.0)
    for (std::size_t i = 0; i < w_.size(); ++i) p[i] = w_[i] / total_;
  return p;
}

std::vector<double> FdHistogram::u_marginal() const {
  std::vector<double> m(nu_, 0.0);
  const auto p = probabilities();
  for (std::size_t ix = 0; ix < nx_; ++ix)
    for (std::size_t iu = 0; iu < nu_; ++iu) m[iu] += p[ix * nu_ + iu];
  return m;
}

std::vector<double> haar_cell_probabilities(std::size_t nx, std::size_t nu) {
  using boost::math::quadrature::gauss_kronrod;
  const double du = FdHistogram::u_max() / static_cast<double>(nu);
  std::vector<double> out(nx * nu, 0.0);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    const double x0 = -0.5 + static_cast<double>(ix) / static_cast<double>(nx);
    const double x1 = -0.5 + static_cast<double>(ix + 1) / static_cast<double>(nx);
    for (std::size_t iu = 0; iu < nu; ++iu) {
      const double u0 = du * static_cast<double>(iu), u1 = u0 + du;
      auto f = [&](double x) { return std::clamp(1.0 / std::sqrt(1.0 - x * x) - u0, 0.0, u1 - u0); };
      // split at the kinks where the arc u = 1/sqrt(1 - x^2) meets u0 or u1
      std::vector<double> cuts{x0, x1};
      for (double u : {u0, u1}) {
        if (u <= 1.0) continue;
        const double xk = std::sqrt(1.0 - 1.0 / (u * u));
        for (double c : {-xk, xk})
          if (c > x0 && c < x1) cuts.push_back(c);
      }
      std::sort(cuts.begin(), cuts.end());
      double area = 0.0;
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
        area += gauss_kronrod<double, 31>::integrate(f, cuts[k], cuts[k + 1], 10, 1e-14);
      out[ix * nu + iu] = 3.0 / std::numbers::pi * area;
    }
  }
  return out;
}

FdHistogram haar_reference(std::size_t nx, std::size_t nu, std::uint64_t samples, std::mt19937_64& rng) {
  FdHistogram h(nx, nu);
  for (std::uint64_t i = 0; i < samples; ++i) {
    const auto z = to_fundamental_domain(haar_sample(rng));
    h.add(z.x, z.y);
  }
  return h;
}

double discrepancy(const std::vector<double>& p, const std::vector<double>& r) {
  if (p.size() != r.size()) throw std::invalid_argument("discrepancy: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (r[i] > 0.0) s += (p[i] - r[i]) * (p[i] - r[i]) / r[i];
  return s;
}

namespace {

struct OrbitPartial {
  std::int64_t phi = 0;
  double tail = 0.0;
  double max_height = 0.0;
  FdHistogram fd;

  OrbitPartial(std::size_t nx, std::size_t nu) : fd(nx, nu) {}
  void merge(const OrbitPartial& o) {
    phi += o.phi;
    tail += o.tail;
    max_height = std::max(max_height, o.max_height);
    fd.merge(o.fd);
  }
};

}  // namespace

OrbitSweepResult orbit_sweep(const Modulus<std::int64_t>& m, const OrbitSweepConfig& cfg) {
  const std::int64_t q = m.value();
  if (q < 3) throw std::domain_error("orbit_sweep: need q >= 3");
  if (!(cfg.M >= 1.0)) throw std::domain_error("orbit_sweep: need M >= 1");
  if (!(cfg.dt > 0.0 && cfg.dt <= 0.1)) throw std::domain_error("orbit_sweep: need 0 < dt <= 0.1");
  const TimeGrid grid = make_time_grid(q, cfg.dt);
  const double inv_n = 1.0 / static_cast<double>(grid.n);

  auto work = [&](std::int64_t lo, std::int64_t hi) {
    OrbitPartial part(cfg.nx, cfg.nu);
    for (std::int64_t p = lo; p < hi; ++p) {
      if (!m.is_coprime(p)) continue;
      OrbitTrack track(p, q);
      double hit = 0.0;
      for (std::int64_t i = 0; i <= grid.n; ++i) {
        track.set_time(grid.time(i));
        const double w = grid.weight(i);
        const double ht = track.height();
        if (ht >= cfg.M) hit += w;
        part.max_height = std::max(part.max_height, ht);
        double x, y;
        track.fd_point(x, y);
        part.fd.add(x, y, w * inv_n);
      }
      part.tail += hit * inv_n;
      ++part.phi;
    }
    return part;
  };
  OrbitPartial total = chunked_reduce(1, q, cfg.parallel, OrbitPartial(cfg.nx, cfg.nu), work,
                                      [](OrbitPartial& a, const OrbitPartial& b) { a.merge(b); });
  OrbitSweepResult r{q, total.phi, total.tail / static_cast<double>(total.phi), std::move(total.fd), total.max_height};
  return r;
}

MassEscapeReport mass_escape_count(const Modulus<std::int64_t>& m, double M, double t, bool unchecked) {
  const std::int64_t q = m.value();
  if (q < 2) throw std::domain_error("mass_escape_count: need q >= 2");
  if (!(M > 1.0)) throw std::domain_error("mass_escape_count: need M > 1");
  const double t_max = std::log(static_cast<double>(q)) - 2.0 * omega(m);
  MassEscapeReport rep;
  rep.hypothesis_holds = (t >= 0.0 && t <= t_max);
  if (!rep.hypothesis_holds && !unchecked)
    throw std::domain_error("mass_escape_count: t outside [0, ln q - 2 omega(q)]");
  if (!(t >= 0.0)) throw std::domain_error("mass_escape_count: t must be nonnegative");
  rep.phi = euler_phi(m);
  rep.bound = 4.0 * static_cast<double>(rep.phi) / (M * M);

  const long double et = std::exp(static_cast<long double>(t));
  const long double rhs = 1.0L / (static_cast<long double>(M) * static_cast<long double>(M));
  const long double qq = static_cast<long double>(q) * static_cast<long double>(q);
  const auto m_max = static_cast<std::int64_t>(std::floor(std::exp(t / 2.0) / M));
  const Float50 et50 = boost::multiprecision::exp(Float50(t));
  const Float50 rhs50 = Float50(1) / (Float50(M) * Float50(M));

  for (std::int64_t p = 1; p < q; ++p) {
    if (!m.is_coprime(p)) continue;
    bool bad = false;
    for (std::int64_t mm = 1; mm <= m_max && !bad; ++mm) {
      const std::int64_t r = static_cast<std::int64_t>((static_cast<__int128>(mm) * p) % q);
      for (std::int64_t k : {r, r - q}) {
        // |(mm, n) g|^2 with k = mm p + n q
        const long double lhs = static_cast<long double>(mm) * mm / et + static_cast<long double>(k) * k * et / qq;
        if (std::abs(lhs - rhs) <= std::ldexp(rhs, -40)) {
          ++rep.escalations;
          const Float50 l50 = Float50(mm) * Float50(mm) / et50 + Float50(k) * Float50(k) * et50 / (Float50(q) * Float50(q));
          if (l50 <= rhs50) bad = true;
        } else if (lhs <= rhs) {
          bad = true;
        }
        if (bad) break;
      }
    }
    if (bad) {
      ++rep.count;
      if (rep.witness_p == 0) rep.witness_p = p;
    }
  }
  if (rep.hypothesis_holds && static_cast<double>(rep.count) > rep.bound)
    throw InvariantViolation("mass_escape_count: count " + std::to_string(rep.count) + " exceeds 4 phi(q)/M^2 = " +
                             std::to_string(rep.bound) + " for q=" + std::to_string(q));
  return rep;
}

}  // namespace cfdyn
