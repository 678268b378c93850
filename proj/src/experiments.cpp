#include "cfdyn/experiments.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "cfdyn/arith.hpp"
#include "cfdyn/cfe.hpp"
#include "cfdyn/cross_section.hpp"
#include "cfdyn/gauss_measure.hpp"
#include "cfdyn/lattice.hpp"
#include "cfdyn/stats.hpp"
#include "cfdyn/zaremba.hpp"

namespace cfdyn {

namespace {

constexpr std::int64_t kMaxSweepQ = 1000000000;
constexpr std::int64_t kMaxSymmetryQ = 3000000000;
constexpr std::int64_t kMaxCensusQ = 100000000;
constexpr std::int64_t kMaxListedQ = 1000000;
constexpr std::uint64_t kReturnOrbits = 10000;
constexpr int kReturnsPerOrbit = 25;

void need(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

std::int64_t need_q(const ExperimentConfig& c, std::int64_t lo, std::int64_t hi) {
  need(c.q.has_value(), c.subcommand + " requires --q");
  need(*c.q >= lo && *c.q <= hi,
       c.subcommand + ": q must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return *c.q;
}

SweepOptions options(const ExperimentConfig& c) {
  SweepOptions o;
  o.threads = c.threads;
  return o;
}

template <class Seq>
std::string join(const Seq& s) {
  std::ostringstream os;
  bool first = true;
  for (const auto& v : s) {
    os << (first ? "" : " ") << v;
    first = false;
  }
  return os.str();
}

ResultRecord record(const ExperimentConfig& c, std::vector<std::pair<std::string, Metric>> metrics) {
  ResultRecord r;
  r.experiment = c.subcommand;
  r.config = c.echo();
  r.metrics = std::move(metrics);
  return r;
}

Metric I(std::int64_t v) { return v; }
Metric R(double v) { return v; }
Metric S(std::string v) { return v; }

std::vector<ResultRecord> run_cfe(const ExperimentConfig& c) {
  const ReducedFraction<std::int64_t> x(*c.p, *c.q);
  const auto w = cfe_digits(x);
  std::vector<std::int64_t> qs;
  const auto conv = convergents(w);
  for (std::size_t k = 1; k < conv.size(); ++k) qs.push_back(conv[k].q);
  const auto tx = gauss_map(x);
  return {record(c, {{"digits", S(join(w.digits()))},
                     {"len", I(static_cast<std::int64_t>(w.size()))},
                     {"convergent_q", S(join(qs))},
                     {"gauss_map", S(tx ? tx->value().str() : "0")},
                     {"cylinder_measure", R(gauss_word_measure(w.digits()))}})};
}

std::vector<ResultRecord> run_sweep_len(const ExperimentConfig& c) {
  SweepConfig cfg;
  cfg.parallel = options(c);
  const auto s = sweep(factorize<std::int64_t>(*c.q), cfg);
  return {record(c, {{"phi", I(s.phi)},
                     {"sum_len", I(s.sum_len)},
                     {"sum_len_sq", I(s.sum_len_sq)},
                     {"max_len", I(s.max_len)},
                     {"mean_len", R(s.mean_len)},
                     {"var_len", R(s.var_len)},
                     {"heilbronn_ratio", R(s.heilbronn_ratio())},
                     {"heilbronn_limit", R(heilbronn_limit())},
                     {"var_over_ln_q", R(s.var_len / std::log(static_cast<double>(*c.q)))}})};
}

std::vector<ResultRecord> run_sweep_digits(const ExperimentConfig& c) {
  SweepConfig cfg;
  cfg.bins = static_cast<std::size_t>(*c.bins);
  cfg.parallel = options(c);
  const auto s = sweep(factorize<std::int64_t>(*c.q), cfg);
  auto r = record(c, {{"phi", I(s.phi)},
                      {"sum_len", I(s.sum_len)},
                      {"digit_1_freq", R(s.digit_frequency(1))},
                      {"digit_1_expected", R(digit_probability(1))},
                      {"digit_2_freq", R(s.digit_frequency(2))},
                      {"digit_2_expected", R(digit_probability(2))},
                      {"digit_3_freq", R(s.digit_frequency(3))},
                      {"digit_3_expected", R(digit_probability(3))},
                      {"ks_to_gauss", R(s.ks_to_gauss)}});
  std::vector<double> h(s.nu_bar.weights().begin(), s.nu_bar.weights().end());
  r.histogram = std::move(h);
  return {r};
}

std::vector<ResultRecord> run_dispersion(const ExperimentConfig& c) {
  SweepConfig cfg;
  cfg.deltas = {*c.delta};
  cfg.parallel = options(c);
  const auto s = sweep(factorize<std::int64_t>(*c.q), cfg);
  return {record(c, {{"phi", I(s.phi)}, {"dispersion", R(s.dispersion.front())}})};
}

std::vector<ResultRecord> run_orbit(const ExperimentConfig& c) {
  const ReducedFraction<std::int64_t> x(*c.p, *c.q);
  OrbitTrack track(x.p(), x.q());
  const TimeGrid grid = make_time_grid(*c.q, *c.dt);
  std::vector<ResultRecord> out;
  for (std::int64_t i = 0; i <= grid.n; ++i) {
    track.set_time(grid.time(i));
    double fx = 0.0, fy = 0.0;
    track.fd_point(fx, fy);
    out.push_back(record(c, {{"t", R(grid.time(i))}, {"height", R(track.height())}, {"fd_x", R(fx)}, {"fd_y", R(fy)}}));
  }
  return out;
}

std::vector<ResultRecord> run_cross_section(const ExperimentConfig& c) {
  const ReducedFraction<std::int64_t> x(*c.p, *c.q);
  const auto seq = crossing_sequence(x);
  std::vector<ResultRecord> out;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const auto& pt = seq[k].point;
    const bool terminal = k + 1 == seq.size();
    const double rt = terminal ? 0.0 : static_cast<double>(return_time(pt));
    out.push_back(record(c, {{"k", I(static_cast<std::int64_t>(k + 1))},
                             {"t", R(seq[k].t)},
                             {"y", S(pt.y.str())},
                             {"z", S(pt.z.str())},
                             {"eps", I(pt.eps)},
                             {"terminal", I(terminal ? 1 : 0)},
                             {"return_time", R(rt)}}));
  }
  return out;
}

std::vector<ResultRecord> run_kappa(const ExperimentConfig& c) {
  const double integral = kappa_integral();
  const double kappa = kappa_quadrature();
  const double exact = 3.0 / (std::numbers::pi * std::numbers::pi);
  return {record(c, {{"integral", R(integral)},
                     {"kappa", R(kappa)},
                     {"kappa_exact", R(exact)},
                     {"abs_error", R(std::abs(kappa - exact))},
                     {"two_ln2_kappa", R(2.0 * std::numbers::ln2 * kappa)},
                     {"heilbronn_limit", R(heilbronn_limit())}})};
}

std::vector<ResultRecord> run_mass_escape(const ExperimentConfig& c) {
  const auto m = factorize<std::int64_t>(*c.q);
  const double t_max = std::log(static_cast<double>(*c.q)) - 2.0 * omega(m);
  std::vector<ResultRecord> out;
  for (double M : c.M) {
    const auto rep = mass_escape_count(m, M, *c.t, c.unchecked);
    out.push_back(record(c, {{"M", R(M)},
                             {"phi", I(rep.phi)},
                             {"count", I(rep.count)},
                             {"bound", R(rep.bound)},
                             {"escalations", I(rep.escalations)},
                             {"hypothesis_holds", I(rep.hypothesis_holds ? 1 : 0)},
                             {"t_max", R(t_max)}}));
  }
  return out;
}

std::vector<ResultRecord> run_fd_hist(const ExperimentConfig& c) {
  OrbitSweepConfig cfg;
  cfg.M = c.M.front();
  cfg.dt = *c.dt;
  cfg.nx = cfg.nu = static_cast<std::size_t>(*c.grid);
  cfg.parallel = options(c);
  const auto res = orbit_sweep(factorize<std::int64_t>(*c.q), cfg);
  const auto p = res.fd.probabilities();
  const auto ref = haar_cell_probabilities(cfg.nx, cfg.nu);
  auto r = record(c, {{"phi", I(res.phi)},
                      {"cells", I(static_cast<std::int64_t>(p.size()))},
                      {"discrepancy", R(discrepancy(p, ref))},
                      {"tail", R(res.tail)},
                      {"max_height", R(res.max_height)}});
  r.histogram = p;
  return {r};
}

std::vector<ResultRecord> run_haar_selftest(const ExperimentConfig& c) {
  std::mt19937_64 rng(c.seed);
  const auto n = static_cast<std::uint64_t>(*c.samples);
  const double M = c.M.front();
  const auto cells = static_cast<std::size_t>(*c.grid);

  std::uint64_t proposals = 0, tail_hits = 0;
  double sum_inv_y = 0.0;
  FdHistogram first(cells, cells);
  for (std::uint64_t i = 0; i < n; ++i) {
    const HaarDraw d = haar_draw(rng);
    proposals += d.proposals;
    const auto fd = to_fundamental_domain(d.basis);
    sum_inv_y += 1.0 / fd.y;
    if (height(d.basis) >= M) ++tail_hits;
    first.add(fd.x, fd.y);
  }
  const FdHistogram second = haar_reference(cells, cells, n, rng);
  const auto exact = haar_cell_probabilities(cells, cells);
  const auto rt = haar_mean_return_time(std::min<std::uint64_t>(kReturnOrbits, n), kReturnsPerOrbit, rng);

  const double pi = std::numbers::pi;
  return {record(c, {{"samples", I(static_cast<std::int64_t>(n))},
                     {"acceptance_rate", R(static_cast<double>(n) / static_cast<double>(proposals))},
                     {"acceptance_expected", R(pi * std::sqrt(3.0) / 6.0)},
                     {"mean_inv_y", R(sum_inv_y / static_cast<double>(n))},
                     {"mean_inv_y_expected", R(3.0 * std::log(3.0) / (2.0 * pi))},
                     {"tail", R(static_cast<double>(tail_hits) / static_cast<double>(n))},
                     {"tail_expected", R(3.0 / (pi * M * M))},
                     {"two_sample_discrepancy", R(discrepancy(first.probabilities(), second.probabilities()))},
                     {"mc_vs_exact_discrepancy", R(discrepancy(first.probabilities(), exact))},
                     {"mean_return_time", R(rt.mean)},
                     {"return_time_target", R(pi * pi / (6.0 * std::numbers::ln2))},
                     {"min_return_time", R(rt.min)}})};
}

std::vector<ResultRecord> run_zaremba_census(const ExperimentConfig& c) {
  const auto census = enumerate_bounded(*c.Q, *c.K, options(c));
  std::vector<ResultRecord> out;
  out.reserve(static_cast<std::size_t>(*c.Q));
  for (std::int64_t q = 2; q <= *c.Q; ++q)
    out.push_back(record(c, {{"q", I(q)}, {"count_relaxed", I(census.count(q))}, {"count_strict", I(census.count_strict(q))}}));
  return out;
}

std::vector<ResultRecord> run_zaremba_fit(const ExperimentConfig& c) {
  const auto census = enumerate_bounded(*c.Q, *c.K, options(c));
  ExponentFit fit{};
  try {
    fit = exponent_fit(census);
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("zaremba-fit: ") + e.what());
  }
  const double eps0 = *c.K == 1 ? 0.5 : (*c.K < 5 ? 0.2 : 0.05);
  const std::int64_t dq = c.q.value_or(*c.Q);
  const auto dual = dual_closure(dq, *c.K);
  return {record(c, {{"exponent", R(fit.exponent)},
                     {"intercept", R(fit.intercept)},
                     {"windows", I(fit.windows)},
                     {"eps0", R(eps0)},
                     {"gate_passed", I(fit.exponent < 1.0 - eps0 ? 1 : 0)},
                     {"census_total", I(census.total(*c.Q))},
                     {"dual_q", I(dq)},
                     {"dual_members", I(dual.members)},
                     {"dual_closed", I(dual.dual_members)}})};
}

std::vector<ResultRecord> run_zaremba_height(const ExperimentConfig& c) {
  const auto rep = height_bound_check(*c.q, *c.K, *c.dt, c.unchecked);
  return {record(c, {{"members", I(rep.members)},
                     {"max_height", R(rep.max_height)},
                     {"bound", R(rep.bound)},
                     {"argmax_p", I(rep.argmax_p)},
                     {"argmax_t", R(rep.argmax_t)},
                     {"violations", I(rep.violations)}})};
}

std::vector<ResultRecord> run_symmetry_check(const ExperimentConfig& c) {
  std::vector<std::int64_t> ps;
  if (c.p) {
    ps.push_back(*c.p);
  } else {
    const auto m = factorize<std::int64_t>(*c.q);
    for (std::int64_t p : coprime_residues(m)) ps.push_back(p);
  }
  std::vector<ResultRecord> out;
  for (std::int64_t p : ps) {
    const auto w = verify_symmetry<std::int64_t>(p, *c.q);
    std::ostringstream g;
    g << '[' << w.gamma(0, 0) << ' ' << w.gamma(0, 1) << "; " << w.gamma(1, 0) << ' ' << w.gamma(1, 1) << ']';
    out.push_back(record(c, {{"p", I(p)}, {"p_dual", I(w.p_dual)}, {"q_dual", I(w.q_dual)}, {"gamma", S(g.str())},
                             {"verified", I(1)}}));
  }
  return out;
}

using Runner = std::vector<ResultRecord> (*)(const ExperimentConfig&);

const std::vector<std::pair<std::string, Runner>>& table() {
  static const std::vector<std::pair<std::string, Runner>> t{
      {"cfe", run_cfe},
      {"sweep-len", run_sweep_len},
      {"sweep-digits", run_sweep_digits},
      {"dispersion", run_dispersion},
      {"orbit", run_orbit},
      {"cross-section", run_cross_section},
      {"kappa", run_kappa},
      {"mass-escape", run_mass_escape},
      {"fd-hist", run_fd_hist},
      {"haar-selftest", run_haar_selftest},
      {"zaremba-census", run_zaremba_census},
      {"zaremba-fit", run_zaremba_fit},
      {"zaremba-height", run_zaremba_height},
      {"symmetry-check", run_symmetry_check},
  };
  return t;
}

void need_fraction(const ExperimentConfig& c, std::int64_t q_max) {
  const std::int64_t q = need_q(c, 2, q_max);
  need(c.p.has_value(), c.subcommand + " requires --p");
  need(*c.p < q, c.subcommand + ": need 0 < p < q");
  need(std::gcd(*c.p, q) == 1, c.subcommand + ": p and q must be coprime");
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : table()) n.push_back(k);
    return n;
  }();
  return names;
}

ExperimentConfig resolve(const ExperimentConfig& in) {
  ExperimentConfig c = in;
  const std::string& s = c.subcommand;
  if (s == "cfe") {
    need_fraction(c, std::numeric_limits<std::int64_t>::max() / 2);
  } else if (s == "sweep-len") {
    need_q(c, 3, kMaxSweepQ);
  } else if (s == "sweep-digits") {
    need_q(c, 3, kMaxSweepQ);
    if (!c.bins) c.bins = 256;
  } else if (s == "dispersion") {
    need_q(c, 3, kMaxSweepQ);
    if (!c.delta) c.delta = 0.05;
  } else if (s == "orbit") {
    need_fraction(c, kMaxSweepQ);
    if (!c.dt) c.dt = 0.05;
    need(2.0 * std::log(static_cast<double>(*c.q)) / *c.dt <= 1e7, "orbit: dt too small (more than 10^7 rows)");
  } else if (s == "cross-section") {
    need_fraction(c, 1000000000);
    need(!is_degenerate_start(ReducedFraction<std::int64_t>(*c.p, *c.q)),
         "cross-section: p/q = 1/n or 1 - 1/n never meets the section");
  } else if (s == "kappa") {
  } else if (s == "mass-escape") {
    const std::int64_t q = need_q(c, 2, kMaxSweepQ);
    if (c.M.empty()) c.M = {2.0};
    for (double M : c.M) need(M > 1.0, "mass-escape: M must be > 1");
    const auto m = factorize<std::int64_t>(q);
    const double t_max = std::log(static_cast<double>(q)) - 2.0 * omega(m);
    if (!c.t) c.t = t_max;
    need(*c.t >= 0.0, "mass-escape: t must be >= 0");
    need(c.unchecked || *c.t <= t_max,
         "mass-escape: t outside [0, ln q - 2 omega(q)] = [0, " + format_real(t_max) + "] (use --unchecked)");
  } else if (s == "fd-hist") {
    need_q(c, 3, kMaxSweepQ);
    if (c.M.empty()) c.M = {2.0};
    if (!c.dt) c.dt = 0.05;
    need(*c.dt <= 0.1, s + ": dt must be <= 0.1");
    need(c.M.front() >= 1.0, s + ": M must be >= 1");
    if (!c.grid) c.grid = 16;
  } else if (s == "haar-selftest") {
    if (!c.samples) c.samples = 1000000;
    if (c.M.empty()) c.M = {2.0};
    if (!c.grid) c.grid = 16;
  } else if (s == "zaremba-census" || s == "zaremba-fit") {
    need(c.Q.has_value(), s + " requires --Q");
    need(*c.Q <= kMaxCensusQ, s + ": Q must be <= " + std::to_string(kMaxCensusQ));
    need(c.K.has_value(), s + " requires --K");
    need(*c.K <= 1000, s + ": K must be <= 1000");
    if (s == "zaremba-fit" && c.q) need(*c.q >= 3 && *c.q <= kMaxSweepQ, "zaremba-fit: q must lie in [3, 10^9]");
    if (s == "zaremba-fit" && !c.q) need(*c.Q >= 3, "zaremba-fit: Q must be >= 3");
  } else if (s == "zaremba-height") {
    need_q(c, 2, 1000000);
    need(c.K.has_value(), s + " requires --K");
    if (!c.dt) c.dt = 0.05;
    need(*c.dt <= 0.1, s + ": dt must be <= 0.1");
  } else if (s == "symmetry-check") {
    if (c.p) {
      need_fraction(c, kMaxSymmetryQ);
    } else {
      need_q(c, 2, kMaxListedQ);
    }
  } else {
    throw ConfigError("unknown subcommand '" + s + "'");
  }
  return c;
}

std::vector<ResultRecord> run(const ExperimentConfig& in) {
  const ExperimentConfig c = resolve(in);
  const auto start = std::chrono::steady_clock::now();
  std::vector<ResultRecord> out;
  for (const auto& [name, fn] : table())
    if (name == c.subcommand) out = fn(c);
  if (c.timing) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (auto& r : out) r.wall_clock_s = secs;
  }
  for (const auto& r : out) validate(r);
  return out;
}

}  // namespace cfdyn
