#include "cfdyn/record.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace cfdyn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) throw ConfigError("invalid integer for " + key + ": '" + v + "'");
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(out)) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for " + key + ": '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + v + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string opt_str(const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : ""; }
std::string opt_str(const std::optional<double>& v) { return v ? format_real(*v) : ""; }

}  // namespace

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> k{"p",  "q",       "K",         "M",      "dt",      "bins",    "grid",
                                          "seed", "t",     "delta",     "Q",      "samples", "unchecked", "timing",
                                          "threads", "out", "format"};
  return k;
}

ExperimentConfig ExperimentConfig::from_map(const std::string& subcommand, const std::map<std::string, std::string>& kv) {
  ExperimentConfig c;
  c.subcommand = subcommand;
  for (const auto& [key, raw] : kv) {
    const std::string v = trim(raw);
    if (key == "p") {
      c.p = parse_int(key, v);
      if (*c.p < 1) throw ConfigError("p must be positive");
    } else if (key == "q") {
      c.q = parse_int(key, v);
      if (*c.q < 1) throw ConfigError("q must be positive");
    } else if (key == "K") {
      c.K = parse_int(key, v);
      if (*c.K < 1) throw ConfigError("K must be positive");
    } else if (key == "M") {
      c.M.clear();
      for (const auto& part : split(v, ',')) {
        const double m = parse_real(key, trim(part));
        if (!(m >= 1.0)) throw ConfigError("M must be >= 1");
        c.M.push_back(m);
      }
      if (c.M.empty()) throw ConfigError("M list is empty");
    } else if (key == "dt") {
      c.dt = parse_real(key, v);
      if (!(*c.dt > 0.0)) throw ConfigError("dt must be positive");
    } else if (key == "bins") {
      c.bins = parse_int(key, v);
      if (*c.bins < 1 || *c.bins > (1 << 24)) throw ConfigError("bins must lie in [1, 2^24]");
    } else if (key == "grid") {
      c.grid = parse_int(key, v);
      if (*c.grid < 1 || *c.grid > 4096) throw ConfigError("grid must lie in [1, 4096]");
    } else if (key == "seed") {
      const auto s = parse_int(key, v);
      if (s < 0) throw ConfigError("seed must be nonnegative");
      c.seed = static_cast<std::uint64_t>(s);
    } else if (key == "t") {
      c.t = parse_real(key, v);
    } else if (key == "delta") {
      c.delta = parse_real(key, v);
      if (!(*c.delta > 0.0)) throw ConfigError("delta must be positive");
    } else if (key == "Q") {
      c.Q = parse_int(key, v);
      if (*c.Q < 2) throw ConfigError("Q must be >= 2");
    } else if (key == "samples") {
      c.samples = parse_int(key, v);
      if (*c.samples < 1) throw ConfigError("samples must be positive");
    } else if (key == "unchecked") {
      c.unchecked = parse_bool(key, v);
    } else if (key == "timing") {
      c.timing = parse_bool(key, v);
    } else if (key == "threads") {
      const auto n = parse_int(key, v);
      if (n < 0 || n > 4096) throw ConfigError("threads must lie in [0, 4096]");
      c.threads = static_cast<int>(n);
    } else if (key == "out") {
      c.out = v;
    } else if (key == "format") {
      if (v == "csv")
        c.format = Format::kCsv;
      else if (v == "json")
        c.format = Format::kJson;
      else
        throw ConfigError("format must be csv or json");
    } else {
      throw ConfigError("unknown configuration key '" + key + "'");
    }
  }
  return c;
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  std::string m;
  for (std::size_t i = 0; i < M.size(); ++i) m += (i ? ";" : "") + format_real(M[i]);
  return {{"cfg_p", opt_str(p)},
          {"cfg_q", opt_str(q)},
          {"cfg_K", opt_str(K)},
          {"cfg_M", m},
          {"cfg_dt", opt_str(dt)},
          {"cfg_bins", opt_str(bins)},
          {"cfg_grid", opt_str(grid)},
          {"cfg_seed", std::to_string(seed)},
          {"cfg_t", opt_str(t)},
          {"cfg_delta", opt_str(delta)},
          {"cfg_Q", opt_str(Q)},
          {"cfg_samples", opt_str(samples)},
          {"cfg_unchecked", unchecked ? "1" : "0"}};
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

const Metric& ResultRecord::metric(const std::string& name) const {
  for (const auto& [k, v] : metrics)
    if (k == name) return v;
  throw SchemaError("record has no metric '" + name + "'");
}

double ResultRecord::number(const std::string& name) const {
  const Metric& m = metric(name);
  if (const auto* i = std::get_if<std::int64_t>(&m)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&m)) return *d;
  throw SchemaError("metric '" + name + "' is not numeric");
}

const std::vector<Schema>& all_schemas() {
  using T = MetricType;
  static const std::vector<Schema> s{
      {"cfe", {{"digits", T::kText}, {"len", T::kInt}, {"convergent_q", T::kText}, {"gauss_map", T::kText},
               {"cylinder_measure", T::kReal}}},
      {"sweep-len", {{"phi", T::kInt}, {"sum_len", T::kInt}, {"sum_len_sq", T::kInt}, {"max_len", T::kInt},
                     {"mean_len", T::kReal}, {"var_len", T::kReal}, {"heilbronn_ratio", T::kReal},
                     {"heilbronn_limit", T::kReal}, {"var_over_ln_q", T::kReal}}},
      {"sweep-digits", {{"phi", T::kInt}, {"sum_len", T::kInt}, {"digit_1_freq", T::kReal},
                        {"digit_1_expected", T::kReal}, {"digit_2_freq", T::kReal}, {"digit_2_expected", T::kReal},
                        {"digit_3_freq", T::kReal}, {"digit_3_expected", T::kReal}, {"ks_to_gauss", T::kReal}},
       true},
      {"dispersion", {{"phi", T::kInt}, {"dispersion", T::kReal}}},
      {"orbit", {{"t", T::kReal}, {"height", T::kReal}, {"fd_x", T::kReal}, {"fd_y", T::kReal}}},
      {"cross-section", {{"k", T::kInt}, {"t", T::kReal}, {"y", T::kText}, {"z", T::kText}, {"eps", T::kInt},
                         {"terminal", T::kInt}, {"return_time", T::kReal}}},
      {"kappa", {{"integral", T::kReal}, {"kappa", T::kReal}, {"kappa_exact", T::kReal}, {"abs_error", T::kReal},
                 {"two_ln2_kappa", T::kReal}, {"heilbronn_limit", T::kReal}}},
      {"mass-escape", {{"M", T::kReal}, {"phi", T::kInt}, {"count", T::kInt}, {"bound", T::kReal},
                       {"escalations", T::kInt}, {"hypothesis_holds", T::kInt}, {"t_max", T::kReal}}},
      {"fd-hist", {{"phi", T::kInt}, {"cells", T::kInt}, {"discrepancy", T::kReal}, {"tail", T::kReal},
                   {"max_height", T::kReal}},
       true},
      {"haar-selftest", {{"samples", T::kInt}, {"acceptance_rate", T::kReal}, {"acceptance_expected", T::kReal},
                         {"mean_inv_y", T::kReal}, {"mean_inv_y_expected", T::kReal}, {"tail", T::kReal},
                         {"tail_expected", T::kReal}, {"two_sample_discrepancy", T::kReal},
                         {"mc_vs_exact_discrepancy", T::kReal}, {"mean_return_time", T::kReal},
                         {"return_time_target", T::kReal}, {"min_return_time", T::kReal}}},
      {"zaremba-census", {{"q", T::kInt}, {"count_relaxed", T::kInt}, {"count_strict", T::kInt}}},
      {"zaremba-fit", {{"exponent", T::kReal}, {"intercept", T::kReal}, {"windows", T::kInt}, {"eps0", T::kReal},
                       {"gate_passed", T::kInt}, {"census_total", T::kInt}, {"dual_q", T::kInt},
                       {"dual_members", T::kInt}, {"dual_closed", T::kInt}}},
      {"zaremba-height", {{"members", T::kInt}, {"max_height", T::kReal}, {"bound", T::kReal},
                          {"argmax_p", T::kInt}, {"argmax_t", T::kReal}, {"violations", T::kInt}}},
      {"symmetry-check", {{"p", T::kInt}, {"p_dual", T::kInt}, {"q_dual", T::kInt}, {"gamma", T::kText},
                          {"verified", T::kInt}}},
  };
  return s;
}

const Schema& schema_for(const std::string& experiment) {
  for (const auto& s : all_schemas())
    if (s.experiment == experiment) return s;
  throw SchemaError("unknown experiment '" + experiment + "'");
}

void validate(const ResultRecord& r) {
  const Schema& s = schema_for(r.experiment);
  if (r.metrics.size() != s.metrics.size())
    throw SchemaError(r.experiment + ": expected " + std::to_string(s.metrics.size()) + " metrics, got " +
                      std::to_string(r.metrics.size()));
  for (std::size_t i = 0; i < s.metrics.size(); ++i) {
    const auto& [name, value] = r.metrics[i];
    if (name != s.metrics[i].name)
      throw SchemaError(r.experiment + ": metric " + std::to_string(i) + " is '" + name + "', expected '" +
                        s.metrics[i].name + "'");
    const bool ok = (s.metrics[i].type == MetricType::kInt && std::holds_alternative<std::int64_t>(value)) ||
                    (s.metrics[i].type == MetricType::kReal && std::holds_alternative<double>(value)) ||
                    (s.metrics[i].type == MetricType::kText && std::holds_alternative<std::string>(value));
    if (!ok) throw SchemaError(r.experiment + ": metric '" + name + "' has the wrong type");
    if (const auto* d = std::get_if<double>(&value); d && !std::isfinite(*d))
      throw SchemaError(r.experiment + ": metric '" + name + "' is not finite");
    if (const auto* t = std::get_if<std::string>(&value);
        t && t->find_first_of(",\"\n\r") != std::string::npos)
      throw SchemaError(r.experiment + ": text metric '" + name + "' contains a separator");
  }
  if (r.histogram.has_value() != s.histogram) throw SchemaError(r.experiment + ": histogram payload mismatch");
  if (r.histogram)
    for (double v : *r.histogram)
      if (!std::isfinite(v)) throw SchemaError(r.experiment + ": histogram entry is not finite");
  const auto shape = ExperimentConfig{}.echo();
  if (r.config.size() != shape.size()) throw SchemaError(r.experiment + ": config echo has the wrong shape");
  for (std::size_t i = 0; i < r.config.size(); ++i)
    if (r.config[i].first != shape[i].first)
      throw SchemaError(r.experiment + ": config echo column '" + r.config[i].first + "' out of order");
}

std::string csv_header(const std::string& experiment, bool with_wall_clock) {
  const Schema& s = schema_for(experiment);
  std::string h = "schema_version,code_version,experiment";
  for (const auto& [k, v] : ExperimentConfig{}.echo()) h += "," + k;
  for (const auto& m : s.metrics) h += "," + m.name;
  if (s.histogram) h += ",histogram";
  if (with_wall_clock) h += ",wall_clock_s";
  return h;
}

namespace {

std::string metric_text(const Metric& m) {
  if (const auto* i = std::get_if<std::int64_t>(&m)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&m)) return format_real(*d);
  return std::get<std::string>(m);
}

double round12(double v) { return std::stod(format_real(v)); }

Metric parse_metric(const MetricSpec& spec, const std::string& text) {
  switch (spec.type) {
    case MetricType::kInt:
      try {
        return parse_int(spec.name, text);
      } catch (const ConfigError& e) {
        throw SchemaError(e.what());
      }
    case MetricType::kReal:
      try {
        return parse_real(spec.name, text);
      } catch (const ConfigError& e) {
        throw SchemaError(e.what());
      }
    case MetricType::kText:
      return text;
  }
  throw SchemaError("unreachable metric type");
}

}  // namespace

void emit(std::ostream& os, const std::string& experiment, const std::vector<ResultRecord>& records, Format f) {
  const Schema& schema = schema_for(experiment);
  bool timing = false;
  for (const auto& r : records) {
    if (r.experiment != experiment)
      throw SchemaError("mixed experiments in one stream: '" + r.experiment + "' in a '" + experiment + "' stream");
    validate(r);
    timing = timing || r.wall_clock_s.has_value();
  }
  if (timing)
    for (const auto& r : records)
      if (!r.wall_clock_s) throw SchemaError("wall clock present on some records only");

  if (f == Format::kCsv) {
    os << csv_header(experiment, timing) << '\n';
    for (const auto& r : records) {
      os << kSchemaVersion << ',' << kCodeVersion << ',' << r.experiment;
      for (const auto& [k, v] : r.config) os << ',' << v;
      for (const auto& [k, v] : r.metrics) os << ',' << metric_text(v);
      if (schema.histogram) {
        os << ',';
        for (std::size_t i = 0; i < r.histogram->size(); ++i) os << (i ? ";" : "") << format_real((*r.histogram)[i]);
      }
      if (timing) os << ',' << format_real(*r.wall_clock_s);
      os << '\n';
    }
  } else {
    for (const auto& r : records) {
      nlohmann::ordered_json j;
      j["schema_version"] = kSchemaVersion;
      j["code_version"] = kCodeVersion;
      j["experiment"] = r.experiment;
      nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
      for (const auto& [k, v] : r.config) cfg[k] = v;
      j["config"] = cfg;
      nlohmann::ordered_json met = nlohmann::ordered_json::object();
      for (const auto& [k, v] : r.metrics) {
        if (const auto* i = std::get_if<std::int64_t>(&v))
          met[k] = *i;
        else if (const auto* d = std::get_if<double>(&v))
          met[k] = round12(*d);
        else
          met[k] = std::get<std::string>(v);
      }
      j["metrics"] = met;
      if (r.histogram) {
        nlohmann::ordered_json h = nlohmann::ordered_json::array();
        for (double v : *r.histogram) h.push_back(round12(v));
        j["histogram"] = h;
      }
      if (r.wall_clock_s) j["wall_clock_s"] = round12(*r.wall_clock_s);
      os << j.dump() << '\n';
    }
  }
  if (!os) throw IoError("write failed");
}

std::vector<ResultRecord> parse(std::istream& is, Format f) {
  std::vector<ResultRecord> out;
  const auto cfg_keys = ExperimentConfig{}.echo();
  std::string line;
  if (f == Format::kCsv) {
    if (!std::getline(is, line)) return out;
    const auto header = split(line, ',');
    if (header.size() < 3 + cfg_keys.size()) throw SchemaError("CSV header too short");
    const bool timing = header.back() == "wall_clock_s";
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const auto cells = split(line, ',');
      if (cells.size() != header.size()) throw SchemaError("CSV row has " + std::to_string(cells.size()) +
                                                           " cells, header has " + std::to_string(header.size()));
      if (cells[0] != std::to_string(kSchemaVersion)) throw SchemaError("unsupported schema version " + cells[0]);
      ResultRecord r;
      r.experiment = cells[2];
      const Schema& s = schema_for(r.experiment);
      if (header != split(csv_header(r.experiment, timing), ','))
        throw SchemaError("CSV header does not match schema of '" + r.experiment + "'");
      std::size_t c = 3;
      for (const auto& [k, v] : cfg_keys) r.config.emplace_back(k, cells[c++]);
      for (const auto& m : s.metrics) r.metrics.emplace_back(m.name, parse_metric(m, cells[c++]));
      if (s.histogram) {
        std::vector<double> h;
        if (!cells[c].empty())
          for (const auto& v : split(cells[c], ';')) h.push_back(std::stod(v));
        r.histogram = std::move(h);
        ++c;
      }
      if (timing) r.wall_clock_s = std::stod(cells[c++]);
      validate(r);
      out.push_back(std::move(r));
    }
  } else {
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      nlohmann::ordered_json j;
      try {
        j = nlohmann::ordered_json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("invalid JSON line: ") + e.what());
      }
      if (j.value("schema_version", -1) != kSchemaVersion) throw SchemaError("unsupported schema version");
      ResultRecord r;
      r.experiment = j.at("experiment").get<std::string>();
      const Schema& s = schema_for(r.experiment);
      for (const auto& [k, v] : cfg_keys) r.config.emplace_back(k, j.at("config").at(k).get<std::string>());
      const auto& met = j.at("metrics");
      if (met.size() != s.metrics.size()) throw SchemaError(r.experiment + ": metric count mismatch");
      for (const auto& m : s.metrics) {
        const auto& v = met.at(m.name);
        switch (m.type) {
          case MetricType::kInt:
            if (!v.is_number_integer()) throw SchemaError(m.name + " is not an integer");
            r.metrics.emplace_back(m.name, v.get<std::int64_t>());
            break;
          case MetricType::kReal:
            if (!v.is_number()) throw SchemaError(m.name + " is not a number");
            r.metrics.emplace_back(m.name, v.get<double>());
            break;
          case MetricType::kText:
            r.metrics.emplace_back(m.name, v.get<std::string>());
            break;
        }
      }
      if (j.contains("histogram")) r.histogram = j.at("histogram").get<std::vector<double>>();
      if (j.contains("wall_clock_s")) r.wall_clock_s = j.at("wall_clock_s").get<double>();
      validate(r);
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace cfdyn
