#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cfdyn {

inline constexpr int kSchemaVersion = 1;

#ifndef CFDYN_VERSION
#define CFDYN_VERSION "0.0.0"
#endif
inline constexpr const char* kCodeVersion = CFDYN_VERSION;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { kCsv, kJson };

struct ExperimentConfig {
  std::string subcommand;
  std::optional<std::int64_t> p;
  std::optional<std::int64_t> q;
  std::optional<std::int64_t> K;
  std::vector<double> M;
  std::optional<double> dt;
  std::optional<std::int64_t> bins;
  std::optional<std::int64_t> grid;
  std::uint64_t seed = 1;
  std::optional<double> t;
  std::optional<double> delta;
  std::optional<std::int64_t> Q;
  std::optional<std::int64_t> samples;
  bool unchecked = false;
  bool timing = false;
  int threads = 0;
  std::string out;
  Format format = Format::kCsv;

  /// Builds a config from key=value pairs (flag names without dashes).
  static ExperimentConfig from_map(const std::string& subcommand, const std::map<std::string, std::string>& kv);

  /// Keys accepted by from_map.
  static const std::vector<std::string>& keys();

  /// Echoed configuration in fixed column order; unset values are empty.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Reads `key = value` lines; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::string& path);

using Metric = std::variant<std::int64_t, double, std::string>;

struct ResultRecord {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::pair<std::string, Metric>> metrics;
  std::optional<std::vector<double>> histogram;
  std::optional<double> wall_clock_s;

  const Metric& metric(const std::string& name) const;
  double number(const std::string& name) const;
};

enum class MetricType { kInt, kReal, kText };

struct MetricSpec {
  std::string name;
  MetricType type;
};

struct Schema {
  std::string experiment;
  std::vector<MetricSpec> metrics;
  bool histogram = false;
};

/// Registered schema of a subcommand; throws SchemaError if unknown.
const Schema& schema_for(const std::string& experiment);
const std::vector<Schema>& all_schemas();

/// Checks metric names, order and types against the schema, and finiteness.
void validate(const ResultRecord& r);

/// %.12g
std::string format_real(double v);

/// Header line (without newline) for a CSV stream of this experiment.
std::string csv_header(const std::string& experiment, bool with_wall_clock = false);

/// Writes records; all must share one experiment. An empty stream of a known
/// experiment still yields the header.
void emit(std::ostream& os, const std::string& experiment, const std::vector<ResultRecord>& records, Format f);

/// Parses a stream written by emit.
std::vector<ResultRecord> parse(std::istream& is, Format f);

}  // namespace cfdyn
