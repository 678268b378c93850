#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "cfdyn/experiments.hpp"
#include "cfdyn/record.hpp"
#include "cfdyn/stats.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kInvariant = 2, kIo = 3 };

int fail(Exit code, const char* kind, const std::string& msg) {
  std::string escaped;
  for (char ch : msg) {
    if (ch == '"' || ch == '\\') escaped += '\\';
    escaped += ch == '\n' ? ' ' : ch;
  }
  std::cerr << "error kind=" << kind << " code=" << code << " msg=\"" << escaped << "\"\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continued fractions and divergent diagonal orbits on the modular surface"};
  app.set_version_flag("--version", std::string(cfdyn::kCodeVersion));
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::map<std::string, std::string> flags;
  const std::vector<std::pair<std::string, std::string>> value_opts{
      {"p", "numerator of p/q"},
      {"q", "modulus / denominator"},
      {"K", "digit bound"},
      {"M", "height threshold(s), comma separated"},
      {"dt", "time step along the orbit"},
      {"bins", "histogram bins on [0,1]"},
      {"grid", "fundamental-domain cells per axis"},
      {"seed", "RNG seed (default 1)"},
      {"t", "flow time"},
      {"delta", "dispersion tolerance"},
      {"Q", "largest denominator"},
      {"samples", "Monte-Carlo sample count"},
      {"threads", "worker threads (0: CFDYN_THREADS or hardware concurrency)"},
      {"out", "output path (default stdout)"},
      {"format", "csv or json"},
  };
  for (const auto& [name, help] : value_opts)
    app.add_option_function<std::string>("--" + name, [&flags, key = name](const std::string& v) { flags[key] = v; },
                                          help);
  std::string config_path;
  app.add_option("--config", config_path, "key = value file; command-line flags take precedence");
  bool unchecked = false, timing = false;
  app.add_flag("--unchecked", unchecked, "skip hypothesis checks and report instead of failing");
  app.add_flag("--timing", timing, "append wall_clock_s (makes output non-reproducible)");

  const std::map<std::string, std::string> about{
      {"cfe", "digits, convergents and Gauss map of p/q"},
      {"sweep-len", "length moments over all p coprime to q"},
      {"sweep-digits", "pooled digit statistics and nu_bar_q vs the Gauss measure"},
      {"dispersion", "fraction of p whose len/(2 ln q) is off the limit by more than delta"},
      {"orbit", "height and fundamental-domain point along one divergent orbit"},
      {"cross-section", "crossings of the section with exact coordinates"},
      {"kappa", "section normalising constant by quadrature"},
      {"mass-escape", "count of orbit points with a vector shorter than 1/M"},
      {"fd-hist", "fundamental-domain histogram of all orbits vs Haar"},
      {"haar-selftest", "Monte Carlo checks of the Haar sampler"},
      {"zaremba-census", "bounded-digit counts for every q <= Q"},
      {"zaremba-fit", "growth exponent of the bounded-digit counts"},
      {"zaremba-height", "orbit heights of bounded-digit fractions vs the compact-set bound"},
      {"symmetry-check", "SL2(Z) witness pairing p with its dual residue"},
  };
  for (const auto& name : cfdyn::subcommands()) {
    const auto it = about.find(name);
    app.add_subcommand(name, it == about.end() ? "" : it->second);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kConfig, "config", e.what());
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  cfdyn::ExperimentConfig cfg;
  try {
    std::map<std::string, std::string> merged;
    if (!config_path.empty()) merged = cfdyn::read_config_file(config_path);
    for (const auto& [k, v] : flags) merged[k] = v;
    if (unchecked) merged["unchecked"] = "1";
    if (timing) merged["timing"] = "1";
    cfg = cfdyn::ExperimentConfig::from_map(sub, merged);
  } catch (const cfdyn::ConfigError& e) {
    return fail(kConfig, "config", e.what());
  } catch (const cfdyn::IoError& e) {
    return fail(kIo, "io", e.what());
  }

  std::vector<cfdyn::ResultRecord> records;
  try {
    records = cfdyn::run(cfg);
  } catch (const cfdyn::ConfigError& e) {
    return fail(kConfig, "config", e.what());
  } catch (const cfdyn::InvariantViolation& e) {
    return fail(kInvariant, "invariant", e.what());
  } catch (const std::logic_error& e) {
    return fail(kInvariant, "invariant", e.what());
  } catch (const std::exception& e) {
    return fail(kInvariant, "runtime", e.what());
  }

  try {
    if (cfg.out.empty()) {
      cfdyn::emit(std::cout, sub, records, cfg.format);
      std::cout.flush();
      if (!std::cout) throw cfdyn::IoError("write to stdout failed");
    } else {
      std::ofstream os(cfg.out, std::ios::binary);
      if (!os) throw cfdyn::IoError("cannot open '" + cfg.out + "' for writing");
      cfdyn::emit(os, sub, records, cfg.format);
      os.close();
      if (!os) throw cfdyn::IoError("write to '" + cfg.out + "' failed");
    }
  } catch (const cfdyn::IoError& e) {
    return fail(kIo, "io", e.what());
  }
  return kOk;
}
