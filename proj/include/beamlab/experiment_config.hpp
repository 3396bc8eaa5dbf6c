#pragma once

// Experiment configuration for the Monte Carlo harness and its JSON form.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "beamlab/errors.hpp"
#include "beamlab/types.hpp"
#include "beamlab/weights.hpp"

namespace beamlab {

enum class Experiment { Beampattern, SinrVsSnr, SinrVsSnapshots, SinrVsInr };

inline std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::Beampattern: return "beampattern";
    case Experiment::SinrVsSnr: return "sinr_vs_snr";
    case Experiment::SinrVsSnapshots: return "sinr_vs_snapshots";
    case Experiment::SinrVsInr: return "sinr_vs_inr";
  }
  return "unknown";
}

inline Experiment parse_experiment(std::string_view name) {
  for (Experiment e : {Experiment::Beampattern, Experiment::SinrVsSnr, Experiment::SinrVsSnapshots,
                       Experiment::SinrVsInr})
    if (to_string(e) == name) return e;
  throw ConfigError("unknown experiment '" + std::string(name) +
                    "' (expected beampattern, sinr_vs_snr, sinr_vs_snapshots or sinr_vs_inr)");
}

inline Method parse_method(std::string_view name) {
  for (Method m : kAllMethods)
    if (to_string(m) == name) return m;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

/// Where the LCSSP dimension search takes its interferer directions from.
enum class InterfererSource { Config, CaponPeaks };

inline std::string_view to_string(InterfererSource s) {
  return s == InterfererSource::Config ? "config" : "capon_peaks";
}

struct ExperimentConfig {
  Experiment experiment = Experiment::SinrVsSnr;
  int m = 10;
  std::optional<int> l = 20;  // nullopt: search L by the delta rule
  int k = 50;
  int trials = 100;
  std::vector<double> snr_grid_db{-10, -5, 0, 5, 10, 15, 20, 25, 30};
  std::vector<double> inr_grid_db{0, 10, 20, 30, 40, 50};
  std::vector<int> k_grid{10, 20, 30, 50, 100, 200, 500};
  double snr_db = 10.0;
  std::optional<double> inr_db;  // 30 dB for the beampattern experiment, 10 dB otherwise
  double presumed_soi_deg = 0.0;
  std::vector<double> interferers_deg{-30.0, 30.0};
  double sector_halfwidth_deg = 6.0;
  double doa_mismatch_halfwidth_deg = 6.0;
  double position_error_halfwidth_wl = 0.05;
  std::optional<bool> mismatch;  // off for the beampattern experiment, on otherwise
  bool perturb_virtual = false;
  double delta = 0.05;
  int l_max = 0;  // 0: 8 * m
  int capon_samples = 200;
  int beampattern_points = 1801;
  InterfererSource interferer_source = InterfererSource::Config;
  std::uint64_t seed = 1;
  int workers = 1;
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};

  double effective_inr_db() const {
    if (inr_db) return *inr_db;
    return experiment == Experiment::Beampattern ? 30.0 : 10.0;
  }

  bool mismatch_enabled() const { return mismatch.value_or(experiment != Experiment::Beampattern); }

  int effective_l_max() const { return l_max > 0 ? l_max : 8 * m; }

  bool uses(Method method) const { return std::find(methods.begin(), methods.end(), method) != methods.end(); }

  /// Swept values in the order they are run.
  std::vector<double> x_values() const {
    switch (experiment) {
      case Experiment::Beampattern: return {snr_db};
      case Experiment::SinrVsSnr: return snr_grid_db;
      case Experiment::SinrVsInr: return inr_grid_db;
      case Experiment::SinrVsSnapshots: return {k_grid.begin(), k_grid.end()};
    }
    return {};
  }

  std::string_view x_label() const {
    switch (experiment) {
      case Experiment::Beampattern: return "snr_db";
      case Experiment::SinrVsSnr: return "snr_db";
      case Experiment::SinrVsInr: return "inr_db";
      case Experiment::SinrVsSnapshots: return "snapshots";
    }
    return "x";
  }

  void validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (m < 2) fail("m must be at least 2");
    if (l && *l < m) fail("l must be at least m");
    if (k < 1) fail("k must be at least 1");
    if (trials < 1) fail("trials must be at least 1");
    if (workers < 1) fail("workers must be at least 1");
    if (x_values().empty()) fail("grid for the selected experiment is empty");
    for (int kk : k_grid)
      if (kk < 1) fail("k_grid entries must be at least 1");
    if (!(std::abs(presumed_soi_deg) < 90.0)) fail("presumed_soi_deg must lie in (-90, 90)");
    for (double a : interferers_deg)
      if (!(std::abs(a) < 90.0)) fail("interferers_deg entries must lie in (-90, 90)");
    if (!(sector_halfwidth_deg >= 0.0 && sector_halfwidth_deg < 90.0)) fail("sector_halfwidth_deg out of range");
    if (!(doa_mismatch_halfwidth_deg >= 0.0)) fail("doa_mismatch_halfwidth_deg must be nonnegative");
    if (!(position_error_halfwidth_wl >= 0.0 && position_error_halfwidth_wl <= 0.25))
      fail("position_error_halfwidth_wl must lie in [0, 0.25]");
    if (!(delta > 0.0 && delta <= 1.0)) fail("delta must lie in (0, 1]");
    if (l_max != 0 && l_max < m) fail("l_max must be at least m");
    if (l && *l > effective_l_max()) fail("l exceeds l_max");
    if (capon_samples < 2) fail("capon_samples must be at least 2");
    if (beampattern_points < 2) fail("beampattern_points must be at least 2");
    if (interferer_source == InterfererSource::Config && interferers_deg.empty() && !l)
      fail("automatic L needs interferers_deg");
    // Mismatch draws must keep every true direction inside (-90, 90).
    if (mismatch_enabled()) {
      const double reach = doa_mismatch_halfwidth_deg;
      if (std::abs(presumed_soi_deg) + reach >= 90.0) fail("SOI mismatch range reaches endfire");
      for (double a : interferers_deg)
        if (std::abs(a) + reach >= 90.0) fail("interferer mismatch range reaches endfire");
    }
  }
};

namespace detail {

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "experiment", "m", "l", "k", "trials", "snr_grid_db", "inr_grid_db", "k_grid", "snr_db", "inr_db",
      "presumed_soi_deg", "interferers_deg", "sector_halfwidth_deg", "doa_mismatch_halfwidth_deg",
      "position_error_halfwidth_wl", "mismatch", "perturb_virtual", "delta", "l_max", "capon_samples",
      "beampattern_points", "interferer_source", "seed", "workers", "methods"};
  return keys;
}

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace detail

/// Parses a JSON object onto the defaults. Unknown keys are rejected.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  const auto& keys = detail::config_keys();
  for (const auto& [key, _] : j.items())
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError("unknown field '" + key + "'");

  ExperimentConfig c;
  using detail::read_field;
  if (j.contains("experiment")) {
    std::string name;
    read_field(j, "experiment", name);
    c.experiment = parse_experiment(name);
  }
  read_field(j, "m", c.m);
  if (j.contains("l")) {
    const auto& v = j.at("l");
    if (v.is_string() && v.get<std::string>() == "auto")
      c.l.reset();
    else if (v.is_number_integer())
      c.l = v.get<int>();
    else
      throw ConfigError("field 'l' must be an integer or \"auto\"");
  }
  read_field(j, "k", c.k);
  read_field(j, "trials", c.trials);
  read_field(j, "snr_grid_db", c.snr_grid_db);
  read_field(j, "inr_grid_db", c.inr_grid_db);
  read_field(j, "k_grid", c.k_grid);
  read_field(j, "snr_db", c.snr_db);
  if (j.contains("inr_db")) {
    double v = 0.0;
    read_field(j, "inr_db", v);
    c.inr_db = v;
  }
  read_field(j, "presumed_soi_deg", c.presumed_soi_deg);
  read_field(j, "interferers_deg", c.interferers_deg);
  read_field(j, "sector_halfwidth_deg", c.sector_halfwidth_deg);
  read_field(j, "doa_mismatch_halfwidth_deg", c.doa_mismatch_halfwidth_deg);
  read_field(j, "position_error_halfwidth_wl", c.position_error_halfwidth_wl);
  if (j.contains("mismatch")) {
    bool v = false;
    read_field(j, "mismatch", v);
    c.mismatch = v;
  }
  read_field(j, "perturb_virtual", c.perturb_virtual);
  read_field(j, "delta", c.delta);
  read_field(j, "l_max", c.l_max);
  read_field(j, "capon_samples", c.capon_samples);
  read_field(j, "beampattern_points", c.beampattern_points);
  if (j.contains("interferer_source")) {
    std::string v;
    read_field(j, "interferer_source", v);
    if (v == "config")
      c.interferer_source = InterfererSource::Config;
    else if (v == "capon_peaks")
      c.interferer_source = InterfererSource::CaponPeaks;
    else
      throw ConfigError("field 'interferer_source' must be \"config\" or \"capon_peaks\"");
  }
  read_field(j, "seed", c.seed);
  read_field(j, "workers", c.workers);
  if (j.contains("methods")) {
    std::vector<std::string> names;
    read_field(j, "methods", names);
    c.methods.clear();
    for (const auto& n : names) c.methods.push_back(parse_method(n));
  }
  c.validate();
  return c;
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["experiment"] = std::string(to_string(c.experiment));
  j["m"] = c.m;
  if (c.l)
    j["l"] = *c.l;
  else
    j["l"] = "auto";
  j["k"] = c.k;
  j["trials"] = c.trials;
  j["snr_grid_db"] = c.snr_grid_db;
  j["inr_grid_db"] = c.inr_grid_db;
  j["k_grid"] = c.k_grid;
  j["snr_db"] = c.snr_db;
  if (c.inr_db) j["inr_db"] = *c.inr_db;
  j["presumed_soi_deg"] = c.presumed_soi_deg;
  j["interferers_deg"] = c.interferers_deg;
  j["sector_halfwidth_deg"] = c.sector_halfwidth_deg;
  j["doa_mismatch_halfwidth_deg"] = c.doa_mismatch_halfwidth_deg;
  j["position_error_halfwidth_wl"] = c.position_error_halfwidth_wl;
  if (c.mismatch) j["mismatch"] = *c.mismatch;
  j["perturb_virtual"] = c.perturb_virtual;
  j["delta"] = c.delta;
  j["l_max"] = c.l_max;
  j["capon_samples"] = c.capon_samples;
  j["beampattern_points"] = c.beampattern_points;
  j["interferer_source"] = std::string(to_string(c.interferer_source));
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  std::vector<std::string> names;
  for (Method m : c.methods) names.emplace_back(to_string(m));
  j["methods"] = names;
  return j;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

}  // namespace beamlab
