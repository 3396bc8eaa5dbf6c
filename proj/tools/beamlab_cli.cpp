// beamlab: Monte Carlo runner for the LCSSP beamformer and its baselines.
//
//   beamlab run --config cfg.json [--experiment sinr_vs_snr] [--seed 7] [--trials 100]
//               [--out results] [--workers 4] [--fix-l 20 | --auto-l] [--methods lcssp,optimal]
//   beamlab plot-script --out results
//
// Exit status: 0 on success, 1 on a configuration error, 2 if any trial failed.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beamlab/beamlab.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitTrialFailure = 2;

std::vector<beamlab::Method> parse_methods(const std::string& list) {
  std::vector<beamlab::Method> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(beamlab::parse_method(item));
  return out;
}

void print_summary(const beamlab::SweepResult& r) {
  std::printf("%-12s", r.x_label.c_str());
  for (const auto& s : r.series) std::printf(" %18s", std::string(beamlab::to_string(s.method)).c_str());
  std::printf("\n");
  for (std::size_t xi = 0; xi < r.x_values.size(); ++xi) {
    std::printf("%-12g", r.x_values[xi]);
    for (const auto& s : r.series) std::printf(" %12.3f (%3d)", s.mean_db[xi], s.n_ok[xi]);
    std::printf("\n");
  }
  if (!r.l_histogram.empty()) {
    std::printf("LCSSP dimension:");
    for (const auto& [l, n] : r.l_histogram) std::printf(" L=%d x%d", l, n);
    std::printf("\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust adaptive beamforming experiments (LCSSP and baselines)"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a Monte Carlo experiment and write CSV results");
  std::string config_path;
  std::optional<std::string> experiment;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> workers;
  std::optional<int> fix_l;
  bool auto_l = false;
  std::optional<std::string> methods;
  std::string out_dir = "results";
  run->add_option("--config", config_path, "JSON experiment configuration")->check(CLI::ExistingFile);
  run->add_option("--experiment", experiment, "beampattern | sinr_vs_snr | sinr_vs_snapshots | sinr_vs_inr");
  run->add_option("--seed", seed, "Master seed");
  run->add_option("--trials", trials, "Monte Carlo trials");
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--workers", workers, "Worker threads");
  auto* fix_opt = run->add_option("--fix-l", fix_l, "Pin the virtual array dimension L");
  auto* auto_opt = run->add_flag("--auto-l", auto_l, "Search L by the normalized-error threshold");
  fix_opt->excludes(auto_opt);
  run->add_option("--methods", methods, "Comma list of optimal,scm_mvdr,diagonal_loading,capon_integral,lcssp");

  auto* plot = app.add_subcommand("plot-script", "Write a matplotlib script that plots the CSV results");
  std::string plot_dir = "results";
  plot->add_option("--out", plot_dir, "Directory receiving plot_results.py")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*plot) {
    try {
      const auto path = beamlab::write_plot_script(plot_dir);
      std::cout << "wrote " << path.string() << "\n";
      return kExitOk;
    } catch (const beamlab::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitConfig;
    }
  }

  beamlab::ExperimentConfig config;
  try {
    if (!config_path.empty()) config = beamlab::load_config(config_path);
    if (experiment) config.experiment = beamlab::parse_experiment(*experiment);
    if (seed) config.seed = *seed;
    if (trials) config.trials = *trials;
    if (workers) config.workers = *workers;
    if (fix_l) config.l = *fix_l;
    if (auto_l) config.l.reset();
    if (methods) config.methods = parse_methods(*methods);
    config.validate();
  } catch (const beamlab::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  beamlab::SweepResult result;
  try {
    result = beamlab::run_experiment(config);
  } catch (const beamlab::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    const std::string name(beamlab::to_string(config.experiment));
    beamlab::emit_csv(result, dir / (name + ".csv"));
    if (!result.beampatterns.empty()) beamlab::emit_beampattern_csv(result, dir / "beampattern_curves.csv");
    std::cout << "wrote " << (dir / (name + ".csv")).string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  print_summary(result);
  for (const auto& f : result.failures)
    std::cerr << "trial " << f.trial << " at x=" << result.x_values[f.x_index] << " ("
              << beamlab::to_string(f.method) << ") failed: " << f.message << "\n";
  if (result.dominance_violations > 0)
    std::cerr << result.dominance_violations << " trial(s) exceeded the optimal SINR\n";
  return result.all_ok() ? kExitOk : kExitTrialFailure;
}
