#pragma once

// Monte Carlo experiment runner.
//
// Each trial draws its own mismatch realization (look-direction and
// interferer DoA offsets, sensor position errors) and snapshot noise from a
// seed derived from the master seed and the trial index. The same trial seed
// is reused at every point of the swept grid. Trials are independent and may
// run on several worker threads; results land in per-trial slots and are
// aggregated serially, so the output does not depend on the worker count.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "beamlab/array_model.hpp"
#include "beamlab/baselines.hpp"
#include "beamlab/covariance.hpp"
#include "beamlab/errors.hpp"
#include "beamlab/experiment_config.hpp"
#include "beamlab/lcssp.hpp"
#include "beamlab/metrics.hpp"
#include "beamlab/types.hpp"
#include "beamlab/weights.hpp"

namespace beamlab {

/// SplitMix64 finalizer over (seed, stream): decorrelated per-trial seeds.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Aggregates for one method over the swept grid.
struct MethodSeries {
  Method method = Method::Optimal;
  std::vector<double> mean_db;
  std::vector<double> std_db;
  std::vector<int> n_ok;
  std::vector<std::vector<double>> raw_db;  // [x][trial]; NaN marks a failed trial
};

struct TrialFailure {
  std::size_t x_index = 0;
  int trial = 0;
  Method method = Method::Optimal;
  std::string message;
};

struct SweepResult {
  Experiment experiment = Experiment::SinrVsSnr;
  std::string x_label;
  std::vector<double> x_values;
  int trials = 0;
  std::vector<MethodSeries> series;
  std::map<int, int> l_histogram;          // chosen L -> count over (x, trial)
  std::vector<double> epsilon_n;           // one entry per (x, trial) LCSSP run
  std::vector<TrialFailure> failures;
  int dominance_violations = 0;            // trials where a method beat the optimum by > 1e-6 dB
  std::vector<std::pair<Method, BeampatternCurve>> beampatterns;  // beampattern experiment, trial 0

  const MethodSeries& at(Method m) const {
    for (const auto& s : series)
      if (s.method == m) return s;
    throw InvalidArgument("method not present in sweep result: " + std::string(to_string(m)));
  }

  bool has(Method m) const {
    for (const auto& s : series)
      if (s.method == m) return true;
    return false;
  }

  bool all_ok() const { return failures.empty() && dominance_violations == 0; }
};

inline constexpr double kDominanceToleranceDb = 1e-6;

/// Mismatch realization for one trial, reused across the swept grid.
struct MismatchDraw {
  double soi_offset = 0.0;
  std::vector<double> interferer_offsets;
  std::vector<double> position_errors;
  std::vector<double> virtual_errors;
};

inline MismatchDraw draw_mismatch(const ExperimentConfig& config, int n_virtual, std::uint64_t seed) {
  MismatchDraw d;
  d.interferer_offsets.assign(config.interferers_deg.size(), 0.0);
  d.position_errors.assign(static_cast<std::size_t>(config.m), 0.0);
  if (!config.mismatch_enabled()) return d;
  std::mt19937_64 rng(seed);
  const double doa = deg_to_rad(config.doa_mismatch_halfwidth_deg);
  const double pos = config.position_error_halfwidth_wl;
  std::uniform_real_distribution<double> doa_dist(-doa, doa);
  std::uniform_real_distribution<double> pos_dist(-pos, pos);
  d.soi_offset = doa_dist(rng);
  for (double& o : d.interferer_offsets) o = doa_dist(rng);
  for (double& e : d.position_errors) e = pos_dist(rng);
  if (config.perturb_virtual) {
    d.virtual_errors.resize(static_cast<std::size_t>(std::max(n_virtual, 0)));
    for (double& e : d.virtual_errors) e = pos_dist(rng);
  }
  return d;
}

/// Scenario for one grid point of one trial. Noise power is 1.
inline Scenario make_scenario(const ExperimentConfig& config, const MismatchDraw& draw, double snr_db,
                              double inr_db) {
  Scenario s;
  s.soi_direction_presumed = deg_to_rad(config.presumed_soi_deg);
  s.soi_direction_true = s.soi_direction_presumed + draw.soi_offset;
  for (std::size_t p = 0; p < config.interferers_deg.size(); ++p) {
    const double nominal = deg_to_rad(config.interferers_deg[p]);
    s.interferer_directions_nominal.push_back(nominal);
    s.interferer_directions_true.push_back(nominal + draw.interferer_offsets[p]);
    s.interferer_powers.push_back(db_to_power(inr_db));
  }
  s.soi_power = db_to_power(snr_db);
  s.noise_power = 1.0;
  s.geometry = ArrayGeometry::nominal(config.m);
  s.geometry.position_errors = draw.position_errors;
  s.geometry.virtual_errors = draw.virtual_errors;
  return s;
}

inline LcsspConfig lcssp_config_for(const ExperimentConfig& config, std::vector<double> interferers) {
  LcsspConfig c = LcsspConfig::for_array(config.m, deg_to_rad(config.presumed_soi_deg), std::move(interferers));
  c.soi_sector_halfwidth = deg_to_rad(config.sector_halfwidth_deg);
  c.delta = config.delta;
  c.l_max = config.effective_l_max();
  c.fixed_dimension = config.l;
  return c;
}

namespace detail {

struct MethodOutcome {
  double sinr_db = std::numeric_limits<double>::quiet_NaN();
  std::string error;
  std::optional<BeamformerWeights> weights;
};

struct PointOutcome {
  std::vector<MethodOutcome> methods;  // indexed like config.methods
  double optimal_db = std::numeric_limits<double>::quiet_NaN();
  int l_chosen = 0;
  double epsilon_n = std::numeric_limits<double>::quiet_NaN();
};

struct TrialOutcome {
  std::vector<PointOutcome> points;  // indexed by x
};

inline PointOutcome run_point(const ExperimentConfig& config, const Scenario& scenario, int k,
                              std::uint64_t snapshot_seed, const std::optional<DimensionChoice>& fixed_choice) {
  const int m = config.m;
  PointOutcome out;
  out.methods.resize(config.methods.size());

  const SteeringVector true_sv = true_soi_vector(scenario);
  const CovarianceEstimate ipnc = true_ipnc(scenario);
  const SteeringVector presumed = steering_vector(scenario.soi_direction_presumed, m);
  out.optimal_db = output_sinr(optimal_weights(ipnc, true_sv), scenario.soi_power, true_sv, ipnc);

  // The leading M rows are the physical data regardless of the extended
  // dimension, so every method sees the same physical snapshots.
  const bool wants_lcssp = config.uses(Method::Lcssp);
  std::optional<DimensionChoice> choice = fixed_choice;
  std::string lcssp_error;
  CMatrix snapshots = generate_snapshots(scenario, m, k, snapshot_seed);
  const CovarianceEstimate scm = sample_covariance(snapshots);
  if (wants_lcssp) {
    try {
      if (!choice) {
        const LcsspConfig base = lcssp_config_for(config, {});
        const auto est = estimate_interferer_directions(scm, base.presumed_soi, base.soi_sector_halfwidth,
                                                        config.interferers_deg.size());
        choice = choose_dimension(lcssp_config_for(config, est));
      }
      if (choice->l > m) snapshots = generate_snapshots(scenario, choice->l, k, snapshot_seed);
    } catch (const Error& e) {
      lcssp_error = e.what();
    }
  }

  for (std::size_t i = 0; i < config.methods.size(); ++i) {
    MethodOutcome& mo = out.methods[i];
    try {
      switch (config.methods[i]) {
        case Method::Optimal: mo.weights = optimal_weights(ipnc, true_sv); break;
        case Method::ScmMvdr: mo.weights = scm_mvdr_weights(scm, presumed); break;
        case Method::DiagonalLoading: mo.weights = diagonal_loading_weights(scm, presumed); break;
        case Method::CaponIntegral:
          mo.weights = capon_integral_weights(scm, presumed, deg_to_rad(config.sector_halfwidth_deg),
                                              config.capon_samples);
          break;
        case Method::Lcssp: {
          if (!lcssp_error.empty()) throw Error(lcssp_error);
          LcsspResult r =
              lcssp_from_covariance(*choice, sample_covariance(snapshots), lcssp_config_for(config, {}));
          out.l_chosen = r.l_chosen;
          out.epsilon_n = r.epsilon_n;
          mo.weights = std::move(r.weights);
          break;
        }
      }
      mo.sinr_db = output_sinr(*mo.weights, scenario.soi_power, true_sv, ipnc);
      if (!std::isfinite(mo.sinr_db)) throw Error("non-finite output SINR");
    } catch (const std::exception& e) {
      mo.error = e.what();
      mo.sinr_db = std::numeric_limits<double>::quiet_NaN();
      mo.weights.reset();
    }
  }
  return out;
}

}  // namespace detail

/// Runs every trial of the configured sweep and aggregates per method.
inline SweepResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::vector<double> xs = config.x_values();
  const int trials = config.trials;

  // In config mode the L choice depends only on the configuration.
  std::optional<DimensionChoice> fixed_choice;
  if (config.uses(Method::Lcssp) && (config.interferer_source == InterfererSource::Config || config.l)) {
    std::vector<double> nominal;
    for (double a : config.interferers_deg) nominal.push_back(deg_to_rad(a));
    fixed_choice = choose_dimension(lcssp_config_for(config, nominal));
  }
  const int n_virtual = config.effective_l_max() - config.m;

  std::vector<detail::TrialOutcome> outcomes(static_cast<std::size_t>(trials));
  auto run_trial = [&](int t) {
    const std::uint64_t trial_seed = derive_seed(config.seed, static_cast<std::uint64_t>(t));
    const MismatchDraw draw = draw_mismatch(config, n_virtual, derive_seed(trial_seed, 0));
    const std::uint64_t snapshot_seed = derive_seed(trial_seed, 1);
    detail::TrialOutcome& out = outcomes[static_cast<std::size_t>(t)];
    out.points.reserve(xs.size());
    for (double x : xs) {
      double snr = config.snr_db;
      double inr = config.effective_inr_db();
      int k = config.k;
      switch (config.experiment) {
        case Experiment::Beampattern: snr = x; break;
        case Experiment::SinrVsSnr: snr = x; break;
        case Experiment::SinrVsInr: inr = x; break;
        case Experiment::SinrVsSnapshots: k = static_cast<int>(x); break;
      }
      const Scenario scenario = make_scenario(config, draw, snr, inr);
      out.points.push_back(detail::run_point(config, scenario, k, snapshot_seed, fixed_choice));
    }
  };

  const int workers = std::min(config.workers, trials);
  if (workers <= 1) {
    for (int t = 0; t < trials; ++t) run_trial(t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int t = next++; t < trials; t = next++) run_trial(t);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  SweepResult result;
  result.experiment = config.experiment;
  result.x_label = std::string(config.x_label());
  result.x_values = xs;
  result.trials = trials;
  for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
    MethodSeries s;
    s.method = config.methods[mi];
    for (std::size_t xi = 0; xi < xs.size(); ++xi) {
      std::vector<double> raw(static_cast<std::size_t>(trials));
      double sum = 0.0;
      int ok = 0;
      for (int t = 0; t < trials; ++t) {
        const auto& mo = outcomes[static_cast<std::size_t>(t)].points[xi].methods[mi];
        raw[static_cast<std::size_t>(t)] = mo.sinr_db;
        if (mo.error.empty()) {
          sum += mo.sinr_db;
          ++ok;
        } else {
          result.failures.push_back({xi, t, s.method, mo.error});
        }
      }
      const double mean = ok > 0 ? sum / ok : std::numeric_limits<double>::quiet_NaN();
      double ss = 0.0;
      for (double v : raw)
        if (!std::isnan(v)) ss += (v - mean) * (v - mean);
      s.mean_db.push_back(mean);
      s.std_db.push_back(ok > 1 ? std::sqrt(ss / (ok - 1)) : 0.0);
      s.n_ok.push_back(ok);
      s.raw_db.push_back(std::move(raw));
    }
    result.series.push_back(std::move(s));
  }

  for (int t = 0; t < trials; ++t) {
    for (const auto& p : outcomes[static_cast<std::size_t>(t)].points) {
      for (const auto& mo : p.methods)
        if (mo.error.empty() && mo.sinr_db > p.optimal_db + kDominanceToleranceDb) ++result.dominance_violations;
      if (config.uses(Method::Lcssp) && p.l_chosen > 0) {
        ++result.l_histogram[p.l_chosen];
        result.epsilon_n.push_back(p.epsilon_n);
      }
    }
  }

  if (config.experiment == Experiment::Beampattern) {
    const std::vector<double> grid = beampattern_grid(config.beampattern_points);
    const auto& first = outcomes.front().points.front();
    for (std::size_t mi = 0; mi < config.methods.size(); ++mi)
      if (first.methods[mi].weights)
        result.beampatterns.emplace_back(config.methods[mi], beampattern(*first.methods[mi].weights, grid));
  }
  return result;
}

}  // namespace beamlab
