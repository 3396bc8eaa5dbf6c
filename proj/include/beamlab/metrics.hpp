#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "beamlab/array_model.hpp"
#include "beamlab/baselines.hpp"
#include "beamlab/covariance.hpp"
#include "beamlab/errors.hpp"
#include "beamlab/types.hpp"
#include "beamlab/weights.hpp"

namespace beamlab {

/// Output SINR in dB, sigma_s^2 |w^H a|^2 / (w^H R w), against the true
/// steering vector and true interference-plus-noise covariance.
inline double output_sinr(const CVector& w, double soi_power, const SteeringVector& true_sv,
                          const CovarianceEstimate& true_ipnc) {
  if (w.size() != true_sv.size() || w.size() != true_ipnc.dim())
    throw InvalidArgument("weight, steering vector and covariance dimensions differ");
  if (w.squaredNorm() == 0.0) throw InvalidArgument("zero weight vector");
  const double den = w.dot(true_ipnc.matrix * w).real();
  if (!(den > 0.0)) throw InvalidArgument("nonpositive output interference-plus-noise power");
  return power_to_db(soi_power * std::norm(w.dot(true_sv.values())) / den);
}

inline double output_sinr(const BeamformerWeights& w, double soi_power, const SteeringVector& true_sv,
                          const CovarianceEstimate& true_ipnc) {
  return output_sinr(w.values, soi_power, true_sv, true_ipnc);
}

/// True steering vector of the desired signal on the physical array.
inline SteeringVector true_soi_vector(const Scenario& scenario) {
  return steering_vector(scenario.soi_direction_true, scenario.n_physical(), scenario.geometry);
}

/// Output SINR of the clairvoyant optimum, in dB.
inline double optimal_sinr(const Scenario& scenario) {
  const SteeringVector a = true_soi_vector(scenario);
  const CovarianceEstimate r = true_ipnc(scenario);
  return output_sinr(optimal_weights(r, a), scenario.soi_power, a, r);
}

/// Optimal SINR minus the SINR of w, in dB; nonnegative up to rounding.
inline double sinr_deviation(const BeamformerWeights& w, const Scenario& scenario) {
  const SteeringVector a = true_soi_vector(scenario);
  const CovarianceEstimate r = true_ipnc(scenario);
  return optimal_sinr(scenario) - output_sinr(w, scenario.soi_power, a, r);
}

/// Normalized beampattern: gains_db peaks at exactly 0 dB.
struct BeampatternCurve {
  std::vector<double> angles;
  std::vector<double> gains_db;

  std::size_t peak_index() const {
    return static_cast<std::size_t>(std::max_element(gains_db.begin(), gains_db.end()) - gains_db.begin());
  }
  double peak_angle() const { return angles.at(peak_index()); }

  /// Gain at the grid point nearest to angle.
  double gain_at(double angle) const {
    if (angles.empty()) throw InvalidArgument("empty beampattern");
    const auto it = std::lower_bound(angles.begin(), angles.end(), angle);
    std::size_t i = static_cast<std::size_t>(it - angles.begin());
    if (i == angles.size()) --i;
    if (i > 0 && std::abs(angles[i - 1] - angle) <= std::abs(angles[i] - angle)) --i;
    return gains_db[i];
  }
};

/// `points` equally spaced angles covering [-90, 90] degrees, endpoints included.
inline std::vector<double> beampattern_grid(int points = 1801) {
  if (points < 2) throw InvalidArgument("beampattern grid needs at least two points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = deg_to_rad(-90.0 + 180.0 * i / (points - 1));
  return grid;
}

/// 20 log10 |w^H a(theta)| on the grid, nominal geometry, shifted so the
/// maximum is 0 dB. Exact nulls are floored at -400 dB.
inline BeampatternCurve beampattern(const CVector& w, const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidArgument("beampattern grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw InvalidArgument("beampattern grid must be strictly increasing");
  const int m = static_cast<int>(w.size());
  BeampatternCurve curve;
  curve.angles = grid;
  curve.gains_db.reserve(grid.size());
  for (double theta : grid) {
    const double g = std::abs(w.dot(steering_vector(theta, m).values()));
    curve.gains_db.push_back(20.0 * std::log10(std::max(g, 1e-20)));
  }
  const double peak = *std::max_element(curve.gains_db.begin(), curve.gains_db.end());
  for (double& g : curve.gains_db) g -= peak;
  return curve;
}

inline BeampatternCurve beampattern(const BeamformerWeights& w, const std::vector<double>& grid) {
  return beampattern(w.values, grid);
}

}  // namespace beamlab
