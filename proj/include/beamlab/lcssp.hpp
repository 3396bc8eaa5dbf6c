#pragma once

// Low-complexity spatial sampling (LCSSP) reconstruction of the
// interference-plus-noise covariance.
//
// The selection-function zeros of an L-element virtual array steered to the
// presumed look direction give an orthonormal steering basis. Dropping the
// basis vectors inside the look-direction sector leaves an orthogonal
// projector C that annihilates the desired signal and passes interference and
// noise. The top-left M x M block of C R_L C^H is the reconstructed
// covariance, and MVDR weights against it form the beamformer. L grows from M
// until the interferer leakage ||(I - C) B||_F / ||B||_F drops below delta.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "beamlab/array_model.hpp"
#include "beamlab/covariance.hpp"
#include "beamlab/errors.hpp"
#include "beamlab/solve.hpp"
#include "beamlab/types.hpp"
#include "beamlab/weights.hpp"

namespace beamlab {

struct LcsspConfig {
  double presumed_soi = 0.0;                       // also the steering angle phi0
  double soi_sector_halfwidth = deg_to_rad(6.0);
  double delta = 0.05;
  int physical_elements = 10;
  int l_initial = 10;
  int l_max = 80;
  std::vector<double> nominal_interferers;
  std::optional<int> fixed_dimension;              // bypasses the delta search

  /// Defaults for an M-element array: L searched over [M, 8M].
  static LcsspConfig for_array(int m, double presumed_soi, std::vector<double> interferers) {
    LcsspConfig c;
    c.presumed_soi = presumed_soi;
    c.physical_elements = m;
    c.l_initial = m;
    c.l_max = 8 * m;
    c.nominal_interferers = std::move(interferers);
    return c;
  }

  void validate() const {
    if (!(std::abs(presumed_soi) < kPi / 2)) throw InvalidArgument("presumed SOI must lie in (-pi/2, pi/2)");
    if (!(soi_sector_halfwidth >= 0.0)) throw InvalidArgument("sector half-width must be nonnegative");
    if (!(delta > 0.0 && delta <= 1.0)) throw InvalidArgument("delta must lie in (0, 1]");
    if (physical_elements < 1) throw InvalidArgument("need at least one physical element");
    if (l_initial < physical_elements) throw InvalidArgument("l_initial must be at least the physical count");
    if (l_initial > l_max) throw InvalidArgument("l_initial exceeds l_max");
    if (fixed_dimension && *fixed_dimension < physical_elements)
      throw InvalidArgument("fixed dimension below the physical count");
  }
};

/// L x L orthogonal projector onto the retained steering basis vectors.
struct ProjectionMatrix {
  CMatrix matrix;
  int dim = 0;
  std::vector<double> retained_angles;
  std::vector<double> excluded_angles;  // phi0 followed by the zeros inside the sector

  int rank() const noexcept { return static_cast<int>(retained_angles.size()); }
};

/// Builds C = sum over retained zeros phi of a_L(phi) a_L(phi)^H.
inline ProjectionMatrix build_projection(const LcsspConfig& config, int l) {
  if (l < 2) throw InvalidArgument("projection dimension must be at least 2");
  const double phi0 = config.presumed_soi;
  ProjectionMatrix c;
  c.dim = l;
  c.excluded_angles.push_back(phi0);
  for (double phi : selection_zeros(phi0, l)) {
    if (std::abs(phi - phi0) <= config.soi_sector_halfwidth)
      c.excluded_angles.push_back(phi);
    else
      c.retained_angles.push_back(phi);
  }
  if (c.retained_angles.empty())
    throw InvalidArgument("SOI sector contains every basis direction at L = " + std::to_string(l));

  CMatrix basis(l, static_cast<Eigen::Index>(c.retained_angles.size()));
  for (std::size_t i = 0; i < c.retained_angles.size(); ++i)
    basis.col(static_cast<Eigen::Index>(i)) = steering_vector(c.retained_angles[i], l).values();
  c.matrix = hermitian_part(basis * basis.adjoint());
  return c;
}

/// ||C B - B||_F / ||B||_F with B = [a_L(theta_1) ... a_L(theta_P)].
inline double normalized_error(const ProjectionMatrix& c, const std::vector<double>& interferer_angles) {
  if (interferer_angles.empty()) throw InvalidArgument("normalized error needs at least one interferer");
  CMatrix b(c.dim, static_cast<Eigen::Index>(interferer_angles.size()));
  for (std::size_t p = 0; p < interferer_angles.size(); ++p)
    b.col(static_cast<Eigen::Index>(p)) = steering_vector(interferer_angles[p], c.dim).values();
  return (c.matrix * b - b).norm() / b.norm();
}

struct DimensionChoice {
  int l = 0;
  ProjectionMatrix projection;
  double epsilon_n = 0.0;  // NaN when no interferer list was available
};

/// Smallest L in [l_initial, l_max] whose projector meets the delta bound on
/// the nominal interferers. Dimensions where the sector swallows every basis
/// direction are skipped.
inline DimensionChoice select_dimension(const LcsspConfig& config) {
  config.validate();
  if (config.nominal_interferers.empty())
    throw InvalidArgument("dimension search needs nominal interferer directions");
  double best_error = std::numeric_limits<double>::infinity();
  int best_l = config.l_initial;
  for (int l = std::max(config.l_initial, 2); l <= config.l_max; ++l) {
    ProjectionMatrix c;
    try {
      c = build_projection(config, l);
    } catch (const InvalidArgument&) {
      continue;
    }
    const double err = normalized_error(c, config.nominal_interferers);
    if (err <= config.delta) return {l, std::move(c), err};
    if (err < best_error) {
      best_error = err;
      best_l = l;
    }
  }
  throw NoConvergence("no L up to " + std::to_string(config.l_max) + " meets delta; best error " +
                          std::to_string(best_error) + " at L = " + std::to_string(best_l),
                      best_error, best_l);
}

/// The configured dimension if pinned, otherwise the delta search.
inline DimensionChoice choose_dimension(const LcsspConfig& config) {
  config.validate();
  if (!config.fixed_dimension) return select_dimension(config);
  const int l = *config.fixed_dimension;
  ProjectionMatrix c = build_projection(config, l);
  const double err = config.nominal_interferers.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                        : normalized_error(c, config.nominal_interferers);
  return {l, std::move(c), err};
}

/// Top-left m x m block of C R_L C^H.
inline CovarianceEstimate reconstruct_ipnc(const ProjectionMatrix& c, const CovarianceEstimate& cov_l, int m) {
  if (c.dim != cov_l.dim()) throw InvalidArgument("projection and covariance dimensions differ");
  if (m < 1 || m > c.dim) throw InvalidArgument("physical count must lie in [1, L]");
  const CMatrix projected = c.matrix * cov_l.matrix * c.matrix.adjoint();
  CovarianceEstimate full{hermitian_part(projected), CovarianceKind::Reconstructed};
  return extended_block(full, m);
}

/// MVDR weights against the reconstructed covariance.
inline BeamformerWeights lcssp_weights(const CovarianceEstimate& ipnc, const SteeringVector& presumed_sv) {
  if (ipnc.dim() != presumed_sv.size()) throw InvalidArgument("covariance and steering vector dimensions differ");
  return {mvdr_solve(ipnc.matrix, presumed_sv.values()), presumed_sv, Method::Lcssp};
}

struct LcsspResult {
  BeamformerWeights weights;
  int l_chosen = 0;
  double epsilon_n = 0.0;
  CovarianceEstimate ipnc;
  ProjectionMatrix projection;
};

/// Reconstruction and weights from an L-dimensional covariance whose
/// dimension was already chosen.
inline LcsspResult lcssp_from_covariance(const DimensionChoice& choice, const CovarianceEstimate& cov_l,
                                         const LcsspConfig& config) {
  const int m = config.physical_elements;
  CovarianceEstimate ipnc = reconstruct_ipnc(choice.projection, cov_l, m);
  const SteeringVector presumed = steering_vector(config.presumed_soi, m);
  BeamformerWeights w = lcssp_weights(ipnc, presumed);
  return {std::move(w), choice.l, choice.epsilon_n, std::move(ipnc), choice.projection};
}

/// Full pipeline: choose L, pull L-element snapshots from the source, form
/// the sample covariance, reconstruct, and solve.
///
/// `source(l, k, seed)` must return an l x k complex snapshot matrix.
template <typename SnapshotSource>
LcsspResult run_lcssp(SnapshotSource&& source, const LcsspConfig& config, int k, std::uint64_t seed) {
  if (k < 1) throw InvalidArgument("need at least one snapshot");
  const DimensionChoice choice = choose_dimension(config);
  const CMatrix snapshots = source(choice.l, k, seed);
  if (snapshots.rows() != choice.l) throw InvalidArgument("snapshot source returned the wrong dimension");
  return lcssp_from_covariance(choice, sample_covariance(snapshots), config);
}

/// Estimates `count` interferer directions as the largest local maxima of
/// the Capon spectrum 1 / (a^H R^{-1} a) outside the look-direction sector.
/// Used when nominal interferer directions are not supplied.
inline std::vector<double> estimate_interferer_directions(const CovarianceEstimate& scm, double presumed_soi,
                                                          double halfwidth, std::size_t count,
                                                          int grid_points = 1801) {
  if (grid_points < 3) throw InvalidArgument("Capon grid needs at least three points");
  const int m = scm.dim();
  // Endpoints stay strictly inside (-pi/2, pi/2).
  const double lo = -kPi / 2 + 1e-6;
  const double hi = kPi / 2 - 1e-6;
  std::vector<double> grid(static_cast<std::size_t>(grid_points));
  std::vector<double> power(grid.size());
  const ConditionedSolver solver(scm.matrix);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    const CVector a = steering_vector(grid[i], m).values();
    power[i] = 1.0 / std::max(a.dot(solver.solve(a)).real(), 1e-300);
  }
  std::vector<std::pair<double, double>> peaks;  // (power, angle)
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    if (std::abs(grid[i] - presumed_soi) <= halfwidth) continue;
    if (power[i] >= power[i - 1] && power[i] > power[i + 1]) peaks.emplace_back(power[i], grid[i]);
  }
  std::sort(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<double> out;
  for (std::size_t i = 0; i < peaks.size() && i < count; ++i) out.push_back(peaks[i].second);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace beamlab
