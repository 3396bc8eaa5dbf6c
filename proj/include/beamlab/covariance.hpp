#pragma once

#include "beamlab/array_model.hpp"
#include "beamlab/errors.hpp"
#include "beamlab/types.hpp"

namespace beamlab {

enum class CovarianceKind { Sample, Theoretical, TrueIPNC, Reconstructed };

inline const char* to_string(CovarianceKind kind) {
  switch (kind) {
    case CovarianceKind::Sample: return "sample";
    case CovarianceKind::Theoretical: return "theoretical";
    case CovarianceKind::TrueIPNC: return "true_ipnc";
    case CovarianceKind::Reconstructed: return "reconstructed";
  }
  return "unknown";
}

/// Hermitian covariance matrix tagged with how it was obtained.
struct CovarianceEstimate {
  CMatrix matrix;
  CovarianceKind kind = CovarianceKind::Sample;

  int dim() const noexcept { return static_cast<int>(matrix.rows()); }
};

/// (A + A^H) / 2; applied after every accumulation.
inline CMatrix hermitian_part(const CMatrix& a) { return (a + a.adjoint()) / 2.0; }

/// (1/K) X X^H over the columns of X.
inline CovarianceEstimate sample_covariance(const CMatrix& snapshots) {
  if (snapshots.rows() == 0 || snapshots.cols() == 0)
    throw InvalidArgument("sample covariance of an empty snapshot matrix");
  const double k = static_cast<double>(snapshots.cols());
  CMatrix r = snapshots * snapshots.adjoint() / k;
  return {hermitian_part(r), CovarianceKind::Sample};
}

namespace detail {

// Sum of power * b b^H for every source plus noise * I at dimension n, with
// b = sqrt(n/M) a_n so the top-left M block is the physical-array covariance.
inline CMatrix source_covariance(const Scenario& scenario, int n, bool include_soi, bool use_true_geometry) {
  scenario.validate();
  const int m = scenario.n_physical();
  if (n < 1) throw InvalidArgument("covariance dimension must be positive");
  const ArrayGeometry geometry =
      use_true_geometry ? scenario.geometry : ArrayGeometry::nominal(m, scenario.geometry.spacing);
  const double amp2 = static_cast<double>(n) / static_cast<double>(m);

  CMatrix r = scenario.noise_power * CMatrix::Identity(n, n);
  auto add = [&](double direction, double power) {
    const CVector a = steering_vector(direction, n, geometry).values();
    r.noalias() += (power * amp2) * (a * a.adjoint());
  };
  if (include_soi) add(scenario.soi_direction_true, scenario.soi_power);
  for (std::size_t p = 0; p < scenario.n_interferers(); ++p)
    add(scenario.interferer_directions_true[p], scenario.interferer_powers[p]);
  return hermitian_part(r);
}

}  // namespace detail

/// Exact covariance of the received data at dimension n (true directions).
inline CovarianceEstimate theoretical_covariance(const Scenario& scenario, int n, bool use_true_geometry = true) {
  if (use_true_geometry && n < scenario.n_physical())
    throw InvalidArgument("dimension below the physical element count");
  return {detail::source_covariance(scenario, n, true, use_true_geometry), CovarianceKind::Theoretical};
}

/// Exact interference-plus-noise covariance with true directions and true
/// geometry. Evaluation only.
inline CovarianceEstimate true_ipnc(const Scenario& scenario, int n) {
  if (n < scenario.n_physical()) throw InvalidArgument("dimension below the physical element count");
  return {detail::source_covariance(scenario, n, false, true), CovarianceKind::TrueIPNC};
}

inline CovarianceEstimate true_ipnc(const Scenario& scenario) { return true_ipnc(scenario, scenario.n_physical()); }

/// Top-left m x m principal block of an extended-array covariance.
inline CovarianceEstimate extended_block(const CovarianceEstimate& cov_l, int m) {
  if (m < 1) throw InvalidArgument("block dimension must be positive");
  if (m > cov_l.dim()) throw InvalidArgument("block dimension exceeds the covariance dimension");
  return {hermitian_part(cov_l.matrix.topLeftCorner(m, m)), cov_l.kind};
}

}  // namespace beamlab
