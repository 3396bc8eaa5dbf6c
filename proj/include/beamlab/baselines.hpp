#pragma once

// Reference beamformers: the clairvoyant optimum, sample-matrix MVDR,
// diagonal loading, and a Capon-spectrum integral reconstruction of the
// interference-plus-noise covariance.

#include <cmath>
#include <optional>
#include <vector>

#include "beamlab/array_model.hpp"
#include "beamlab/covariance.hpp"
#include "beamlab/errors.hpp"
#include "beamlab/solve.hpp"
#include "beamlab/types.hpp"
#include "beamlab/weights.hpp"

namespace beamlab {

namespace detail {

inline void check_dims(const CovarianceEstimate& r, const SteeringVector& a) {
  if (r.dim() != a.size()) throw InvalidArgument("covariance and steering vector dimensions differ");
}

}  // namespace detail

/// Clairvoyant MVDR: true IPNC, true steering vector. Upper bound on SINR.
inline BeamformerWeights optimal_weights(const CovarianceEstimate& true_ipnc, const SteeringVector& true_sv) {
  detail::check_dims(true_ipnc, true_sv);
  return {mvdr_solve(true_ipnc.matrix, true_sv.values()), true_sv, Method::Optimal};
}

/// Sample matrix inversion MVDR.
inline BeamformerWeights scm_mvdr_weights(const CovarianceEstimate& scm, const SteeringVector& presumed_sv) {
  detail::check_dims(scm, presumed_sv);
  return {mvdr_solve(scm.matrix, presumed_sv.values()), presumed_sv, Method::ScmMvdr};
}

/// 10 x the smallest eigenvalue of the sample covariance (a noise-floor proxy).
inline double default_loading(const CovarianceEstimate& scm) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(scm.matrix, Eigen::EigenvaluesOnly);
  return 10.0 * std::max(eig.eigenvalues().minCoeff(), 0.0);
}

/// MVDR on R + loading I. Loading 0 reproduces scm_mvdr_weights.
inline BeamformerWeights diagonal_loading_weights(const CovarianceEstimate& scm, const SteeringVector& presumed_sv,
                                                  std::optional<double> loading = std::nullopt) {
  detail::check_dims(scm, presumed_sv);
  const double load = loading ? *loading : default_loading(scm);
  if (!(load >= 0.0)) throw InvalidArgument("diagonal loading must be nonnegative");
  const CMatrix loaded = scm.matrix + load * CMatrix::Identity(scm.dim(), scm.dim());
  return {mvdr_solve(loaded, presumed_sv.values()), presumed_sv, Method::DiagonalLoading};
}

/// Closed angular interval [lo, hi] in radians.
struct AngleInterval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const noexcept { return hi - lo; }
};

/// [-90 deg, soi - halfwidth) and (soi + halfwidth, 90 deg], dropping any
/// piece of zero width.
inline std::vector<AngleInterval> sector_complement(double presumed_soi, double halfwidth) {
  std::vector<AngleInterval> out;
  const double left_hi = presumed_soi - halfwidth;
  const double right_lo = presumed_soi + halfwidth;
  if (left_hi > -kPi / 2) out.push_back({-kPi / 2, std::min(left_hi, kPi / 2)});
  if (right_lo < kPi / 2) out.push_back({std::max(right_lo, -kPi / 2), kPi / 2});
  return out;
}

/// Midpoint-rule integral of a(theta) a(theta)^H / (a^H R^{-1} a) over the
/// given intervals. n_samples is split across intervals in proportion to
/// their width (at least one per interval); each interval uses its own
/// uniform step so the weights sum to the total angular measure.
inline CovarianceEstimate capon_integral_ipnc(const CovarianceEstimate& scm,
                                              const std::vector<AngleInterval>& sector_complement,
                                              int n_samples = 200) {
  if (n_samples < 2) throw InvalidArgument("Capon integral needs at least two samples");
  if (sector_complement.empty()) throw InvalidArgument("Capon integral needs a nonempty sector");
  double total = 0.0;
  for (const auto& iv : sector_complement) {
    if (!(iv.width() > 0.0)) throw InvalidArgument("Capon integral interval must have positive width");
    total += iv.width();
  }

  const int m = scm.dim();
  const ConditionedSolver solver(scm.matrix);
  CMatrix r = CMatrix::Zero(m, m);
  for (const auto& iv : sector_complement) {
    const int count = std::max(1, static_cast<int>(std::lround(n_samples * iv.width() / total)));
    const double step = iv.width() / count;
    for (int i = 0; i < count; ++i) {
      const double theta = iv.lo + (i + 0.5) * step;
      const CVector a = steering_vector(theta, m).values();
      const double denom = a.dot(solver.solve(a)).real();
      if (!(denom > 0.0)) throw SingularCovariance("nonpositive Capon denominator", denom);
      r.noalias() += (step / denom) * (a * a.adjoint());
    }
  }
  return {hermitian_part(r), CovarianceKind::Reconstructed};
}

/// MVDR against the Capon-integral reconstruction over the complement of
/// the look-direction sector.
inline BeamformerWeights capon_integral_weights(const CovarianceEstimate& scm, const SteeringVector& presumed_sv,
                                                double halfwidth, int n_samples = 200) {
  detail::check_dims(scm, presumed_sv);
  const CovarianceEstimate r =
      capon_integral_ipnc(scm, sector_complement(presumed_sv.angle(), halfwidth), n_samples);
  return {mvdr_solve(r.matrix, presumed_sv.values()), presumed_sv, Method::CaponIntegral};
}

}  // namespace beamlab
