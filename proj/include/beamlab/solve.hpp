#pragma once

// Distortionless (MVDR) weight solve shared by every beamformer.

#include <limits>

#include "beamlab/errors.hpp"
#include "beamlab/types.hpp"

namespace beamlab {

inline constexpr double kMaxConditionNumber = 1e12;
inline constexpr double kLoadingFloor = 1e-10;

/// Eigenvalue condition number of a Hermitian matrix; infinity when the
/// smallest eigenvalue is not positive.
inline double condition_number(const CMatrix& r) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(r, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

/// LDL^T factorization of a Hermitian covariance with the conditioning
/// policy applied once: if cond(R) exceeds 1e12, R + (1e-10 trace(R) / M) I
/// is factored instead, and SingularCovariance is thrown if that still fails.
class ConditionedSolver {
 public:
  explicit ConditionedSolver(const CMatrix& r) {
    if (r.rows() != r.cols() || r.rows() == 0) throw InvalidArgument("covariance must be square and nonempty");
    double cond = condition_number(r);
    if (cond <= kMaxConditionNumber) {
      ldlt_.compute(r);
      return;
    }
    const auto m = static_cast<double>(r.rows());
    loading_ = kLoadingFloor * r.trace().real() / m;
    const CMatrix loaded = r + loading_ * CMatrix::Identity(r.rows(), r.cols());
    cond = condition_number(loaded);
    if (!(cond <= kMaxConditionNumber))
      throw SingularCovariance("covariance ill-conditioned after diagonal loading", cond);
    ldlt_.compute(loaded);
  }

  CVector solve(const CVector& a) const {
    if (a.size() != ldlt_.rows()) throw InvalidArgument("dimension mismatch in covariance solve");
    return ldlt_.solve(a);
  }

  /// Diagonal load that was added (0 when none was needed).
  double loading() const noexcept { return loading_; }

 private:
  Eigen::LDLT<CMatrix> ldlt_;
  double loading_ = 0.0;
};

inline CVector conditioned_solve(const CMatrix& r, const CVector& a) { return ConditionedSolver(r).solve(a); }

/// R^{-1} a / (a^H R^{-1} a).
inline CVector mvdr_solve(const CMatrix& r, const CVector& a) {
  const CVector x = conditioned_solve(r, a);
  const Complex den = a.dot(x);  // a^H x
  if (!(std::abs(den) > 0.0) || !std::isfinite(std::abs(den)))
    throw SingularCovariance("degenerate distortionless normalization", std::numeric_limits<double>::infinity());
  return x / den;
}

}  // namespace beamlab
