#pragma once

#include <string_view>

#include "beamlab/array_model.hpp"
#include "beamlab/types.hpp"

namespace beamlab {

enum class Method { Optimal, ScmMvdr, DiagonalLoading, CaponIntegral, Lcssp };

inline constexpr Method kAllMethods[] = {Method::Optimal, Method::ScmMvdr, Method::DiagonalLoading,
                                         Method::CaponIntegral, Method::Lcssp};

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::Optimal: return "optimal";
    case Method::ScmMvdr: return "scm_mvdr";
    case Method::DiagonalLoading: return "diagonal_loading";
    case Method::CaponIntegral: return "capon_integral";
    case Method::Lcssp: return "lcssp";
  }
  return "unknown";
}

/// Complex M-vector w with the presumed steering vector it was built
/// against; w^H a = 1.
struct BeamformerWeights {
  CVector values;
  SteeringVector presumed_sv;
  Method method;

  int size() const noexcept { return static_cast<int>(values.size()); }

  /// w^H a for the presumed steering vector.
  Complex response_to_presumed() const { return values.dot(presumed_sv.values()); }
};

}  // namespace beamlab
