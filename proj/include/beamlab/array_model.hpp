#pragma once

// Uniform linear array signal model: steering vectors for physical and
// virtually extended arrays, the selection function with its zero set, and
// snapshot synthesis under direction and sensor-position mismatch.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "beamlab/errors.hpp"
#include "beamlab/types.hpp"

namespace beamlab {

/// Element layout of an M-sensor ULA, in wavelengths.
///
/// Physical element m sits at m * spacing + position_errors[m]. Elements with
/// index >= M are virtual; they sit at their nominal position unless
/// virtual_errors supplies a perturbation for them.
struct ArrayGeometry {
  int n_physical = 0;
  double spacing = kHalfWavelength;
  std::vector<double> position_errors;
  std::vector<double> virtual_errors;

  static ArrayGeometry nominal(int m, double spacing = kHalfWavelength) {
    ArrayGeometry g;
    g.n_physical = m;
    g.spacing = spacing;
    g.position_errors.assign(static_cast<std::size_t>(std::max(m, 0)), 0.0);
    return g;
  }

  void validate() const {
    if (n_physical < 1) throw InvalidArgument("array geometry needs at least one physical element");
    if (!(spacing > 0.0 && spacing <= 0.5))
      throw InvalidArgument("element spacing must lie in (0, 0.5] wavelengths");
    if (position_errors.size() != static_cast<std::size_t>(n_physical))
      throw InvalidArgument("position_errors must have one entry per physical element");
    for (double e : position_errors)
      if (!(std::abs(e) <= 0.25)) throw InvalidArgument("position error exceeds 0.25 wavelengths");
    for (double e : virtual_errors)
      if (!(std::abs(e) <= 0.25)) throw InvalidArgument("virtual position error exceeds 0.25 wavelengths");
  }

  double position(int element) const {
    double pos = element * spacing;
    if (element < n_physical) {
      pos += position_errors[static_cast<std::size_t>(element)];
    } else {
      const auto v = static_cast<std::size_t>(element - n_physical);
      if (v < virtual_errors.size()) pos += virtual_errors[v];
    }
    return pos;
  }

  bool is_nominal() const {
    auto zero = [](double e) { return e == 0.0; };
    return std::all_of(position_errors.begin(), position_errors.end(), zero) &&
           std::all_of(virtual_errors.begin(), virtual_errors.end(), zero);
  }
};

/// Unit-norm array response toward one direction.
class SteeringVector {
 public:
  SteeringVector(double angle, CVector values) : angle_(angle), values_(std::move(values)) {}

  double angle() const noexcept { return angle_; }
  int size() const noexcept { return static_cast<int>(values_.size()); }
  const CVector& values() const& noexcept { return values_; }
  CVector values() && noexcept { return std::move(values_); }

 private:
  double angle_;
  CVector values_;
};

namespace detail {

inline void check_angle(double angle) {
  // Endfire (exactly +-pi/2) is admitted: the selection zero set can land there.
  if (!(std::abs(angle) <= kPi / 2)) throw InvalidArgument("steering angle must lie in [-pi/2, pi/2]");
}

inline SteeringVector make_steering(double angle, int n, auto&& position_of) {
  if (n < 1) throw InvalidArgument("steering vector needs at least one element");
  check_angle(angle);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double s = std::sin(angle);
  CVector v(n);
  for (int m = 0; m < n; ++m) v(m) = std::polar(scale, 2.0 * kPi * position_of(m) * s);
  return SteeringVector(angle, std::move(v));
}

}  // namespace detail

/// Nominal ULA steering vector, (1/sqrt(n)) exp(j 2 pi m d sin(angle)).
inline SteeringVector steering_vector(double angle, int n, double spacing = kHalfWavelength) {
  return detail::make_steering(angle, n, [spacing](int m) { return m * spacing; });
}

/// Steering vector of an n-element (possibly extended) array whose first
/// geometry.n_physical elements carry the geometry's position errors.
inline SteeringVector steering_vector(double angle, int n, const ArrayGeometry& geometry) {
  return detail::make_steering(angle, n, [&geometry](int m) { return geometry.position(m); });
}

/// Inner product a^H(phi0) a(phi) of two n-element half-wavelength steering
/// vectors, evaluated as the explicit sum over elements.
inline Complex selection_function(double phi, double phi0, int n) {
  if (n < 1) throw InvalidArgument("selection function needs n >= 1");
  const double u = kPi * (std::sin(phi) - std::sin(phi0));
  Complex acc(0.0, 0.0);
  for (int m = 0; m < n; ++m) acc += std::polar(1.0, m * u);
  return acc / static_cast<double>(n);
}

/// Closed (Dirichlet kernel) form of the selection function in the variable
/// z = (sin(phi) - sin(phi0)) n / 2. Returns the limit value 1 where the
/// denominator vanishes.
inline Complex selection_function_closed_form(double phi, double phi0, int n) {
  if (n < 1) throw InvalidArgument("selection function needs n >= 1");
  const double nd = static_cast<double>(n);
  const double z = (std::sin(phi) - std::sin(phi0)) * nd / 2.0;
  const double den = nd * std::sin(kPi * z / nd);
  if (std::abs(den) < 1e-300) return Complex(1.0, 0.0);
  const double mag = std::sin(kPi * z) / den;
  return std::polar(mag, (nd - 1.0) / nd * kPi * z);
}

/// The n-1 zeros of the selection function steered to phi0, ascending.
///
/// Integer z runs over the n consecutive integers starting at
/// ceil((-1 - sin(phi0)) n / 2); z = 0 (phi0 itself) is skipped. Together
/// with phi0 the corresponding steering vectors form an orthonormal basis.
inline std::vector<double> selection_zeros(double phi0, int n) {
  if (n < 1) throw InvalidArgument("selection zeros need n >= 1");
  if (!(std::abs(phi0) < kPi / 2)) throw InvalidArgument("phi0 must lie strictly inside (-pi/2, pi/2)");
  constexpr double kClampTol = 1e-12;
  const double s = std::sin(phi0);
  const double nd = static_cast<double>(n);
  const auto lo = static_cast<long>(std::ceil((-1.0 - s) * nd / 2.0 - 1e-9));
  std::vector<double> zeros;
  zeros.reserve(static_cast<std::size_t>(n - 1));
  for (long z = lo; z < lo + n; ++z) {
    if (z == 0) continue;
    double arg = 2.0 * static_cast<double>(z) / nd + s;
    if (arg > 1.0 + kClampTol || arg < -1.0 - kClampTol)
      throw InvalidArgument("selection zero outside the visible region");
    arg = std::clamp(arg, -1.0, 1.0);
    zeros.push_back(std::asin(arg));
  }
  return zeros;
}

/// Ground truth for one Monte Carlo run.
struct Scenario {
  double soi_direction_true = 0.0;
  double soi_direction_presumed = 0.0;
  std::vector<double> interferer_directions_true;
  std::vector<double> interferer_directions_nominal;
  double soi_power = 1.0;
  std::vector<double> interferer_powers;
  double noise_power = 1.0;
  ArrayGeometry geometry;

  int n_physical() const noexcept { return geometry.n_physical; }
  std::size_t n_interferers() const noexcept { return interferer_directions_true.size(); }

  void validate() const {
    geometry.validate();
    auto inside = [](double a) { return std::abs(a) < kPi / 2; };
    if (!inside(soi_direction_true) || !inside(soi_direction_presumed))
      throw InvalidArgument("SOI direction must lie in (-pi/2, pi/2)");
    if (interferer_powers.size() != interferer_directions_true.size())
      throw InvalidArgument("one power per interferer required");
    if (!interferer_directions_nominal.empty() &&
        interferer_directions_nominal.size() != interferer_directions_true.size())
      throw InvalidArgument("nominal and true interferer lists differ in length");
    for (double a : interferer_directions_true)
      if (!inside(a)) throw InvalidArgument("interferer direction must lie in (-pi/2, pi/2)");
    for (double a : interferer_directions_nominal)
      if (!inside(a)) throw InvalidArgument("interferer direction must lie in (-pi/2, pi/2)");
    if (!(soi_power >= 0.0)) throw InvalidArgument("SOI power must be nonnegative");
    for (double p : interferer_powers)
      if (!(p >= 0.0)) throw InvalidArgument("interferer power must be nonnegative");
    if (!(noise_power > 0.0)) throw InvalidArgument("noise power must be positive");
  }
};

/// Per-element amplitude of a unit-power source: 1/sqrt(M) on every element,
/// physical or virtual, so the first M rows of an extended snapshot equal the
/// physical array's snapshot. In terms of the 1/sqrt(n)-normalized a_n this
/// is sqrt(n / M) * a_n.
inline double extended_amplitude(int n, int m) {
  return std::sqrt(static_cast<double>(n) / static_cast<double>(m));
}

/// Draws K snapshots of an n-element extended array (n >= M).
///
/// Column t is s(t) b(theta_s) + sum_p i_p(t) b(theta_p) + noise(t), where
/// b(theta) = sqrt(n/M) a_n(theta) uses the true geometry. Waveforms and noise
/// are i.i.d. circular complex Gaussian. Draw order is source waveforms, then
/// noise element by element, so the leading rows do not depend on n.
inline CMatrix generate_snapshots(const Scenario& scenario, int n_elements, int k, std::uint64_t seed) {
  scenario.validate();
  const int m = scenario.n_physical();
  if (n_elements < m) throw InvalidArgument("extended dimension must be at least the physical count");
  if (k < 1) throw InvalidArgument("need at least one snapshot");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&](double power) {
    const double sd = std::sqrt(power / 2.0);
    const double re = normal(rng);
    const double im = normal(rng);
    return Complex(sd * re, sd * im);
  };

  const double amp = extended_amplitude(n_elements, m);
  CMatrix x = CMatrix::Zero(n_elements, k);

  auto add_source = [&](double direction, double power) {
    const CVector b = amp * steering_vector(direction, n_elements, scenario.geometry).values();
    for (int t = 0; t < k; ++t) x.col(t) += draw(power) * b;
  };
  add_source(scenario.soi_direction_true, scenario.soi_power);
  for (std::size_t p = 0; p < scenario.n_interferers(); ++p)
    add_source(scenario.interferer_directions_true[p], scenario.interferer_powers[p]);

  for (int e = 0; e < n_elements; ++e)
    for (int t = 0; t < k; ++t) x(e, t) += draw(scenario.noise_power);
  return x;
}

}  // namespace beamlab
