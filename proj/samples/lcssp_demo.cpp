// Single-run walkthrough: 10-element ULA, SOI at broadside, two 30 dB
// interferers at +-30 degrees, 50 snapshots, virtual array of 20 elements.

#include <cstdio>

#include "beamlab/beamlab.hpp"

int main() {
  using namespace beamlab;

  Scenario s;
  s.soi_direction_true = s.soi_direction_presumed = 0.0;
  s.interferer_directions_true = s.interferer_directions_nominal = {deg_to_rad(-30.0), deg_to_rad(30.0)};
  s.interferer_powers = {db_to_power(30.0), db_to_power(30.0)};
  s.soi_power = db_to_power(10.0);
  s.noise_power = 1.0;
  s.geometry = ArrayGeometry::nominal(10);

  LcsspConfig config = LcsspConfig::for_array(10, 0.0, s.interferer_directions_nominal);
  config.fixed_dimension = 20;

  auto source = [&s](int l, int k, std::uint64_t seed) { return generate_snapshots(s, l, k, seed); };
  const LcsspResult r = run_lcssp(source, config, 50, 42);

  const SteeringVector a = true_soi_vector(s);
  const CovarianceEstimate ipnc = true_ipnc(s);
  std::printf("L = %d, normalized error = %.3g\n", r.l_chosen, r.epsilon_n);
  std::printf("LCSSP SINR   %.2f dB\n", output_sinr(r.weights, s.soi_power, a, ipnc));
  std::printf("optimal SINR %.2f dB\n", optimal_sinr(s));

  const BeampatternCurve bp = beampattern(r.weights, beampattern_grid());
  std::printf("gain at -30 deg: %.1f dB, +30 deg: %.1f dB, peak at %.1f deg\n", bp.gain_at(deg_to_rad(-30.0)),
              bp.gain_at(deg_to_rad(30.0)), rad_to_deg(bp.peak_angle()));
  return 0;
}
