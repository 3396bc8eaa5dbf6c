#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "beamlab/covariance.hpp"
#include "beamlab/lcssp.hpp"
#include "beamlab/metrics.hpp"
#include "oracles.hpp"

using namespace beamlab;

namespace {

const std::vector<double> kPaperInterferers{deg_to_rad(-30.0), deg_to_rad(30.0)};

LcsspConfig paper_config() { return LcsspConfig::for_array(10, 0.0, kPaperInterferers); }

Scenario paper_scenario(double snr_db = 10.0, double inr_db = 30.0) {
  Scenario s;
  s.interferer_directions_true = s.interferer_directions_nominal = kPaperInterferers;
  s.interferer_powers = {db_to_power(inr_db), db_to_power(inr_db)};
  s.soi_power = db_to_power(snr_db);
  s.geometry = ArrayGeometry::nominal(10);
  return s;
}

void expect_projector_laws(const ProjectionMatrix& c) {
  const CMatrix& p = c.matrix;
  const double l = c.dim;
  EXPECT_LE((p * p - p).norm(), 1e-9 * l);
  EXPECT_LE((p - p.adjoint()).norm(), 1e-10 * l);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(p, Eigen::EigenvaluesOnly);
  int ones = 0;
  for (int i = 0; i < eig.eigenvalues().size(); ++i) {
    const double v = eig.eigenvalues()(i);
    ASSERT_TRUE(std::abs(v) < 1e-9 || std::abs(v - 1.0) < 1e-9) << v;
    if (std::abs(v - 1.0) < 1e-9) ++ones;
  }
  EXPECT_EQ(ones, c.rank());
  for (double phi : c.retained_angles) {
    const CVector a = steering_vector(phi, c.dim).values();
    EXPECT_LT((p * a - a).norm(), 1e-9);
  }
  for (double phi : c.excluded_angles) EXPECT_LT((p * steering_vector(phi, c.dim).values()).norm(), 1e-9);
}

}  // namespace

TEST(BuildProjection, ZeroHalfwidthIsComplementOfLookDirection) {
  LcsspConfig cfg = paper_config();
  cfg.soi_sector_halfwidth = 0.0;
  const auto c = build_projection(cfg, 12);
  const CVector a = steering_vector(0.0, 12).values();
  const CMatrix expected = CMatrix::Identity(12, 12) - a * a.adjoint();
  EXPECT_LT((c.matrix - expected).norm(), 1e-12);
  EXPECT_EQ(c.rank(), 11);
  ASSERT_EQ(c.excluded_angles.size(), 1u);
}

TEST(BuildProjection, RankCountsAtDefaultSector) {
  const auto c20 = build_projection(paper_config(), 20);
  EXPECT_EQ(c20.rank(), 17);
  ASSERT_EQ(c20.excluded_angles.size(), 3u);
  EXPECT_NEAR(c20.excluded_angles[1], -std::asin(0.1), 1e-15);
  EXPECT_NEAR(c20.excluded_angles[2], std::asin(0.1), 1e-15);
  EXPECT_EQ(build_projection(paper_config(), 10).rank(), 9);
}

TEST(BuildProjection, MatchesDenseOracle) {
  for (double phi0_deg : {0.0, 10.0, -20.0, 37.5}) {
    for (int l : {7, 10, 20, 40}) {
      LcsspConfig cfg = paper_config();
      cfg.presumed_soi = deg_to_rad(phi0_deg);
      int rank = 0;
      const auto expected = oracle::projector(cfg.presumed_soi, cfg.soi_sector_halfwidth, l, &rank);
      const auto c = build_projection(cfg, l);
      EXPECT_EQ(c.rank(), rank);
      EXPECT_LT(oracle::max_abs_diff(oracle::from_eigen(c.matrix), expected), 1e-12);
    }
  }
}

TEST(BuildProjection, ProjectorLawsOverParameterGrid) {
  for (double phi0_deg : {0.0, 10.0, -20.0, 45.0, -63.0}) {
    for (int l : {2, 3, 10, 20, 33, 40}) {
      for (double hw : {0.0, 6.0, 15.0}) {
        LcsspConfig cfg = paper_config();
        cfg.presumed_soi = deg_to_rad(phi0_deg);
        cfg.soi_sector_halfwidth = deg_to_rad(hw);
        ProjectionMatrix c;
        try {
          c = build_projection(cfg, l);
        } catch (const InvalidArgument&) {
          continue;  // sector swallowed every zero
        }
        SCOPED_TRACE(testing::Message() << "phi0=" << phi0_deg << " L=" << l << " hw=" << hw);
        expect_projector_laws(c);
        EXPECT_EQ(c.rank() + static_cast<int>(c.excluded_angles.size()), l);
      }
    }
  }
}

TEST(BuildProjection, Errors) {
  EXPECT_THROW(build_projection(paper_config(), 1), InvalidArgument);
  LcsspConfig wide = paper_config();
  wide.soi_sector_halfwidth = deg_to_rad(90.0);
  EXPECT_THROW(build_projection(wide, 4), InvalidArgument);
}

TEST(NormalizedError, RegressionValues) {
  const auto cfg = paper_config();
  EXPECT_NEAR(normalized_error(build_projection(cfg, 10), kPaperInterferers), 0.1414213562373096, 1e-12);
  EXPECT_NEAR(normalized_error(build_projection(cfg, 11), kPaperInterferers), 1.0 / 11.0, 1e-12);
  EXPECT_LT(normalized_error(build_projection(cfg, 12), kPaperInterferers), 1e-12);
  EXPECT_LT(normalized_error(build_projection(cfg, 20), kPaperInterferers), 1e-12);
}

TEST(NormalizedError, MatchesDenseOracleSweep) {
  const auto cfg = paper_config();
  const std::vector<double> angles{deg_to_rad(-27.0), deg_to_rad(33.0), deg_to_rad(51.0)};
  for (int l = 10; l <= 40; ++l) {
    const double expected = oracle::normalized_error(0.0, cfg.soi_sector_halfwidth, l, angles);
    EXPECT_NEAR(normalized_error(build_projection(cfg, l), angles), expected, 1e-12) << "L=" << l;
  }
}

TEST(NormalizedError, ZeroForRetainedBasisAngle) {
  const auto c = build_projection(paper_config(), 16);
  EXPECT_LT(normalized_error(c, {c.retained_angles[3]}), 1e-10);
}

TEST(NormalizedError, BoundedByOne) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-89.0, 89.0);
  const auto c = build_projection(paper_config(), 14);
  for (int i = 0; i < 200; ++i) {
    const double e = normalized_error(c, {deg_to_rad(u(rng)), deg_to_rad(u(rng))});
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, 1.0 + 1e-12);
  }
}

TEST(NormalizedError, RejectsEmptyList) {
  EXPECT_THROW(normalized_error(build_projection(paper_config(), 10), {}), InvalidArgument);
}

TEST(NormalizedError, PerInterfererPassageWithinEpsilon) {
  const auto c = build_projection(paper_config(), 20);
  const double eps = normalized_error(c, kPaperInterferers);
  for (double t : kPaperInterferers) {
    const CVector a = steering_vector(t, 20).values();
    EXPECT_LE((c.matrix * a - a).norm(), eps + 1e-12);
  }
}

TEST(NormalizedError, LargerLReducesErrorFromInitial) {
  const auto cfg = paper_config();
  EXPECT_LT(normalized_error(build_projection(cfg, 20), kPaperInterferers),
            normalized_error(build_projection(cfg, 10), kPaperInterferers));
}

TEST(SelectDimension, DefaultDeltaPicksTwelve) {
  const auto choice = select_dimension(paper_config());
  EXPECT_EQ(choice.l, 12);
  EXPECT_LE(choice.epsilon_n, 0.05);
  EXPECT_EQ(choice.projection.dim, 12);
}

TEST(SelectDimension, MatchesOracleScan) {
  const std::vector<double> angles{deg_to_rad(-41.0), deg_to_rad(18.0)};
  for (double delta : {0.3, 0.1, 0.05, 0.02}) {
    LcsspConfig cfg = LcsspConfig::for_array(10, 0.0, angles);
    cfg.delta = delta;
    int expected = -1;
    for (int l = 10; l <= 80 && expected < 0; ++l)
      if (oracle::normalized_error(0.0, cfg.soi_sector_halfwidth, l, angles) <= delta) expected = l;
    if (expected < 0) {
      EXPECT_THROW(select_dimension(cfg), NoConvergence);
    } else {
      EXPECT_EQ(select_dimension(cfg).l, expected) << "delta=" << delta;
    }
  }
}

TEST(SelectDimension, LooseDeltaTerminatesEarly) {
  LcsspConfig cfg = paper_config();
  cfg.delta = 0.1;
  EXPECT_LE(select_dimension(cfg).l, 20);
  cfg.delta = 1.0;
  EXPECT_EQ(select_dimension(cfg).l, cfg.l_initial);
}

TEST(SelectDimension, AdjacentInterfererDoesNotConverge) {
  LcsspConfig cfg = LcsspConfig::for_array(10, 0.0, {deg_to_rad(7.0)});
  cfg.delta = 0.01;
  try {
    select_dimension(cfg);
    FAIL() << "expected NoConvergence";
  } catch (const NoConvergence& e) {
    EXPECT_NEAR(e.best_error(), 0.012576, 5e-6);
    EXPECT_GE(e.best_dimension(), 10);
    EXPECT_LE(e.best_dimension(), 80);
  }
}

TEST(SelectDimension, Deterministic) {
  const auto a = select_dimension(paper_config());
  const auto b = select_dimension(paper_config());
  EXPECT_EQ(a.l, b.l);
  EXPECT_EQ(a.projection.matrix, b.projection.matrix);
}

TEST(ChooseDimension, FixedDimensionBypassesSearch) {
  LcsspConfig cfg = paper_config();
  cfg.fixed_dimension = 20;
  const auto c = choose_dimension(cfg);
  EXPECT_EQ(c.l, 20);
  EXPECT_LT(c.epsilon_n, 1e-12);
  cfg.nominal_interferers.clear();
  EXPECT_TRUE(std::isnan(choose_dimension(cfg).epsilon_n));
}

TEST(LcsspConfigTest, Validation) {
  LcsspConfig cfg = paper_config();
  cfg.delta = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = paper_config();
  cfg.l_initial = 90;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = paper_config();
  cfg.fixed_dimension = 5;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = paper_config();
  cfg.nominal_interferers.clear();
  EXPECT_THROW(select_dimension(cfg), InvalidArgument);
}

TEST(ReconstructIpnc, NoiseOnlyGivesScaledProjectorBlock) {
  const auto c = build_projection(paper_config(), 20);
  const auto r = reconstruct_ipnc(c, {3.0 * CMatrix::Identity(20, 20), CovarianceKind::Theoretical}, 10);
  EXPECT_EQ(r.kind, CovarianceKind::Reconstructed);
  const CMatrix expected = 3.0 * c.matrix.topLeftCorner(10, 10);
  EXPECT_LT((r.matrix - expected).norm(), 1e-12);
  // C annihilates three orthonormal directions, each of squared norm 1/L per element.
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(r.matrix(i, i).real(), 3.0 * 17.0 / 20.0, 1e-12);
}

TEST(ReconstructIpnc, NoiseFreeSoiIsAnnihilated) {
  const CVector a = steering_vector(0.0, 20).values();
  const CovarianceEstimate cov{5.0 * a * a.adjoint(), CovarianceKind::Theoretical};
  const auto r = reconstruct_ipnc(build_projection(paper_config(), 20), cov, 10);
  EXPECT_LT(r.matrix.norm(), 1e-9);
}

TEST(ReconstructIpnc, TheoreticalPaperScenarioCloseToTrueIpnc) {
  const Scenario s = paper_scenario();
  const auto c = build_projection(paper_config(), 20);
  const auto r = reconstruct_ipnc(c, theoretical_covariance(s, 20), 10);
  const CMatrix diff = r.matrix - true_ipnc(s).matrix;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(diff, Eigen::EigenvaluesOnly);
  const double spectral = eig.eigenvalues().cwiseAbs().maxCoeff();
  EXPECT_NEAR(spectral, 0.952, 0.002);
  Eigen::SelfAdjointEigenSolver<CMatrix> ref(true_ipnc(s).matrix, Eigen::EigenvaluesOnly);
  EXPECT_LT(spectral / ref.eigenvalues().maxCoeff(), 1e-3);
}

TEST(ReconstructIpnc, MatchesDenseOracle) {
  const Scenario s = paper_scenario(0.0, 20.0);
  const auto rl = theoretical_covariance(s, 16);
  const auto c = build_projection(paper_config(), 16);
  const oracle::Mat cd = oracle::from_eigen(c.matrix);
  const oracle::Mat full = oracle::matmul(oracle::matmul(cd, oracle::from_eigen(rl.matrix)), oracle::adjoint(cd));
  oracle::Mat block = oracle::zeros(10, 10);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j) block[i][j] = full[i][j];
  EXPECT_LT(oracle::max_abs_diff(oracle::from_eigen(reconstruct_ipnc(c, rl, 10).matrix), block), 1e-10);
}

TEST(ReconstructIpnc, DimensionErrors) {
  const auto c = build_projection(paper_config(), 20);
  EXPECT_THROW(reconstruct_ipnc(c, {CMatrix::Identity(19, 19), CovarianceKind::Sample}, 10), InvalidArgument);
  EXPECT_THROW(reconstruct_ipnc(c, {CMatrix::Identity(20, 20), CovarianceKind::Sample}, 21), InvalidArgument);
}

TEST(LcsspWeights, IdentityAndScaledIdentity) {
  const auto a = steering_vector(deg_to_rad(4.0), 10);
  for (double scale : {1.0, 2.0}) {
    const auto w = lcssp_weights({scale * CMatrix::Identity(10, 10), CovarianceKind::Reconstructed}, a);
    EXPECT_LT((w.values - a.values()).norm(), 1e-12);
    EXPECT_EQ(w.method, Method::Lcssp);
  }
}

TEST(LcsspWeights, ScaleInvariant) {
  const auto r = reconstruct_ipnc(build_projection(paper_config(), 20), theoretical_covariance(paper_scenario(), 20), 10);
  const auto a = steering_vector(0.0, 10);
  const auto w1 = lcssp_weights(r, a);
  const auto w2 = lcssp_weights({7.5 * r.matrix, r.kind}, a);
  EXPECT_LT((w1.values - w2.values).norm(), 1e-10);
}

TEST(LcsspWeights, TheoreticalNullsMatchOracle) {
  const Scenario s = paper_scenario();
  const auto r = reconstruct_ipnc(build_projection(paper_config(), 20), theoretical_covariance(s, 20), 10);
  const auto a = steering_vector(0.0, 10);
  const auto w = lcssp_weights(r, a);
  EXPECT_NEAR(std::abs(w.response_to_presumed() - Complex(1.0, 0.0)), 0.0, 1e-10);

  const oracle::Vec wo = oracle::mvdr(oracle::from_eigen(r.matrix), oracle::steering(0.0, 10));
  EXPECT_LT(oracle::max_abs_diff(oracle::from_eigen(w.values), wo), 1e-10);
  const double main = std::norm(oracle::inner(wo, oracle::steering(0.0, 10)));
  for (double deg : {-30.0, 30.0}) {
    const double g = std::norm(oracle::inner(wo, oracle::steering(oracle::rad(deg), 10)));
    EXPECT_LE(10.0 * std::log10(g / main), -50.0) << deg;
  }
}

TEST(LcsspWeights, RejectsDimensionMismatch) {
  EXPECT_THROW(lcssp_weights({CMatrix::Identity(9, 9), CovarianceKind::Reconstructed}, steering_vector(0.0, 10)),
               InvalidArgument);
}

TEST(RunLcssp, InfiniteSampleFidelity) {
  const Scenario s = paper_scenario();
  LcsspConfig cfg = paper_config();
  cfg.fixed_dimension = 20;
  const auto choice = choose_dimension(cfg);
  const auto r = lcssp_from_covariance(choice, theoretical_covariance(s, 20), cfg);
  EXPECT_LE(optimal_sinr(s) - output_sinr(r.weights, s.soi_power, true_soi_vector(s), true_ipnc(s)), 0.5);
}

TEST(RunLcssp, PaperDefaultEndToEnd) {
  const Scenario s = paper_scenario();
  LcsspConfig cfg = paper_config();
  cfg.fixed_dimension = 20;
  int calls = 0;
  auto source = [&](int l, int k, std::uint64_t seed) {
    ++calls;
    return generate_snapshots(s, l, k, seed);
  };
  const auto r = run_lcssp(source, cfg, 50, 1);
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(r.l_chosen, 20);
  EXPECT_EQ(r.ipnc.dim(), 10);
  EXPECT_NEAR(std::abs(r.weights.response_to_presumed() - Complex(1.0, 0.0)), 0.0, 1e-10);
  const auto curve = beampattern(r.weights, beampattern_grid());
  EXPECT_LE(curve.gain_at(deg_to_rad(-30.0)), -40.0);
  EXPECT_LE(curve.gain_at(deg_to_rad(30.0)), -40.0);

  const auto again = run_lcssp(source, cfg, 50, 1);
  EXPECT_EQ(again.weights.values, r.weights.values);
}

TEST(RunLcssp, SearchModeUsesSelectedDimension) {
  const Scenario s = paper_scenario();
  int seen = 0;
  auto source = [&](int l, int k, std::uint64_t seed) {
    seen = l;
    return generate_snapshots(s, l, k, seed);
  };
  const auto r = run_lcssp(source, paper_config(), 50, 2);
  EXPECT_EQ(seen, 12);
  EXPECT_EQ(r.l_chosen, 12);
  EXPECT_LE(r.epsilon_n, 0.05);
}

TEST(RunLcssp, NoiseOnlyApproachesPresumedVector) {
  Scenario s;
  s.soi_power = 0.0;
  s.geometry = ArrayGeometry::nominal(10);
  LcsspConfig cfg = paper_config();
  cfg.fixed_dimension = 20;
  const auto r = run_lcssp([&](int l, int k, std::uint64_t seed) { return generate_snapshots(s, l, k, seed); },
                           cfg, 20000, 5);
  const auto block = reconstruct_ipnc(choose_dimension(cfg).projection,
                                      {CMatrix::Identity(20, 20), CovarianceKind::Theoretical}, 10);
  const auto expected = lcssp_weights(block, steering_vector(0.0, 10));
  EXPECT_LT((r.weights.values - expected.values).norm() / expected.values.norm(), 0.05);
}

TEST(RunLcssp, SingleSnapshotRuns) {
  const Scenario s = paper_scenario();
  LcsspConfig cfg = paper_config();
  cfg.fixed_dimension = 20;
  const auto r = run_lcssp([&](int l, int k, std::uint64_t seed) { return generate_snapshots(s, l, k, seed); },
                           cfg, 1, 3);
  EXPECT_TRUE(r.weights.values.allFinite());
  EXPECT_NEAR(std::abs(r.weights.response_to_presumed() - Complex(1.0, 0.0)), 0.0, 1e-8);
}

TEST(RunLcssp, WrongSourceDimensionRejected) {
  LcsspConfig cfg = paper_config();
  cfg.fixed_dimension = 20;
  EXPECT_THROW(run_lcssp([](int, int k, std::uint64_t) { return CMatrix::Identity(19, k).eval(); }, cfg, 5, 1),
               InvalidArgument);
}

// Property: every produced weight vector is distortionless toward the presumed SOI.
TEST(LcsspProperties, DistortionlessOverRandomScenarios) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> off(-6.0, 6.0), err(-0.05, 0.05);
  for (int trial = 0; trial < 25; ++trial) {
    Scenario s = paper_scenario(10.0, 20.0);
    s.soi_direction_true = deg_to_rad(off(rng));
    for (auto& t : s.interferer_directions_true) t += deg_to_rad(off(rng));
    for (double& e : s.geometry.position_errors) e = err(rng);
    LcsspConfig cfg = paper_config();
    cfg.fixed_dimension = 20;
    const auto r = run_lcssp([&](int l, int k, std::uint64_t seed) { return generate_snapshots(s, l, k, seed); },
                             cfg, 50, static_cast<std::uint64_t>(trial));
    EXPECT_NEAR(std::abs(r.weights.response_to_presumed() - Complex(1.0, 0.0)), 0.0, 1e-10);
  }
}

TEST(EstimateInterferers, FindsCaponPeaks) {
  const Scenario s = paper_scenario(10.0, 30.0);
  const auto scm = sample_covariance(generate_snapshots(s, 10, 500, 6));
  const auto est = estimate_interferer_directions(scm, 0.0, deg_to_rad(6.0), 2);
  ASSERT_EQ(est.size(), 2u);
  EXPECT_NEAR(rad_to_deg(est[0]), -30.0, 0.5);
  EXPECT_NEAR(rad_to_deg(est[1]), 30.0, 0.5);
}
