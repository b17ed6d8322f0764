#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "qfb/ensemble.hpp"

using namespace qfb;

namespace {

PureState plus_state() {
  ComplexVector v(2);
  v << 1.0, 1.0;
  return PureState::normalized(v);
}

HermitianObservable precession() { return HermitianObservable(pauli_z().matrix() * M_PI); }

EnsembleConfig control_config(int realizations, double dt, double t_end) {
  return EnsembleConfig{
      .realizations = realizations,
      .master_seed = 2024,
      .sme = SmeConfig{DensityMatrix::pure(plus_state()), ObservableFn{}, 2.0, precession(), 0.4,
                       dt, t_end},
      .policy = MeasurementPolicy::relative_angle(M_PI / 2),
      .mu = FeedbackStrength(10.0),
      .target = precessing_target(plus_state(), precession()),
      .stat_stride = 10,
  };
}

bool same_bytes(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_estimate(const Estimate& a, const Estimate& b) {
  if (!same_bytes(a.mean, b.mean)) return false;
  if (a.se.has_value() != b.se.has_value()) return false;
  return !a.se || same_bytes(*a.se, *b.se);
}

}  // namespace

TEST(EnsembleTest, SingleRealizationHasNoErrors) {
  const EnsembleConfig cfg = control_config(1, 1e-3, 0.1);
  const EnsembleStats s = run_ensemble(cfg);
  EXPECT_EQ(s.realizations, 1);
  ASSERT_EQ(s.times.size(), 11u);
  EXPECT_FALSE(s.time_avg_purity.se.has_value());
  EXPECT_FALSE(s.purity.back().se.has_value());
  EXPECT_TRUE(s.rho_se.empty());

  // The stats are that trajectory's own series.
  RngStream stream(derive_stream_key(cfg.master_seed, 0, 0));
  const TrajectoryResult tr =
      run_control_trajectory(cfg.sme, cfg.policy, cfg.target, cfg.mu, stream, cfg.stat_stride);
  ASSERT_EQ(tr.purities.size(), s.purity.size());
  double avg = 0.0;
  for (std::size_t i = 0; i < tr.purities.size(); ++i) {
    EXPECT_EQ(s.purity[i].mean, tr.purities[i]);
    EXPECT_EQ(s.overlap[i].mean, tr.overlaps[i]);
    avg += tr.purities[i];
  }
  EXPECT_NEAR(s.time_avg_purity.mean, avg / tr.purities.size(), 1e-15);
}

TEST(EnsembleTest, NoiselessPerfectStart) {
  EnsembleConfig cfg = control_config(5, 1e-4, 0.5);
  cfg.sme.k = 0.0;
  cfg.sme.dephasing_beta = 0.0;
  cfg.mu = FeedbackStrength(0.0);
  cfg.policy = MeasurementPolicy::fixed();
  const EnsembleStats s = run_ensemble(cfg);
  EXPECT_NEAR(s.time_avg_overlap.mean, 1.0, 1e-3);
  ASSERT_TRUE(s.time_avg_overlap.se.has_value());
  EXPECT_EQ(*s.time_avg_overlap.se, 0.0);
}

TEST(EnsembleTest, ThreadCountDoesNotChangeBits) {
  EnsembleConfig cfg = control_config(70, 2.5e-4, 0.2);
  cfg.threads = 1;
  const EnsembleStats a = run_ensemble(cfg);
  cfg.threads = 4;
  const EnsembleStats b = run_ensemble(cfg);
  ASSERT_EQ(a.purity.size(), b.purity.size());
  for (std::size_t i = 0; i < a.purity.size(); ++i) {
    ASSERT_TRUE(same_estimate(a.purity[i], b.purity[i]));
    ASSERT_TRUE(same_estimate(a.overlap[i], b.overlap[i]));
    ASSERT_EQ(a.rho_mean[i], b.rho_mean[i]);
    ASSERT_EQ(a.rho_se[i], b.rho_se[i]);
  }
  EXPECT_TRUE(same_estimate(a.time_avg_purity, b.time_avg_purity));
  EXPECT_TRUE(same_estimate(a.time_avg_overlap, b.time_avg_overlap));
}

TEST(EnsembleTest, MeasuredDephasedMeanMatchesAnalyticSolution) {
  // Fixed sigma_z measurement, no feedback: E[rho_01](t) =
  // rho_01(0) exp(-2 i omega t) exp(-4 (beta + k) t).
  const double k = 1.0;
  const double beta = 0.4;
  EnsembleConfig cfg = control_config(400, 2.5e-4, 0.5);
  cfg.sme.k = k;
  cfg.sme.observable = constant_observable(pauli_z());
  cfg.policy = MeasurementPolicy::fixed();
  cfg.mu = FeedbackStrength(0.0);
  cfg.stat_stride = 400;
  const EnsembleStats s = run_ensemble(cfg);
  ASSERT_EQ(s.times.size(), 6u);
  for (std::size_t g = 1; g < s.times.size(); ++g) {
    const double t = s.times[g];
    const Complex expected = 0.5 * std::polar(std::exp(-4 * (beta + k) * t), -2 * M_PI * t);
    const Complex mean = s.rho_mean[g](0, 1);
    const Complex se = s.rho_se[g](0, 1);
    EXPECT_NEAR(mean.real(), expected.real(), 3 * se.real() + 1e-3) << "t = " << t;
    EXPECT_NEAR(mean.imag(), expected.imag(), 3 * se.imag() + 1e-3) << "t = " << t;
    EXPECT_NEAR(s.rho_mean[g](0, 0).real(), 0.5, 3 * s.rho_se[g](0, 0).real() + 1e-3);
  }
}

TEST(EnsembleTest, StandardErrorScalesWithRootR) {
  EnsembleConfig small = control_config(250, 2.5e-4, 0.2);
  EnsembleConfig large = control_config(1000, 2.5e-4, 0.2);
  large.master_seed = 99;
  const EnsembleStats a = run_ensemble(small);
  const EnsembleStats b = run_ensemble(large);
  EXPECT_NEAR(*a.time_avg_purity.se / *b.time_avg_purity.se, 2.0, 0.4);
  EXPECT_NEAR(*a.time_avg_overlap.se / *b.time_avg_overlap.se, 2.0, 0.4);
}

TEST(EnsembleTest, FailureNamesTrajectoryAndStream) {
  EnsembleConfig cfg = control_config(3, 0.02, 1.0);
  cfg.sme.k = 50.0;
  try {
    run_ensemble(cfg);
    FAIL() << "expected a step rejection";
  } catch (const NumericalFailure& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("master seed 2024"), std::string::npos) << msg;
    EXPECT_NE(msg.find("stream key"), std::string::npos) << msg;
  }
}

TEST(EnsembleTest, Validation) {
  EnsembleConfig cfg = control_config(0, 1e-3, 0.1);
  EXPECT_THROW(run_ensemble(cfg), std::invalid_argument);
  cfg.realizations = 2;
  cfg.stat_stride = 0;
  EXPECT_THROW(run_ensemble(cfg), std::invalid_argument);
  cfg.stat_stride = 1;
  cfg.target = nullptr;
  EXPECT_THROW(run_ensemble(cfg), std::invalid_argument);
  EnsembleConfig late = control_config(2, 1e-3, 0.1);
  late.transient_cutoff = 0.5;
  EXPECT_THROW(run_ensemble(late), std::invalid_argument);
  const std::vector<double> bad{0.0, 4.0};
  EXPECT_THROW(theta_experiment(control_config(2, 1e-3, 0.1), bad), std::invalid_argument);
  EXPECT_THROW(theta_experiment(control_config(2, 1e-3, 0.1), std::vector<double>{}),
               std::invalid_argument);
}

TEST(EnsembleTest, TransientCutoffRestrictsAverage) {
  EnsembleConfig cfg = control_config(1, 1e-3, 0.2);
  cfg.transient_cutoff = 0.1;
  const EnsembleStats s = run_ensemble(cfg);
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    if (s.times[i] >= 0.1 - 1e-12) {
      sum += s.purity[i].mean;
      ++count;
    }
  }
  EXPECT_EQ(count, 11);
  EXPECT_NEAR(s.time_avg_purity.mean, sum / count, 1e-15);
}

TEST(ThetaExperimentTest, RowsAndSupplementaryAngleSymmetry) {
  const EnsembleConfig base = control_config(300, 2.5e-4, 0.5);
  const std::vector<double> thetas{M_PI / 4, 3 * M_PI / 4};
  const std::vector<ThetaRow> rows = theta_experiment(base, thetas);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].theta, M_PI / 4);
  const double sp = std::hypot(*rows[0].purity.se, *rows[1].purity.se);
  const double so = std::hypot(*rows[0].overlap.se, *rows[1].overlap.se);
  EXPECT_NEAR(rows[0].purity.mean, rows[1].purity.mean, 3 * sp);
  EXPECT_NEAR(rows[0].overlap.mean, rows[1].overlap.mean, 3 * so);
}

TEST(ThetaExperimentTest, EachAngleUsesItsOwnStreamTag) {
  EnsembleConfig base = control_config(4, 1e-3, 0.1);
  const std::vector<double> thetas{M_PI / 2, M_PI / 2};
  const std::vector<ThetaRow> rows = theta_experiment(base, thetas);
  EXPECT_NE(rows[0].purity.mean, rows[1].purity.mean);
  base.policy = MeasurementPolicy::relative_angle(M_PI / 2);
  base.stream_tag = 1;
  EXPECT_EQ(run_ensemble(base).time_avg_purity.mean, rows[1].purity.mean);
}
