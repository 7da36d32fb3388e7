#include "specboot/lw.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "specboot/errors.hpp"
#include "specboot/rng.hpp"

namespace specboot {
namespace {

DataMatrix from_matrix(Eigen::MatrixXd values) {
  DataMatrix d;
  d.values = std::move(values);
  return d;
}

TEST(LedoitWolfStatTest, IdentityCovarianceGivesZero) {
  Eigen::MatrixXd Y(2, 2);
  Y << std::sqrt(2.0), 0.0, 0.0, std::sqrt(2.0);
  EXPECT_NEAR(ledoit_wolf_stat(from_matrix(Y)), 0.0, 1e-12);
}

TEST(LedoitWolfStatTest, ScaledIdentity) {
  // S = 2 I_3 -> tr((S - I)^2) = 3.
  Eigen::MatrixXd Y = std::sqrt(6.0) * Eigen::MatrixXd::Identity(3, 3);
  EXPECT_NEAR(ledoit_wolf_stat(from_matrix(Y)), 3.0, 1e-12);
}

TEST(LedoitWolfStatTest, MatchesDenseOracle) {
  StreamRng rng(derive_stream(41, StreamTag::kGeneric, 0));
  Eigen::MatrixXd Y(5, 4);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j) Y(i, j) = rng.next_normal();
  Eigen::MatrixXd S = oracles::covariance_outer_products(Y);
  Eigen::MatrixXd D = S - Eigen::MatrixXd::Identity(4, 4);
  double expected = (D * D).trace();
  EXPECT_NEAR(ledoit_wolf_stat(from_matrix(Y)), expected, 1e-10);
}

TEST(LedoitWolfStatTest, GramAndDenseRoutesAgree) {
  StreamRng rng(derive_stream(43, StreamTag::kGeneric, 0));
  for (double ratio : {0.25, 0.5, 2.0}) {
    for (int trial = 0; trial < 17; ++trial) {
      int n = 20 + static_cast<int>(rng.next_below(30));
      int p = std::max(2, static_cast<int>(std::lround(ratio * n)));
      Eigen::MatrixXd Y(n, p);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) Y(i, j) = rng.next_normal();
      DataMatrix d = from_matrix(Y);
      double fast = ledoit_wolf_stat(d);
      // Dense oracle regardless of shape.
      Eigen::MatrixXd S = oracles::covariance_outer_products(Y);
      double trace_s = S.trace();
      double trace_s2 = S.squaredNorm();
      double expected = trace_s2 - 2.0 * trace_s + p;
      EXPECT_NEAR(fast, expected, 1e-8 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST(LedoitWolfStatTest, ScaleEquivariance) {
  StreamRng rng(derive_stream(47, StreamTag::kGeneric, 0));
  Eigen::MatrixXd Y(6, 9);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 9; ++j) Y(i, j) = rng.next_normal();
  const double c = 1.7;
  // tr(S) scales by c^2 and tr(S^2) by c^4; check through the statistic.
  Eigen::MatrixXd S = oracles::covariance_outer_products(Y);
  double t_scaled = ledoit_wolf_stat(from_matrix(c * Y));
  double expected = c * c * c * c * S.squaredNorm() - 2.0 * c * c * S.trace() + 9.0;
  EXPECT_NEAR(t_scaled, expected, 1e-8 * std::abs(expected));
}

TEST(LedoitWolfStatTest, ZeroMatrixGivesP) {
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(4, 7);
  EXPECT_DOUBLE_EQ(ledoit_wolf_stat(from_matrix(Y)), 7.0);
}

TEST(BootstrapQuantileTest, RankConvention) {
  std::vector<double> century(100);
  for (int i = 0; i < 100; ++i) century[static_cast<std::size_t>(i)] = i + 1;
  EXPECT_DOUBLE_EQ(bootstrap_quantile(century, 0.05), 95.0);

  EXPECT_DOUBLE_EQ(bootstrap_quantile({7.0}, 0.3), 7.0);
  EXPECT_DOUBLE_EQ(bootstrap_quantile({10.0, 20.0, 30.0, 40.0}, 0.5), 20.0);
}

TEST(BootstrapQuantileTest, MonotoneInAlphaAndElementOfSample) {
  StreamRng rng(derive_stream(53, StreamTag::kGeneric, 0));
  std::vector<double> samples;
  for (int i = 0; i < 37; ++i) samples.push_back(rng.next_normal());
  double previous = bootstrap_quantile(samples, 0.99);
  for (double alpha : {0.9, 0.5, 0.25, 0.1, 0.01}) {
    double q = bootstrap_quantile(samples, alpha);
    EXPECT_GE(q, previous);
    EXPECT_NE(std::find(samples.begin(), samples.end(), q), samples.end());
    previous = q;
  }
  EXPECT_THROW(bootstrap_quantile(samples, 0.0), DomainError);
  EXPECT_THROW(bootstrap_quantile(samples, 1.0), DomainError);
  EXPECT_THROW(bootstrap_quantile({}, 0.5), DomainError);
}

TEST(IdentityTestTest, DegenerateZeroDataIsWellDefined) {
  DataMatrix d = from_matrix(Eigen::MatrixXd::Zero(20, 10));
  IdentityTestOptions options;
  options.B = 50;
  TestResult result = identity_test(d, MRule::fixed(5), options, 9);
  EXPECT_DOUBLE_EQ(result.statistic, 10.0);
  EXPECT_DOUBLE_EQ(result.centering, 100.0 / 20.0);
  EXPECT_EQ(result.chosen_m, 5);
  EXPECT_EQ(result.chosen_q, 2);
  EXPECT_EQ(result.samples.size(), 50u);
  // All bootstrap eigenvalues are zero: T* = q f(0) = q, so every sample is
  // q - (m/n) T_n = 2 - 2.5, and the decision compares 10 - 5 > -0.5: reject.
  for (double s : result.samples) EXPECT_DOUBLE_EQ(s, -0.5);
  EXPECT_TRUE(result.reject);
}

TEST(IdentityTestTest, DecisionInvariantUnderSampleOrder) {
  auto spec = CovarianceSpec::identity(30);
  DataMatrix d = generate_sample(spec, InnovationDist::kStandardNormal, 120, 15);
  IdentityTestOptions options;
  options.B = 80;
  TestResult result = identity_test(d, MRule::fixed(24), options, 10);

  std::vector<double> shuffled = result.samples;
  std::reverse(shuffled.begin(), shuffled.end());
  double q = bootstrap_quantile(shuffled, options.alpha);
  EXPECT_DOUBLE_EQ(q, result.quantile);
  EXPECT_EQ(result.statistic - result.centering > q, result.reject);
}

TEST(IdentityTestTest, AdaptiveRuleUsesLadderCandidate) {
  auto spec = CovarianceSpec::identity(40);
  DataMatrix d = generate_sample(spec, InnovationDist::kStandardNormal, 300, 25);
  MLadderParams params;
  params.psi = 0.6;
  params.K = 4;
  params.j_start = 1;
  IdentityTestOptions options;
  options.B = 40;
  TestResult bs = identity_test(d, MRule::bickel_sakov(params), options, 33);

  MLadder ladder = build_m_ladder(d, ledoit_wolf_stat(d), SpectralFunction::ledoit_wolf(),
                                  params, options.B, options.strategy, options.resample, 33, 1);
  MChoice choice = choose_m_bickel_sakov(ladder);
  EXPECT_EQ(bs.chosen_m, choice.m);
  EXPECT_EQ(bs.samples, ladder.entries[static_cast<std::size_t>(choice.index)].samples);
}

TEST(IdentityTestTest, BiasCorrectionFlagShiftsSamples) {
  auto spec = CovarianceSpec::identity(24);
  DataMatrix d = generate_sample(spec, InnovationDist::kStandardNormal, 120, 77);
  IdentityTestOptions plain;
  plain.B = 30;
  IdentityTestOptions corrected = plain;
  corrected.use_bias_correction = true;

  TestResult base = identity_test(d, MRule::fixed(20), plain, 3);
  TestResult shifted = identity_test(d, MRule::fixed(20), corrected, 3);
  EXPECT_DOUBLE_EQ(base.bias_correction, 0.0);
  EXPECT_NE(shifted.bias_correction, 0.0);
  for (std::size_t i = 0; i < base.samples.size(); ++i) {
    EXPECT_NEAR(shifted.samples[i], base.samples[i] - shifted.bias_correction, 1e-12);
  }
}

TEST(RejectionProbabilityTest, SingleSimulationIsZeroOrOne) {
  MonteCarloConfig config;
  config.spec = CovarianceSpec::identity(20);
  config.n = 80;
  config.m_rule = MRule::fixed(16);
  config.test.B = 40;
  config.n_sim = 1;
  config.seed = 5;
  auto estimate = rejection_probability_mc(config);
  EXPECT_TRUE(estimate.rate == 0.0 || estimate.rate == 1.0);
  EXPECT_DOUBLE_EQ(estimate.se, 0.0);
  EXPECT_EQ(estimate.decisions.size(), 1u);
}

TEST(RejectionProbabilityTest, DeterministicAcrossWorkerCounts) {
  MonteCarloConfig config;
  config.spec = CovarianceSpec::identity(16);
  config.n = 64;
  config.m_rule = MRule::fixed(12);
  config.test.B = 30;
  config.n_sim = 20;
  config.seed = 12;
  config.workers = 1;
  auto serial = rejection_probability_mc(config);
  config.workers = 4;
  auto parallel = rejection_probability_mc(config);
  EXPECT_EQ(serial.decisions, parallel.decisions);
  EXPECT_DOUBLE_EQ(serial.rate, parallel.rate);
}

}  // namespace
}  // namespace specboot
