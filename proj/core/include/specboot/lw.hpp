#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "specboot/adaptive.hpp"
#include "specboot/bootstrap.hpp"
#include "specboot/datagen.hpp"

namespace specboot {

/// Ledoit-Wolf statistic T_n = tr((S - I)^2) = tr S^2 - 2 tr S + p for the
/// sample covariance S. When p > n the traces are computed through the n x n
/// Gram matrix, never allocating a p x p matrix.
double ledoit_wolf_stat(const DataMatrix& Y);

/// Order statistic of rank ceil((1-alpha) B) of the sorted samples.
double bootstrap_quantile(std::vector<double> samples, double alpha);

enum class MRuleKind { kFixed, kBickelSakov, kDetteKroll };

/// Subsample-size rule: a fixed m, or an adaptive ladder selection.
struct MRule {
  MRuleKind kind = MRuleKind::kFixed;
  int fixed_m = 0;
  MLadderParams ladder;

  static MRule fixed(int m) {
    MRule r;
    r.fixed_m = m;
    return r;
  }
  static MRule bickel_sakov(MLadderParams params = {}) {
    MRule r;
    r.kind = MRuleKind::kBickelSakov;
    r.ladder = params;
    return r;
  }
  static MRule dette_kroll(MLadderParams params = {}) {
    MRule r;
    r.kind = MRuleKind::kDetteKroll;
    r.ladder = params;
    return r;
  }
};

struct PhaseTimings {
  double statistic_s = 0.0;  // T_n computation
  double bootstrap_s = 0.0;  // replicates (ladder included for adaptive rules)
  double total_s = 0.0;
};

struct TestResult {
  double statistic = 0.0;   // T_n
  double centering = 0.0;   // p^2 / n
  std::vector<double> samples;  // T*_{m,n} - (m/n) T_n per replicate
  double quantile = 0.0;    // q*_{1-alpha}
  int chosen_m = 0;
  int chosen_q = 0;
  double alpha = 0.0;
  bool reject = false;
  double bias_correction = 0.0;  // subtracted from every sample when enabled
  PhaseTimings timings;
};

struct IdentityTestOptions {
  int B = 500;
  double alpha = 0.05;
  ProjectionStrategy strategy = ProjectionStrategy::uniform();
  ProjectionResample resample = ProjectionResample::kPerReplicate;
  bool use_bias_correction = false;  // refined centering via the d_n term
  int workers = 1;
};

/// Bootstrap test of H0: Sigma = I. Rejects iff T_n - p^2/n > q*_{1-alpha},
/// where q* is the bootstrap quantile of T*_{m,n} - (m/n) T_n. An adaptive
/// rule reuses the selected candidate's cached samples; pass ladder_out to
/// keep the ladder for diagnostics.
TestResult identity_test(const DataMatrix& Y, const MRule& m_rule,
                         const IdentityTestOptions& options, std::uint64_t seed,
                         MLadder* ladder_out = nullptr);

struct MonteCarloConfig {
  CovarianceSpec spec;
  InnovationDist dist = InnovationDist::kStandardNormal;
  int n = 0;
  MRule m_rule;
  IdentityTestOptions test;
  int n_sim = 1;
  std::uint64_t seed = 0;
  int workers = 1;  // outer simulation loop; each simulation runs serially
};

struct RejectionEstimate {
  double rate = 0.0;
  double se = 0.0;
  double mean_runtime_s = 0.0;
  int n_sim = 0;
  std::vector<bool> decisions;  // per-simulation outcomes, index = sim - 1
};

/// Fraction of rejections over n_sim independently generated data sets.
/// Simulation s derives everything from the stream (seed, kSimulation, s),
/// so the estimate is identical for any worker count.
RejectionEstimate rejection_probability_mc(const MonteCarloConfig& config);

}  // namespace specboot
