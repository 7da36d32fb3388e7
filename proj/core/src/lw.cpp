#include "specboot/lw.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "specboot/errors.hpp"
#include "specboot/mp.hpp"
#include "specboot/parallel.hpp"

namespace specboot {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
  return d.count();
}

}  // namespace

double ledoit_wolf_stat(const DataMatrix& Y) {
  Y.validate();
  const auto n = static_cast<double>(Y.n());
  const auto p = static_cast<double>(Y.p());
  double trace_s, trace_s2;
  if (Y.p() > Y.n()) {
    // Gram route: tr S = (1/n) sum_i |Y_i|^2, tr S^2 = (1/n^2) sum_ij (Y_i.Y_j)^2.
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(Y.n(), Y.n());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(Y.values, 1.0);
    gram.triangularView<Eigen::StrictlyUpper>() =
        gram.triangularView<Eigen::StrictlyLower>().transpose();
    trace_s = gram.trace() / n;
    trace_s2 = gram.squaredNorm() / (n * n);
  } else {
    Eigen::MatrixXd cov = sample_covariance(Y);
    trace_s = cov.trace();
    trace_s2 = cov.squaredNorm();
  }
  return trace_s2 - 2.0 * trace_s + p;
}

double bootstrap_quantile(std::vector<double> samples, double alpha) {
  if (samples.empty()) throw DomainError("bootstrap_quantile: empty sample");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("bootstrap_quantile: alpha must be in (0,1)");
  std::sort(samples.begin(), samples.end());
  auto count = static_cast<double>(samples.size());
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * count));
  rank = std::clamp<std::size_t>(rank, 1, samples.size());
  return samples[rank - 1];
}

TestResult identity_test(const DataMatrix& Y, const MRule& m_rule,
                         const IdentityTestOptions& options, std::uint64_t seed,
                         MLadder* ladder_out) {
  Y.validate();
  if (options.B < 1) throw DomainError("identity_test: B must be >= 1");
  auto total_start = std::chrono::steady_clock::now();

  TestResult result;
  result.alpha = options.alpha;
  result.centering =
      static_cast<double>(Y.p()) * static_cast<double>(Y.p()) / static_cast<double>(Y.n());

  auto stat_start = std::chrono::steady_clock::now();
  result.statistic = ledoit_wolf_stat(Y);
  result.timings.statistic_s = seconds_since(stat_start);

  const SpectralFunction f = SpectralFunction::ledoit_wolf();
  auto boot_start = std::chrono::steady_clock::now();
  switch (m_rule.kind) {
    case MRuleKind::kFixed: {
      if (m_rule.fixed_m < 2) throw DomainError("identity_test: fixed m must be >= 2");
      BootstrapRun run = run_bootstrap(Y, m_rule.fixed_m, options.B, options.strategy,
                                       options.resample, {f}, seed, options.workers);
      result.chosen_m = run.m;
      result.chosen_q = run.q;
      double scale = static_cast<double>(run.m) / static_cast<double>(Y.n());
      result.samples.reserve(run.replicates.size());
      for (const auto& rec : run.replicates)
        result.samples.push_back(rec.lss_values[0] - scale * result.statistic);
      break;
    }
    case MRuleKind::kBickelSakov:
    case MRuleKind::kDetteKroll: {
      MLadder ladder = build_m_ladder(Y, result.statistic, f, m_rule.ladder, options.B,
                                      options.strategy, options.resample, seed, options.workers);
      MChoice choice = m_rule.kind == MRuleKind::kBickelSakov ? choose_m_bickel_sakov(ladder)
                                                              : choose_m_dette_kroll(ladder);
      const auto& entry = ladder.entries[static_cast<std::size_t>(choice.index)];
      result.chosen_m = entry.m;
      result.chosen_q = entry.q;
      result.samples = entry.samples;
      if (ladder_out != nullptr) *ladder_out = std::move(ladder);
      break;
    }
  }

  if (options.use_bias_correction) {
    DiscreteMeasure esd = empirical_spectral_measure(eigenvalues_sym(sample_covariance(Y)));
    double gamma = static_cast<double>(Y.p()) / static_cast<double>(Y.n());
    result.bias_correction = bias_correction_dn(esd, gamma, f, ContourSpec::around_mp(esd, gamma));
    for (double& s : result.samples) s -= result.bias_correction;
  }
  result.timings.bootstrap_s = seconds_since(boot_start);

  result.quantile = bootstrap_quantile(result.samples, options.alpha);
  result.reject = result.statistic - result.centering > result.quantile;
  result.timings.total_s = seconds_since(total_start);
  return result;
}

RejectionEstimate rejection_probability_mc(const MonteCarloConfig& config) {
  if (config.n_sim < 1) throw DomainError("rejection_probability_mc: n_sim must be >= 1");
  if (config.n < 1) throw DomainError("rejection_probability_mc: n must be >= 1");

  RejectionEstimate estimate;
  estimate.n_sim = config.n_sim;
  // Plain byte storage: vector<bool> packs bits and is not safe for
  // concurrent writes to distinct indices.
  std::vector<std::uint8_t> decisions(static_cast<std::size_t>(config.n_sim), 0);
  std::vector<double> runtimes(static_cast<std::size_t>(config.n_sim), 0.0);

  IdentityTestOptions per_sim = config.test;
  per_sim.workers = 1;  // the outer loop owns the worker budget

  parallel_for(config.n_sim, config.workers, [&](std::int64_t s0) {
    auto start = std::chrono::steady_clock::now();
    std::uint64_t sim_seed =
        derive_stream(config.seed, StreamTag::kSimulation, static_cast<std::uint64_t>(s0) + 1);
    DataMatrix data = generate_sample(config.spec, config.dist, config.n, sim_seed);
    TestResult r = identity_test(data, config.m_rule, per_sim, sim_seed);
    decisions[static_cast<std::size_t>(s0)] = r.reject ? 1 : 0;
    runtimes[static_cast<std::size_t>(s0)] = seconds_since(start);
  });

  estimate.decisions.reserve(decisions.size());
  int rejections = 0;
  double total_runtime = 0.0;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    estimate.decisions.push_back(decisions[i] != 0);
    rejections += decisions[i] != 0 ? 1 : 0;
    total_runtime += runtimes[i];
  }
  auto n_sim = static_cast<double>(config.n_sim);
  estimate.rate = rejections / n_sim;
  estimate.se = std::sqrt(estimate.rate * (1.0 - estimate.rate) / n_sim);
  estimate.mean_runtime_s = total_runtime / n_sim;
  return estimate;
}

}  // namespace specboot
