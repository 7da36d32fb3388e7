#include "specboot/bootstrap.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_set>

#include "specboot/errors.hpp"
#include "specboot/parallel.hpp"

namespace specboot {

namespace {

/// Replicate with the sampling preconditions relaxed to m >= 1 (the classical
/// run on a single observation is legal).
ReplicateRecord replicate_impl(const DataMatrix& Y, int m, const std::vector<int>& coords,
                               StreamRng& row_rng, const std::vector<SpectralFunction>& f_list) {
  const int n = Y.n();
  const int q = static_cast<int>(coords.size());
  Eigen::MatrixXd Z(m, q);
  for (int i = 0; i < m; ++i) {
    auto idx = static_cast<Eigen::Index>(row_rng.next_below(static_cast<std::uint64_t>(n)));
    for (int j = 0; j < q; ++j) Z(i, j) = Y.values(idx, coords[static_cast<std::size_t>(j)]);
  }
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(q, q);
  cov.selfadjointView<Eigen::Lower>().rankUpdate(Z.transpose(), 1.0 / static_cast<double>(m));
  cov.triangularView<Eigen::StrictlyUpper>() =
      cov.triangularView<Eigen::StrictlyLower>().transpose();

  ReplicateRecord rec;
  rec.eigenvalues = eigenvalues_sym(cov);
  rec.lss_values.reserve(f_list.size());
  for (const auto& f : f_list) rec.lss_values.push_back(lss(rec.eigenvalues, f));
  return rec;
}

BootstrapRun run_impl(const DataMatrix& Y, int m, int q, int B,
                      const ProjectionStrategy& strategy, ProjectionResample resample,
                      const std::vector<SpectralFunction>& f_list, std::uint64_t seed,
                      int workers) {
  Y.validate();
  if (B < 1) throw DomainError("run_bootstrap: B must be >= 1");

  BootstrapRun run;
  run.n = Y.n();
  run.p = Y.p();
  run.m = m;
  run.q = q;
  run.B = B;
  run.strategy = strategy;
  run.resample = resample;
  run.seed = seed;
  run.f_list = f_list;
  run.replicates.resize(static_cast<std::size_t>(B));
  run.replicate_seconds.resize(static_cast<std::size_t>(B));

  std::vector<int> fixed_coords;
  if (resample == ProjectionResample::kPerRun) {
    StreamRng proj_rng(derive_stream(seed, StreamTag::kProjection, 0));
    fixed_coords = select_coordinates(strategy, Y.p(), q, proj_rng);
  }

  parallel_for(B, workers, [&](std::int64_t b0) {
    auto b = static_cast<std::uint64_t>(b0) + 1;  // replicate streams are 1-based
    auto start = std::chrono::steady_clock::now();
    std::vector<int> coords;
    if (resample == ProjectionResample::kPerRun) {
      coords = fixed_coords;
    } else {
      StreamRng proj_rng(derive_stream(seed, StreamTag::kProjection, b));
      coords = select_coordinates(strategy, Y.p(), q, proj_rng);
    }
    StreamRng row_rng(derive_stream(seed, StreamTag::kRows, b));
    run.replicates[static_cast<std::size_t>(b0)] =
        replicate_impl(Y, m, coords, row_rng, run.f_list);
    std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    run.replicate_seconds[static_cast<std::size_t>(b0)] = elapsed.count();
  });
  return run;
}

}  // namespace

int projected_dimension(int m, int n, int p) {
  if (m < 1 || n < 1 || p < 1) throw DomainError("projected_dimension: need m, n, p >= 1");
  return static_cast<int>(static_cast<long long>(m) * p / n);
}

std::vector<int> select_coordinates(const ProjectionStrategy& strategy, int p, int q,
                                    StreamRng& rng) {
  if (q < 1) throw DomainError("select_coordinates: q must be >= 1");
  if (q > p) throw DomainError("select_coordinates: q must not exceed p");
  std::vector<int> coords;
  coords.reserve(static_cast<std::size_t>(q));
  switch (strategy.kind) {
    case ProjectionKind::kFirstQ:
      for (int j = 0; j < q; ++j) coords.push_back(j);
      return coords;
    case ProjectionKind::kConsecutiveBlockRandomStart: {
      auto start =
          static_cast<int>(rng.next_below(static_cast<std::uint64_t>(p - q + 1)));
      for (int j = 0; j < q; ++j) coords.push_back(start + j);
      return coords;
    }
    case ProjectionKind::kUniformCoordinates: {
      // Floyd's algorithm: uniform over q-subsets without replacement.
      std::unordered_set<int> chosen;
      chosen.reserve(static_cast<std::size_t>(q) * 2);
      for (int j = p - q; j < p; ++j) {
        auto t = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(j) + 1));
        if (!chosen.insert(t).second) chosen.insert(j);
      }
      coords.assign(chosen.begin(), chosen.end());
      std::sort(coords.begin(), coords.end());
      return coords;
    }
    case ProjectionKind::kBlockPreserving: {
      const int r = strategy.block_size;
      if (r < 1) throw DomainError("select_coordinates: block size must be >= 1");
      if (p % r != 0 || q % r != 0)
        throw DomainError("select_coordinates: p and q must be multiples of the block size");
      const int nblocks = p / r;
      const int kblocks = q / r;
      std::unordered_set<int> chosen;
      for (int j = nblocks - kblocks; j < nblocks; ++j) {
        auto t = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(j) + 1));
        if (!chosen.insert(t).second) chosen.insert(j);
      }
      std::vector<int> blocks(chosen.begin(), chosen.end());
      std::sort(blocks.begin(), blocks.end());
      for (int blk : blocks)
        for (int j = 0; j < r; ++j) coords.push_back(blk * r + j);
      return coords;
    }
  }
  throw DomainError("select_coordinates: unknown strategy");
}

ReplicateRecord bootstrap_replicate(const DataMatrix& Y, int m, const std::vector<int>& coords,
                                    StreamRng& row_rng,
                                    const std::vector<SpectralFunction>& f_list) {
  Y.validate();
  if (m < 2) throw DomainError("bootstrap_replicate: m must be >= 2");
  if (coords.empty()) throw DomainError("bootstrap_replicate: empty coordinate set");
  for (int c : coords) {
    if (c < 0 || c >= Y.p()) throw DomainError("bootstrap_replicate: coordinate out of range");
  }
  return replicate_impl(Y, m, coords, row_rng, f_list);
}

BootstrapRun run_bootstrap(const DataMatrix& Y, int m, int B,
                           const ProjectionStrategy& strategy, ProjectionResample resample,
                           const std::vector<SpectralFunction>& f_list, std::uint64_t seed,
                           int workers) {
  if (m < 2) throw DomainError("run_bootstrap: m must be >= 2");
  int q = projected_dimension(m, Y.n(), Y.p());
  if (q < 1) throw DomainError("run_bootstrap: m too small for this p/n (q would be 0)");
  return run_impl(Y, m, q, B, strategy, resample, f_list, seed, workers);
}

BootstrapRun classical_bootstrap_run(const DataMatrix& Y, int B,
                                     const std::vector<SpectralFunction>& f_list,
                                     std::uint64_t seed, int workers) {
  return run_impl(Y, Y.n(), Y.p(), B, ProjectionStrategy::first_q(),
                  ProjectionResample::kPerRun, f_list, seed, workers);
}

std::vector<double> pooled_eigenvalues(const BootstrapRun& run) {
  std::vector<double> pooled;
  pooled.reserve(static_cast<std::size_t>(run.B) * static_cast<std::size_t>(run.q));
  for (const auto& rec : run.replicates)
    pooled.insert(pooled.end(), rec.eigenvalues.begin(), rec.eigenvalues.end());
  return pooled;
}

}  // namespace specboot
