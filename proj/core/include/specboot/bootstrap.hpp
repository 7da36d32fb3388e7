#pragma once

#include <cstdint>
#include <vector>

#include "specboot/datagen.hpp"
#include "specboot/rng.hpp"
#include "specboot/spectra.hpp"

namespace specboot {

enum class ProjectionKind {
  kUniformCoordinates,          // q-subset of {1..p} uniform without replacement
  kConsecutiveBlockRandomStart, // {s..s+q-1}, s uniform on {1..p-q+1}
  kBlockPreserving,             // whole consecutive blocks of fixed length
  kFirstQ,                      // {1..q}
};

struct ProjectionStrategy {
  ProjectionKind kind = ProjectionKind::kUniformCoordinates;
  int block_size = 0;  // BlockPreserving only

  static ProjectionStrategy uniform() { return {ProjectionKind::kUniformCoordinates, 0}; }
  static ProjectionStrategy consecutive() {
    return {ProjectionKind::kConsecutiveBlockRandomStart, 0};
  }
  static ProjectionStrategy block_preserving(int block_size) {
    return {ProjectionKind::kBlockPreserving, block_size};
  }
  static ProjectionStrategy first_q() { return {ProjectionKind::kFirstQ, 0}; }
};

/// Redraw the coordinate projection for every replicate (default), or fix a
/// single projection for the whole run.
enum class ProjectionResample { kPerReplicate, kPerRun };

struct ReplicateRecord {
  std::vector<double> eigenvalues;  // ascending, length q
  std::vector<double> lss_values;   // one per requested spectral function
};

struct BootstrapRun {
  int n = 0, p = 0, m = 0, q = 0, B = 0;
  ProjectionStrategy strategy;
  ProjectionResample resample = ProjectionResample::kPerReplicate;
  std::uint64_t seed = 0;
  std::vector<SpectralFunction> f_list;
  std::vector<ReplicateRecord> replicates;   // replicate b at index b-1
  std::vector<double> replicate_seconds;     // wall-clock per replicate (not serialized)
};

/// q = floor(m p / n).
int projected_dimension(int m, int n, int p);

/// Sorted distinct 0-based coordinate indices of length q.
std::vector<int> select_coordinates(const ProjectionStrategy& strategy, int p, int q,
                                    StreamRng& rng);

/// One bootstrap replicate: draws m row indices iid uniform with replacement,
/// projects onto coords, forms the q x q covariance of the resample and
/// returns its ascending eigenvalues plus sum_j f(lambda_j) per f.
ReplicateRecord bootstrap_replicate(const DataMatrix& Y, int m, const std::vector<int>& coords,
                                    StreamRng& row_rng,
                                    const std::vector<SpectralFunction>& f_list);

/// The (m, mp/n) out of (n, p) bootstrap. Replicate b draws its projection
/// from stream (seed, kProjection, b) and its rows from (seed, kRows, b), so
/// results are bit-identical for any worker count.
BootstrapRun run_bootstrap(const DataMatrix& Y, int m, int B,
                           const ProjectionStrategy& strategy, ProjectionResample resample,
                           const std::vector<SpectralFunction>& f_list, std::uint64_t seed,
                           int workers);

/// Classical n out of n bootstrap at full dimension (m = n, identity
/// projection). The failing baseline, kept for comparisons and benchmarks.
BootstrapRun classical_bootstrap_run(const DataMatrix& Y, int B,
                                     const std::vector<SpectralFunction>& f_list,
                                     std::uint64_t seed, int workers);

/// Eigenvalues of all replicates concatenated.
std::vector<double> pooled_eigenvalues(const BootstrapRun& run);

}  // namespace specboot
