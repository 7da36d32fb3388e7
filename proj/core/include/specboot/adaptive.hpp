#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "specboot/bootstrap.hpp"

namespace specboot {

/// Geometric candidate ladder m_j = ceil(psi^j n), j = j_start .. j_start+K.
struct MLadderParams {
  double psi = 0.75;
  int K = 30;
  int j_start = 10;
};

struct MLadderEntry {
  int j = 0;
  int m = 0;
  int q = 0;
  std::vector<double> samples;  // bootstrap statistic draws at this candidate
};

struct MLadder {
  MLadderParams params;
  int n = 0;
  std::vector<MLadderEntry> entries;  // feasible candidates, ascending j
  std::vector<int> dropped_js;        // candidates removed by the feasibility filter
};

/// Exact ceilings m_j = ceil(psi^j n), j = j_start .. j_start+K (length K+1),
/// before any feasibility filtering.
std::vector<int> candidate_ms(int n, double psi, int K, int j_start);

using SampleDistance =
    std::function<double(const std::vector<double>&, const std::vector<double>&)>;

/// Kolmogorov distance, the paper's choice for the adaptive rules.
SampleDistance kolmogorov_sample_distance();

struct MChoice {
  int index = 0;  // position in ladder.entries
  int j = 0;
  int m = 0;
};

/// Bickel-Sakov: smallest index minimizing d(samples_j, samples_{j+1}).
MChoice choose_m_bickel_sakov(const MLadder& ladder,
                              const SampleDistance& distance = kolmogorov_sample_distance());

/// Dette-Kroll: smallest index minimizing sum_k d(samples_j, samples_k).
MChoice choose_m_dette_kroll(const MLadder& ladder,
                             const SampleDistance& distance = kolmogorov_sample_distance());

/// Runs the bootstrap once per feasible candidate and caches the statistic
/// samples T*_{m_j}(f) - (m_j/n) t_hat_n. Candidates with floor(m p / n) < 1
/// or m < 2 are dropped. Candidate j uses the run seed (seed, kLadder, j).
MLadder build_m_ladder(const DataMatrix& Y, double t_hat_n, const SpectralFunction& f,
                       const MLadderParams& params, int B, const ProjectionStrategy& strategy,
                       ProjectionResample resample, std::uint64_t seed, int workers);

struct LadderDiagnosticsRow {
  int j = 0;
  int m = 0;
  int q = 0;
  double d_consecutive = 0.0;  // d(samples_j, samples_{j+1}); 0 for the last row
  double d_rowsum = 0.0;       // sum_k d(samples_j, samples_k)
};

std::vector<LadderDiagnosticsRow> ladder_diagnostics(
    const MLadder& ladder, const SampleDistance& distance = kolmogorov_sample_distance());

}  // namespace specboot
