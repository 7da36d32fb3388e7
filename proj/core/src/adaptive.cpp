#include "specboot/adaptive.hpp"

#include <cmath>
#include <limits>

#include "specboot/errors.hpp"

namespace specboot {

std::vector<int> candidate_ms(int n, double psi, int K, int j_start) {
  if (n < 1) throw DomainError("candidate_ms: n must be >= 1");
  if (!(psi > 0.0 && psi < 1.0)) throw DomainError("candidate_ms: psi must be in (0,1)");
  if (K < 1) throw DomainError("candidate_ms: K must be >= 1");
  if (j_start < 0) throw DomainError("candidate_ms: j_start must be >= 0");
  std::vector<int> ms;
  ms.reserve(static_cast<std::size_t>(K) + 1);
  for (int j = j_start; j <= j_start + K; ++j) {
    double value = std::pow(psi, j) * static_cast<double>(n);
    ms.push_back(static_cast<int>(std::ceil(value)));
  }
  return ms;
}

SampleDistance kolmogorov_sample_distance() {
  return [](const std::vector<double>& a, const std::vector<double>& b) {
    return kolmogorov_distance(a, b);
  };
}

namespace {

void require_choice_preconditions(const MLadder& ladder) {
  if (ladder.entries.size() < 2)
    throw DomainError("adaptive m choice: need at least 2 candidates with samples");
  for (const auto& e : ladder.entries) {
    if (e.samples.empty()) throw DomainError("adaptive m choice: candidate without samples");
  }
}

}  // namespace

MChoice choose_m_bickel_sakov(const MLadder& ladder, const SampleDistance& distance) {
  require_choice_preconditions(ladder);
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < ladder.entries.size(); ++i) {
    double d = distance(ladder.entries[i].samples, ladder.entries[i + 1].samples);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  const auto& e = ladder.entries[static_cast<std::size_t>(best)];
  return {best, e.j, e.m};
}

MChoice choose_m_dette_kroll(const MLadder& ladder, const SampleDistance& distance) {
  require_choice_preconditions(ladder);
  const std::size_t count = ladder.entries.size();
  std::vector<double> dist(count * count, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t k = i + 1; k < count; ++k) {
      double d = distance(ladder.entries[i].samples, ladder.entries[k].samples);
      dist[i * count + k] = d;
      dist[k * count + i] = d;
    }
  }
  int best = 0;
  double best_sum = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    double row = 0.0;
    for (std::size_t k = 0; k < count; ++k) row += dist[i * count + k];
    if (row < best_sum) {
      best_sum = row;
      best = static_cast<int>(i);
    }
  }
  const auto& e = ladder.entries[static_cast<std::size_t>(best)];
  return {best, e.j, e.m};
}

MLadder build_m_ladder(const DataMatrix& Y, double t_hat_n, const SpectralFunction& f,
                       const MLadderParams& params, int B, const ProjectionStrategy& strategy,
                       ProjectionResample resample, std::uint64_t seed, int workers) {
  Y.validate();
  MLadder ladder;
  ladder.params = params;
  ladder.n = Y.n();
  std::vector<int> ms = candidate_ms(Y.n(), params.psi, params.K, params.j_start);

  for (std::size_t idx = 0; idx < ms.size(); ++idx) {
    int j = params.j_start + static_cast<int>(idx);
    int m = ms[idx];
    if (m < 2 || projected_dimension(m, Y.n(), Y.p()) < 1) {
      ladder.dropped_js.push_back(j);
      continue;
    }
    MLadderEntry entry;
    entry.j = j;
    entry.m = m;
    entry.q = projected_dimension(m, Y.n(), Y.p());
    ladder.entries.push_back(std::move(entry));
  }

  const double shrink_base = 1.0 / static_cast<double>(Y.n());
  for (auto& entry : ladder.entries) {
    std::uint64_t run_seed =
        derive_stream(seed, StreamTag::kLadder, static_cast<std::uint64_t>(entry.j));
    BootstrapRun run =
        run_bootstrap(Y, entry.m, B, strategy, resample, {f}, run_seed, workers);
    entry.samples.reserve(static_cast<std::size_t>(B));
    double scale = static_cast<double>(entry.m) * shrink_base;  // m_j / n
    for (const auto& rec : run.replicates) entry.samples.push_back(rec.lss_values[0] - scale * t_hat_n);
  }
  return ladder;
}

std::vector<LadderDiagnosticsRow> ladder_diagnostics(const MLadder& ladder,
                                                     const SampleDistance& distance) {
  std::vector<LadderDiagnosticsRow> rows;
  const std::size_t count = ladder.entries.size();
  rows.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    LadderDiagnosticsRow row;
    row.j = ladder.entries[i].j;
    row.m = ladder.entries[i].m;
    row.q = ladder.entries[i].q;
    if (i + 1 < count)
      row.d_consecutive = distance(ladder.entries[i].samples, ladder.entries[i + 1].samples);
    for (std::size_t k = 0; k < count; ++k) {
      if (k != i) row.d_rowsum += distance(ladder.entries[i].samples, ladder.entries[k].samples);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace specboot
