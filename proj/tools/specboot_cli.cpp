// specboot command line tool: data simulation, the (m, mp/n) bootstrap,
// the identity test (single run and Monte Carlo tables), and a benchmark
// harness comparing against the classical n out of n bootstrap.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "specboot/errors.hpp"
#include "specboot/io.hpp"
#include "specboot/mp.hpp"
#include "specboot/parallel.hpp"

namespace sb = specboot;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

std::string trim(const std::string& text) {
  auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

/// Expands `--config <file>` into --key=value tokens placed before the
/// explicit flags, skipping keys the command line already provides, so flags
/// always override the file. File format: one `key = value` per line,
/// '#' comments allowed. (CLI11's own config reader does not reach
/// subcommand options, so the spec'd format is handled here.)
std::vector<std::string> expand_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  std::vector<std::string> given_flags;
  std::size_t config_at = args.size();
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& arg = args[i];
    if (arg.rfind("--", 0) != 0) continue;
    std::string name = arg.substr(0, arg.find('='));
    if (name == "--config") {
      config_at = i;
      if (arg.find('=') != std::string::npos) {
        config_path = arg.substr(arg.find('=') + 1);
      } else if (i + 1 < args.size()) {
        config_path = args[i + 1];
      }
    } else {
      given_flags.push_back(name);
    }
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) throw sb::DomainError("cannot open config file: " + config_path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    std::string text = trim(line);
    if (text.empty() || text[0] == '#' || text[0] == ';' || text[0] == '[') continue;
    auto eq = text.find('=');
    if (eq == std::string::npos)
      throw sb::DomainError("config file line is not `key = value`: " + line);
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    std::replace(key.begin(), key.end(), '_', '-');
    std::string flag = "--" + key;
    if (std::find(given_flags.begin(), given_flags.end(), flag) != given_flags.end()) continue;
    tokens.push_back(flag + "=" + value);
  }

  // Insert file tokens right after the subcommand name (before --config).
  std::vector<std::string> merged(args.begin(), args.begin() + static_cast<long>(config_at));
  merged.insert(merged.end(), tokens.begin(), tokens.end());
  merged.insert(merged.end(), args.begin() + static_cast<long>(config_at), args.end());
  return merged;
}

sb::CovarianceSpec parse_model(const std::string& text, int p) {
  auto parts = split(text, ':');
  const std::string& kind = parts[0];
  try {
    if (kind == "identity" && parts.size() == 1) return sb::CovarianceSpec::identity(p);
    if (kind == "diag2pt" && parts.size() == 2)
      return sb::CovarianceSpec::diagonal_two_point(p, std::stod(parts[1]));
    if (kind == "threeblock" && parts.size() == 1) return sb::CovarianceSpec::three_block(p);
    if (kind == "toeplitz" && parts.size() == 2)
      return sb::CovarianceSpec::toeplitz_ar(p, std::stod(parts[1]));
    if (kind == "ma1" && parts.size() == 3)
      return sb::CovarianceSpec::tridiagonal_ma(p, std::stod(parts[1]), std::stoi(parts[2]));
    if (kind == "dense" && parts.size() == 2)
      return sb::CovarianceSpec::dense_explicit(sb::read_matrix_csv(parts[1]));
  } catch (const std::logic_error& e) {
    throw sb::ModelError("invalid --model '" + text + "': " + e.what());
  }
  throw sb::ModelError(
      "invalid --model '" + text +
      "' (expected identity | diag2pt:<frac> | threeblock | toeplitz:<base> | "
      "ma1:<rho>:<r> | dense:<csv>)");
}

sb::InnovationDist parse_dist(const std::string& text) {
  if (text == "normal") return sb::InnovationDist::kStandardNormal;
  if (text == "chisq20") return sb::InnovationDist::kStandardizedChiSq20;
  if (text == "rademacher") return sb::InnovationDist::kRademacher;
  throw sb::DomainError("invalid --dist '" + text + "' (normal | chisq20 | rademacher)");
}

sb::ProjectionStrategy parse_strategy(const std::string& text, int block_size) {
  if (text == "uniform") return sb::ProjectionStrategy::uniform();
  if (text == "consecutive") return sb::ProjectionStrategy::consecutive();
  if (text == "firstq") return sb::ProjectionStrategy::first_q();
  if (text == "block") {
    if (block_size < 1) throw sb::DomainError("--strategy block requires --block-size >= 1");
    return sb::ProjectionStrategy::block_preserving(block_size);
  }
  throw sb::DomainError("invalid --strategy '" + text +
                        "' (uniform | consecutive | block | firstq)");
}

sb::ProjectionResample parse_resample(const std::string& text) {
  if (text == "per-replicate") return sb::ProjectionResample::kPerReplicate;
  if (text == "per-run") return sb::ProjectionResample::kPerRun;
  throw sb::DomainError("invalid --projection-resample '" + text +
                        "' (per-replicate | per-run)");
}

/// Resolve the seed: given value, or fresh system entropy (echoed either way).
std::uint64_t resolve_seed(std::optional<std::uint64_t> seed) {
  if (seed.has_value()) return *seed;
  std::random_device rd;
  std::uint64_t fresh = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::cerr << "note: no --seed given, drew " << fresh << " from system entropy\n";
  return fresh;
}

std::string dist_name(sb::InnovationDist dist) {
  switch (dist) {
    case sb::InnovationDist::kStandardNormal:
      return "normal";
    case sb::InnovationDist::kStandardizedChiSq20:
      return "chisq20";
    case sb::InnovationDist::kRademacher:
      return "rademacher";
  }
  return "?";
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

struct SimulateOptions {
  std::string model;
  std::string dist = "normal";
  int n = 0;
  int p = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_simulate(const SimulateOptions& opt) {
  std::uint64_t seed = resolve_seed(opt.seed);
  sb::CovarianceSpec spec = parse_model(opt.model, opt.p);
  sb::InnovationDist dist = parse_dist(opt.dist);
  sb::DataMatrix data = sb::generate_sample(spec, dist, opt.n, seed);
  sb::write_matrix_csv(opt.out, data.values);

  sb::DiscreteMeasure mu = sb::population_spectral_measure(spec);
  std::cout << "# model = " << opt.model << "\n# dist = " << opt.dist << "\n# n = " << opt.n
            << "\n# p = " << opt.p << "\n# seed = " << seed << "\n";
  std::cout << "population spectral measure (" << mu.size() << " atoms):\n";
  const std::size_t shown = std::min<std::size_t>(mu.size(), 8);
  for (std::size_t i = 0; i < shown; ++i) {
    std::cout << "  " << sb::format_double(mu.points()[i]) << " : "
              << sb::format_double(mu.weights()[i]) << "\n";
  }
  if (shown < mu.size()) std::cout << "  ... (" << mu.size() - shown << " more)\n";
  std::cout << "wrote " << opt.n << "x" << opt.p << " matrix to " << opt.out << "\n";
  return 0;
}

struct BootstrapOptions {
  std::string model;
  std::string dist = "normal";
  std::string data_path;
  int n = 0;
  int p = 0;
  int m = 0;
  int B = 100;
  std::string strategy = "uniform";
  int block_size = 0;
  std::string resample = "per-replicate";
  std::optional<std::uint64_t> seed;
  int workers = sb::default_workers();
  std::string out;
  std::string hist_out;
  std::string density_out;
  int bins = 0;
  bool classical = false;
};

int cmd_bootstrap(const BootstrapOptions& opt) {
  std::uint64_t seed = resolve_seed(opt.seed);

  sb::DataMatrix data;
  std::optional<sb::CovarianceSpec> spec;
  if (!opt.data_path.empty()) {
    data.values = sb::read_matrix_csv(opt.data_path);
    data.validate();
  } else {
    if (opt.model.empty()) throw sb::DomainError("need --data or --model with --n/--p");
    spec = parse_model(opt.model, opt.p);
    data = sb::generate_sample(*spec, parse_dist(opt.dist), opt.n, seed);
  }

  sb::ProjectionStrategy strategy = parse_strategy(opt.strategy, opt.block_size);
  sb::ProjectionResample resample = parse_resample(opt.resample);
  std::vector<sb::SpectralFunction> fs = {sb::SpectralFunction::ledoit_wolf(),
                                          sb::SpectralFunction::identity()};

  std::uint64_t run_seed = sb::derive_stream(seed, sb::StreamTag::kGeneric, 1);
  sb::BootstrapRun run =
      opt.classical
          ? sb::classical_bootstrap_run(data, opt.B, fs, run_seed, opt.workers)
          : sb::run_bootstrap(data, opt.m, opt.B, strategy, resample, fs, run_seed, opt.workers);

  sb::ConfigEcho echo = {
      {"B", std::to_string(opt.B)},
      {"m", std::to_string(run.m)},
      {"n", std::to_string(run.n)},
      {"p", std::to_string(run.p)},
      {"projection_resample", opt.resample},
      {"q", std::to_string(run.q)},
      {"seed", std::to_string(seed)},
      {"strategy", opt.classical ? "classical" : opt.strategy},
  };
  if (!opt.model.empty()) echo["model"] = opt.model;
  if (!opt.data_path.empty()) echo["data"] = opt.data_path;

  sb::write_run_records(opt.out, run, echo);

  std::vector<double> pooled = sb::pooled_eigenvalues(run);
  auto hist = sb::histogram_density(pooled, opt.bins);
  std::string hist_path = opt.hist_out.empty() ? opt.out + ".hist.csv" : opt.hist_out;
  sb::write_histogram_csv(hist_path, hist, echo);
  std::cout << "wrote run records to " << opt.out << " and histogram to " << hist_path << "\n";

  if (spec.has_value()) {
    // MP density of the limit model for overlaying the histogram.
    sb::MPModel model(static_cast<double>(run.p) / run.n,
                      sb::population_spectral_measure(*spec));
    double lo = *std::min_element(pooled.begin(), pooled.end());
    double hi = *std::max_element(pooled.begin(), pooled.end());
    double pad = 0.05 * (hi - lo);
    lo = std::max(1e-6, lo - pad);
    hi += pad;
    const int points = 512;
    std::vector<double> xs(points), ys(points);
    for (int i = 0; i < points; ++i) {
      xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
      ys[static_cast<std::size_t>(i)] =
          sb::mp_density(model, xs[static_cast<std::size_t>(i)], 1e-4);
    }
    std::string density_path =
        opt.density_out.empty() ? opt.out + ".density.csv" : opt.density_out;
    sb::write_density_csv(density_path, xs, ys, echo);
    std::cout << "wrote MP density curve to " << density_path << "\n";
  }
  return 0;
}

struct TestOptions {
  std::string model;
  std::string dist = "normal";
  std::string data_path;
  int n = 0;
  int p = 0;
  int m = 0;
  std::string m_rule = "fixed";
  double psi = 0.75;
  int K = 30;
  int j_start = 10;
  int B = 500;
  double alpha = 0.05;
  std::string strategy = "uniform";
  int block_size = 0;
  std::string resample = "per-replicate";
  bool bias_correction = false;
  std::optional<std::uint64_t> seed;
  int workers = sb::default_workers();
  std::string out;
  std::string ladder_out;
  // table mode
  bool table = false;
  double rho = 0.05;
  std::string r_over_p = "0";
  std::string rules = "bs,dk";
  int n_sim = 100;
};

sb::MRule make_rule(const std::string& name, const TestOptions& opt) {
  sb::MLadderParams params;
  params.psi = opt.psi;
  params.K = opt.K;
  params.j_start = opt.j_start;
  if (name == "bs") return sb::MRule::bickel_sakov(params);
  if (name == "dk") return sb::MRule::dette_kroll(params);
  if (name == "fixed") {
    if (opt.m < 2) throw sb::DomainError("rule 'fixed' requires --m >= 2");
    return sb::MRule::fixed(opt.m);
  }
  throw sb::DomainError("invalid m rule '" + name + "' (bs | dk | fixed)");
}

int cmd_test(const TestOptions& opt) {
  std::uint64_t seed = resolve_seed(opt.seed);
  sb::IdentityTestOptions test_opts;
  test_opts.B = opt.B;
  test_opts.alpha = opt.alpha;
  test_opts.strategy = parse_strategy(opt.strategy, opt.block_size);
  test_opts.resample = parse_resample(opt.resample);
  test_opts.use_bias_correction = opt.bias_correction;
  test_opts.workers = opt.workers;

  if (opt.table) {
    if (opt.model.empty() && opt.n < 1)
      throw sb::DomainError("table mode needs --n and --p (data is simulated per run)");
    sb::InnovationDist dist = parse_dist(opt.dist);
    std::vector<sb::TableRow> rows;
    std::ostringstream records;
    records << "rule,r_over_p,sim,reject\n";
    for (const std::string& rule_name : split(opt.rules, ',')) {
      sb::MRule rule = make_rule(rule_name, opt);
      for (const std::string& ratio_text : split(opt.r_over_p, ',')) {
        double ratio = std::stod(ratio_text);
        int r = static_cast<int>(std::llround(ratio * opt.p));
        sb::MonteCarloConfig config;
        config.spec = r == 0 ? sb::CovarianceSpec::identity(opt.p)
                             : sb::CovarianceSpec::tridiagonal_ma(opt.p, opt.rho, r);
        config.dist = dist;
        config.n = opt.n;
        config.m_rule = rule;
        config.test = test_opts;
        config.n_sim = opt.n_sim;
        config.seed = seed;
        config.workers = opt.workers;
        sb::RejectionEstimate estimate = sb::rejection_probability_mc(config);
        rows.push_back({rule_name, ratio, estimate.rate, estimate.se, estimate.mean_runtime_s});
        for (std::size_t s = 0; s < estimate.decisions.size(); ++s) {
          records << rule_name << ',' << sb::format_double(ratio) << ',' << s + 1 << ','
                  << (estimate.decisions[s] ? 1 : 0) << '\n';
        }
        std::cerr << "rule " << rule_name << " r/p " << ratio << ": rate " << estimate.rate
                  << " (se " << estimate.se << "), mean runtime " << estimate.mean_runtime_s
                  << " s\n";
      }
    }
    sb::ConfigEcho echo = {
        {"B", std::to_string(opt.B)},       {"alpha", sb::format_double(opt.alpha)},
        {"dist", opt.dist},                 {"n", std::to_string(opt.n)},
        {"n_sim", std::to_string(opt.n_sim)}, {"p", std::to_string(opt.p)},
        {"rho", sb::format_double(opt.rho)},  {"seed", std::to_string(seed)},
        {"strategy", opt.strategy},
    };
    sb::write_table_csv(opt.out, rows, echo);
    std::ofstream rec_out(opt.out + ".records.csv", std::ios::binary);
    if (!rec_out) throw sb::DomainError("cannot open for writing: " + opt.out + ".records.csv");
    rec_out << records.str();
    std::cout << "wrote table to " << opt.out << " and per-simulation records to " << opt.out
              << ".records.csv\n";
    return 0;
  }

  sb::DataMatrix data;
  if (!opt.data_path.empty()) {
    data.values = sb::read_matrix_csv(opt.data_path);
    data.validate();
  } else {
    if (opt.model.empty()) throw sb::DomainError("need --data or --model with --n/--p");
    data = sb::generate_sample(parse_model(opt.model, opt.p), parse_dist(opt.dist), opt.n, seed);
  }

  sb::MRule rule = make_rule(opt.m_rule, opt);
  sb::MLadder ladder;
  bool adaptive = rule.kind != sb::MRuleKind::kFixed;
  sb::TestResult result =
      identity_test(data, rule, test_opts, seed, adaptive ? &ladder : nullptr);
  if (!ladder.dropped_js.empty()) {
    std::cerr << "warning: dropped " << ladder.dropped_js.size()
              << " infeasible ladder candidates (m < 2 or floor(mp/n) < 1), first at j = "
              << ladder.dropped_js.front() << "\n";
  }

  sb::ConfigEcho echo = {
      {"B", std::to_string(opt.B)},
      {"alpha", sb::format_double(opt.alpha)},
      {"m_rule", opt.m_rule},
      {"n", std::to_string(data.n())},
      {"p", std::to_string(data.p())},
      {"projection_resample", opt.resample},
      {"seed", std::to_string(seed)},
      {"strategy", opt.strategy},
  };
  sb::write_test_record(opt.out, result, echo);
  if (!opt.ladder_out.empty() && !ladder.entries.empty()) {
    sb::write_ladder_csv(opt.ladder_out, sb::ladder_diagnostics(ladder), echo);
  }

  std::cout << "T_n = " << result.statistic << ", centering p^2/n = " << result.centering
            << ", q*_{1-alpha} = " << result.quantile << ", chosen m = " << result.chosen_m
            << " (q = " << result.chosen_q << ")\n";
  std::cout << "decision: " << (result.reject ? "REJECT" : "do not reject")
            << " H0: Sigma = I at alpha = " << result.alpha << "\n";
  std::cerr << "timings: statistic " << result.timings.statistic_s << " s, bootstrap "
            << result.timings.bootstrap_s << " s, total " << result.timings.total_s << " s\n";
  std::cout << "wrote test record to " << opt.out << "\n";
  return 0;
}

struct BenchOptions {
  std::string model = "identity";
  std::string dist = "normal";
  int n = 0;
  int p = 0;
  int m = 0;
  int B = 20;
  std::optional<std::uint64_t> seed;
  int workers = sb::default_workers();
  std::string out;
  double classical_mem_gb = 8.0;
};

int cmd_bench(const BenchOptions& opt) {
  std::uint64_t seed = resolve_seed(opt.seed);
  sb::CovarianceSpec spec = parse_model(opt.model, opt.p);
  sb::DataMatrix data = sb::generate_sample(spec, parse_dist(opt.dist), opt.n, seed);

  std::ostringstream report;
  report << "# B = " << opt.B << "\n# dist = " << opt.dist << "\n# m = " << opt.m
         << "\n# model = " << opt.model << "\n# n = " << opt.n << "\n# p = " << opt.p
         << "\n# q = " << (opt.B >= 1 ? sb::projected_dimension(opt.m, opt.n, opt.p) : 0)
         << "\n# seed = " << seed << "\n";

  // Phase (a): the one-off full-data computation every test pays once.
  auto t0 = std::chrono::steady_clock::now();
  double t_stat = sb::ledoit_wolf_stat(data);
  std::chrono::duration<double> stat_time = std::chrono::steady_clock::now() - t0;
  report << "phase_a_statistic_s " << stat_time.count() << "  (T_n = " << t_stat << ")\n";

  if (opt.B >= 1) {
    // Phase (b): (m, mp/n) replicates.
    sb::BootstrapRun small = sb::run_bootstrap(
        data, opt.m, opt.B, sb::ProjectionStrategy::uniform(),
        sb::ProjectionResample::kPerReplicate, {sb::SpectralFunction::ledoit_wolf()},
        sb::derive_stream(seed, sb::StreamTag::kGeneric, 2), opt.workers);
    double median_small = median(small.replicate_seconds);
    report << "phase_b_replicates " << opt.B << " q " << small.q << "\n";
    report << "phase_b_median_replicate_s " << median_small << "\n";

    // Phase (c): classical replicates at the same (n, p), unless the memory
    // estimate exceeds the configured limit.
    double classical_bytes =
        8.0 * (static_cast<double>(opt.n) * opt.p + 2.0 * static_cast<double>(opt.p) * opt.p) *
        std::max(1, opt.workers);
    if (classical_bytes > opt.classical_mem_gb * 1e9) {
      report << "phase_c_skipped estimated " << classical_bytes / 1e9
             << " GB exceeds limit of " << opt.classical_mem_gb << " GB (not a failure)\n";
    } else {
      sb::BootstrapRun classical = sb::classical_bootstrap_run(
          data, opt.B, {sb::SpectralFunction::ledoit_wolf()},
          sb::derive_stream(seed, sb::StreamTag::kGeneric, 3), opt.workers);
      double median_classical = median(classical.replicate_seconds);
      report << "phase_c_median_replicate_s " << median_classical << "\n";
      if (median_small > 0.0)
        report << "classical_over_projected_ratio " << median_classical / median_small << "\n";
    }
  }

  std::cout << report.str();
  if (!opt.out.empty()) {
    std::ofstream out(opt.out, std::ios::binary);
    if (!out) throw sb::DomainError("cannot open for writing: " + opt.out);
    out << report.str();
    std::cout << "wrote benchmark report to " << opt.out << "\n";
  }
  return 0;
}

void add_seed_workers(CLI::App* cmd, std::optional<std::uint64_t>& seed, int* workers) {
  cmd->add_option("--seed", seed, "RNG seed (default: drawn from system entropy and echoed)");
  if (workers != nullptr)
    cmd->add_option("--workers", *workers, "Worker threads (default: logical cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "specboot: the (m, mp/n) out of (n, p) bootstrap for spectra of high-dimensional "
      "sample covariance matrices"};
  app.require_subcommand(1);

  SimulateOptions sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Generate synthetic observations as CSV");
  std::string sim_config;
  simulate->add_option("--config", sim_config, "Config file (key = value per line; flags override)");
  simulate->add_option("--model", sim.model,
                       "identity | diag2pt:<frac> | threeblock | toeplitz:<base> | "
                       "ma1:<rho>:<r> | dense:<csv>")
      ->required();
  simulate->add_option("--dist", sim.dist, "normal | chisq20 | rademacher");
  simulate->add_option("--n", sim.n, "Number of observations")->required();
  simulate->add_option("--p", sim.p, "Dimension")->required();
  simulate->add_option("--out", sim.out, "Output CSV path")->required();
  add_seed_workers(simulate, sim.seed, nullptr);

  BootstrapOptions boot;
  CLI::App* bootstrap =
      app.add_subcommand("bootstrap", "Run the (m, mp/n) out of (n, p) bootstrap");
  std::string boot_config;
  bootstrap->add_option("--config", boot_config, "Config file (key = value per line; flags override)");
  bootstrap->add_option("--model", boot.model, "Model to simulate from (see simulate --help)");
  bootstrap->add_option("--dist", boot.dist, "normal | chisq20 | rademacher");
  bootstrap->add_option("--data", boot.data_path, "Existing observation CSV (overrides --model)");
  bootstrap->add_option("--n", boot.n, "Observations when simulating");
  bootstrap->add_option("--p", boot.p, "Dimension when simulating");
  bootstrap->add_option("--m", boot.m, "Subsample size")->required();
  bootstrap->add_option("--B", boot.B, "Bootstrap replicates");
  bootstrap->add_option("--strategy", boot.strategy,
                        "uniform | consecutive | block | firstq");
  bootstrap->add_option("--block-size", boot.block_size, "Block length for --strategy block");
  bootstrap->add_option("--projection-resample", boot.resample, "per-replicate | per-run");
  bootstrap->add_option("--out", boot.out, "Run records output path")->required();
  bootstrap->add_option("--hist-out", boot.hist_out,
                        "Histogram CSV path (default <out>.hist.csv)");
  bootstrap->add_option("--density-out", boot.density_out,
                        "MP density CSV path (default <out>.density.csv; model runs only)");
  bootstrap->add_option("--bins", boot.bins, "Histogram bins (0 = Freedman-Diaconis)");
  bootstrap->add_flag("--classical", boot.classical,
                      "Run the classical n out of n bootstrap instead (ignores --m)");
  add_seed_workers(bootstrap, boot.seed, &boot.workers);

  TestOptions test;
  CLI::App* test_cmd = app.add_subcommand("test", "Bootstrap test of H0: Sigma = I");
  std::string test_config;
  test_cmd->add_option("--config", test_config, "Config file (key = value per line; flags override)");
  test_cmd->add_option("--model", test.model, "Model to simulate from (single-test mode)");
  test_cmd->add_option("--dist", test.dist, "normal | chisq20 | rademacher");
  test_cmd->add_option("--data", test.data_path, "Existing observation CSV (overrides --model)");
  test_cmd->add_option("--n", test.n, "Observations when simulating");
  test_cmd->add_option("--p", test.p, "Dimension when simulating");
  test_cmd->add_option("--m", test.m, "Fixed subsample size (with --m-rule fixed)");
  test_cmd->add_option("--m-rule", test.m_rule, "fixed | bs | dk");
  test_cmd->add_option("--psi", test.psi, "Ladder ratio psi in (0,1)");
  test_cmd->add_option("--K", test.K, "Ladder length K");
  test_cmd->add_option("--j-start", test.j_start, "First ladder exponent j");
  test_cmd->add_option("--B", test.B, "Bootstrap replicates per test");
  test_cmd->add_option("--alpha", test.alpha, "Test level");
  test_cmd->add_option("--strategy", test.strategy, "uniform | consecutive | block | firstq");
  test_cmd->add_option("--block-size", test.block_size, "Block length for --strategy block");
  test_cmd->add_option("--projection-resample", test.resample, "per-replicate | per-run");
  test_cmd->add_flag("--bias-correction", test.bias_correction,
                     "Subtract the data-driven d_n term from the bootstrap samples");
  test_cmd->add_option("--out", test.out, "Result output path")->required();
  test_cmd->add_option("--ladder-out", test.ladder_out,
                       "Ladder diagnostics CSV (adaptive rules only)");
  test_cmd->add_flag("--table", test.table, "Monte Carlo table mode over an r/p ladder");
  test_cmd->add_option("--rho", test.rho, "Off-diagonal value for the MA(1) alternative");
  test_cmd->add_option("--r-over-p", test.r_over_p, "Comma list of r/p ratios (table mode)");
  test_cmd->add_option("--rules", test.rules, "Comma list of rules (table mode): bs,dk,fixed");
  test_cmd->add_option("--n-sim", test.n_sim, "Simulation runs per table cell");
  add_seed_workers(test_cmd, test.seed, &test.workers);

  BenchOptions bench;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "Time (m, mp/n) replicates against classical replicates");
  std::string bench_config;
  bench_cmd->add_option("--config", bench_config, "Config file (key = value per line; flags override)");
  bench_cmd->add_option("--model", bench.model, "Model to simulate from");
  bench_cmd->add_option("--dist", bench.dist, "normal | chisq20 | rademacher");
  bench_cmd->add_option("--n", bench.n, "Observations")->required();
  bench_cmd->add_option("--p", bench.p, "Dimension")->required();
  bench_cmd->add_option("--m", bench.m, "Subsample size");
  bench_cmd->add_option("--B", bench.B, "Replicates per leg (0 = phase (a) only)");
  bench_cmd->add_option("--out", bench.out, "Also write the report to this path");
  bench_cmd->add_option("--classical-mem-gb", bench.classical_mem_gb,
                        "Skip the classical leg above this estimated memory");
  add_seed_workers(bench_cmd, bench.seed, &bench.workers);

  std::vector<std::string> args;
  try {
    args = expand_config_args(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  std::vector<char*> argv_expanded;
  std::string program = argc > 0 ? argv[0] : "specboot";
  argv_expanded.push_back(program.data());
  for (auto& arg : args) argv_expanded.push_back(arg.data());

  try {
    app.parse(static_cast<int>(argv_expanded.size()), argv_expanded.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (bootstrap->parsed()) return cmd_bootstrap(boot);
    if (test_cmd->parsed()) return cmd_test(test);
    if (bench_cmd->parsed()) return cmd_bench(bench);
  } catch (const sb::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    // Domain, model, contract and capability errors all signal bad configuration.
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
