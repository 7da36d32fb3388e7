// End-to-end tests of the command line tool: exit codes, output formats,
// help completeness and cross-worker determinism of result files.
#include <gtest/gtest.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout only
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("specboot_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  CommandResult run(const std::string& args) const {
    std::string out_file = path("__stdout");
    std::string cmd = std::string(SPECBOOT_CLI_PATH) + " " + args + " > " + out_file + " 2> " +
                      path("__stderr");
    int status = std::system(cmd.c_str());
    CommandResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_file, std::ios::binary);
    result.output = {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return result;
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  static int count_lines(const std::string& text) {
    return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
  }

  fs::path dir_;
};

TEST_F(CliTest, HelpListsEveryConfigKey) {
  auto top = run("--help");
  EXPECT_EQ(top.exit_code, 0);
  for (const char* sub : {"simulate", "bootstrap", "test", "bench"})
    EXPECT_NE(top.output.find(sub), std::string::npos) << sub;

  auto sim_help = run("simulate --help");
  EXPECT_EQ(sim_help.exit_code, 0);
  for (const char* key : {"--model", "--dist", "--n", "--p", "--seed", "--out", "--config"})
    EXPECT_NE(sim_help.output.find(key), std::string::npos) << key;

  auto boot_help = run("bootstrap --help");
  for (const char* key : {"--m", "--B", "--strategy", "--projection-resample", "--workers"})
    EXPECT_NE(boot_help.output.find(key), std::string::npos) << key;

  auto test_help = run("test --help");
  for (const char* key : {"--m-rule", "--alpha", "--table", "--r-over-p", "--n-sim", "--rho"})
    EXPECT_NE(test_help.output.find(key), std::string::npos) << key;

  auto bench_help = run("bench --help");
  for (const char* key : {"--n", "--p", "--m", "--B", "--classical-mem-gb"})
    EXPECT_NE(bench_help.output.find(key), std::string::npos) << key;
}

TEST_F(CliTest, SimulateWritesMatrixOfRequestedShape) {
  auto result = run("simulate --model diag2pt:0.5 --n 20 --p 10 --seed 7 --out " + path("d.csv"));
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_NE(result.output.find("population spectral measure"), std::string::npos);
  std::string csv = slurp(path("d.csv"));
  EXPECT_EQ(count_lines(csv), 20);

  auto rerun = run("simulate --model diag2pt:0.5 --n 20 --p 10 --seed 7 --out " + path("d2.csv"));
  EXPECT_EQ(rerun.exit_code, 0);
  EXPECT_EQ(csv, slurp(path("d2.csv")));
}

TEST_F(CliTest, SimulateMa1OffDiagonalMoment) {
  auto result = run("simulate --model ma1:0.05:10 --n 4000 --p 40 --seed 3 --out " + path("m.csv"));
  EXPECT_EQ(result.exit_code, 0);
  // Mean first-off-diagonal sample covariance over the r MA positions.
  std::ifstream in(path("m.csv"));
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  ASSERT_EQ(rows.size(), 4000u);
  double mean_cov = 0.0;
  for (int j = 0; j < 10; ++j) {
    double cov = 0.0;
    for (const auto& row : rows) cov += row[static_cast<std::size_t>(j)] * row[static_cast<std::size_t>(j) + 1];
    mean_cov += cov / 4000.0;
  }
  mean_cov /= 10.0;
  EXPECT_NEAR(mean_cov, 0.05, 0.02);
}

TEST_F(CliTest, InvalidModelExitsWithCode2) {
  auto result = run("simulate --model diag2pt:1.5 --n 5 --p 4 --seed 1 --out " + path("x.csv"));
  EXPECT_EQ(result.exit_code, 2);
  auto unknown = run("simulate --model nosuch --n 5 --p 4 --seed 1 --out " + path("x.csv"));
  EXPECT_EQ(unknown.exit_code, 2);
}

TEST_F(CliTest, BootstrapInfeasibleMExitsWithCode2) {
  auto result = run("bootstrap --model identity --n 100 --p 3 --m 20 --B 2 --seed 1 --out " +
                    path("r.jsonl"));
  EXPECT_EQ(result.exit_code, 2);  // q = floor(20*3/100) = 0
}

TEST_F(CliTest, BootstrapRunAndFilesRoundTrip) {
  auto result = run(
      "bootstrap --model diag2pt:0.5 --n 200 --p 40 --m 50 --B 5 --seed 11 --workers 2 --out " +
      path("run.jsonl"));
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_TRUE(fs::exists(path("run.jsonl")));
  EXPECT_TRUE(fs::exists(path("run.jsonl.hist.csv")));
  EXPECT_TRUE(fs::exists(path("run.jsonl.density.csv")));
  std::string records = slurp(path("run.jsonl"));
  EXPECT_EQ(count_lines(records), 6);  // header + 5 replicates
}

TEST_F(CliTest, ConfigFileSuppliesValuesAndFlagsOverride) {
  {
    std::ofstream cfg(path("cfg.ini"));
    cfg << "model = identity\n"
        << "n = 30\n"
        << "p = 10\n"
        << "seed = 5\n"
        << "out = " << path("cfg_out.csv") << "\n";
  }
  auto from_file = run("simulate --config " + path("cfg.ini"));
  EXPECT_EQ(from_file.exit_code, 0);
  EXPECT_EQ(count_lines(slurp(path("cfg_out.csv"))), 30);

  auto overridden = run("simulate --config " + path("cfg.ini") + " --n 12 --out " + path("o.csv"));
  EXPECT_EQ(overridden.exit_code, 0);
  EXPECT_EQ(count_lines(slurp(path("o.csv"))), 12);
}

TEST_F(CliTest, TestSubcommandSingleAndDeterministicAcrossWorkers) {
  std::string base = "test --model identity --n 300 --p 60 --m-rule fixed --m 60 --B 100 "
                     "--alpha 0.05 --seed 21 ";
  auto a = run(base + "--workers 1 --out " + path("a.json"));
  auto b = run(base + "--workers 4 --out " + path("b.json"));
  EXPECT_EQ(a.exit_code, 0);
  EXPECT_EQ(b.exit_code, 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_NE(a.output.find("decision:"), std::string::npos);
}

TEST_F(CliTest, TableModeWritesTableAndRecords) {
  std::string cmd =
      "test --table --n 200 --p 60 --rho 0.2 --r-over-p 0,0.05 --rules fixed --m 40 --B 60 "
      "--n-sim 10 --seed 33 --workers 2 --out " +
      path("tab.csv");
  auto result = run(cmd);
  EXPECT_EQ(result.exit_code, 0);
  std::string table = slurp(path("tab.csv"));
  EXPECT_NE(table.find("rule,r_over_p,rate,se,mean_runtime_s"), std::string::npos);
  EXPECT_EQ(count_lines(slurp(path("tab.csv.records.csv"))), 21);  // header + 2*10 sims
}

TEST_F(CliTest, AdaptiveRuleWritesLadderDiagnostics) {
  std::string cmd =
      "test --model identity --n 256 --p 64 --m-rule bs --psi 0.6 --K 4 --j-start 1 --B 40 "
      "--seed 9 --out " +
      path("t.json") + " --ladder-out " + path("ladder.csv");
  auto result = run(cmd);
  EXPECT_EQ(result.exit_code, 0);
  std::string ladder = slurp(path("ladder.csv"));
  EXPECT_NE(ladder.find("j,m_j,q_j,d_consecutive,d_rowsum"), std::string::npos);
  EXPECT_GE(count_lines(ladder), 3);
}

TEST_F(CliTest, BenchPhaseAOnlyWhenBZero) {
  auto result = run("bench --n 200 --p 50 --m 40 --B 0 --seed 2 --out " + path("bench.txt"));
  EXPECT_EQ(result.exit_code, 0);
  std::string report = slurp(path("bench.txt"));
  EXPECT_NE(report.find("phase_a_statistic_s"), std::string::npos);
  EXPECT_EQ(report.find("phase_b"), std::string::npos);
  EXPECT_EQ(report.find("phase_c"), std::string::npos);
}

TEST_F(CliTest, BenchReportsRatioWhenFeasible) {
  auto result = run("bench --n 300 --p 60 --m 60 --B 4 --seed 2 --workers 2 --out " +
                    path("bench.txt"));
  EXPECT_EQ(result.exit_code, 0);
  std::string report = slurp(path("bench.txt"));
  EXPECT_NE(report.find("phase_b_median_replicate_s"), std::string::npos);
  EXPECT_NE(report.find("phase_c_median_replicate_s"), std::string::npos);
  EXPECT_NE(report.find("classical_over_projected_ratio"), std::string::npos);
}

TEST_F(CliTest, BenchSkipsClassicalAboveMemoryLimit) {
  auto result = run("bench --n 300 --p 60 --m 60 --B 2 --seed 2 --classical-mem-gb 0.0001 --out " +
                    path("bench.txt"));
  EXPECT_EQ(result.exit_code, 0);
  std::string report = slurp(path("bench.txt"));
  EXPECT_NE(report.find("phase_c_skipped"), std::string::npos);
  EXPECT_NE(report.find("not a failure"), std::string::npos);
}

}  // namespace
