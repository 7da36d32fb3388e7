#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "specboot/adaptive.hpp"
#include "specboot/bootstrap.hpp"
#include "specboot/lw.hpp"

namespace specboot {

/// Key = value pairs echoed into output headers. Ordered map so the echo is
/// byte-stable.
using ConfigEcho = std::map<std::string, std::string>;

/// Matrix CSV: header-free, one observation per line, comma-separated decimal
/// text. Values are printed with 17 significant digits so files round-trip
/// bit-exactly.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& values);
Eigen::MatrixXd read_matrix_csv(const std::string& path);

/// Bootstrap run as line-delimited JSON: one header record (config echo, q,
/// seeds), then one record per replicate with eigenvalues and LSS values.
void write_run_records(const std::string& path, const BootstrapRun& run,
                       const ConfigEcho& echo = {});
BootstrapRun read_run_records(const std::string& path);

/// Single test result as one JSON record. Wall-clock timings are reported on
/// the side channel (stderr / bench reports), never in result files, so the
/// same seed always produces byte-identical output.
void write_test_record(const std::string& path, const TestResult& result,
                       const ConfigEcho& echo = {});
TestResult read_test_record(const std::string& path);

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  double density = 0.0;
};

/// Density histogram. bins == 0 selects the Freedman-Diaconis count.
std::vector<HistogramBin> histogram_density(std::vector<double> values, int bins = 0);

/// CSV with columns bin_left,bin_right,density. '#' lines carry the config echo.
void write_histogram_csv(const std::string& path, const std::vector<HistogramBin>& bins,
                         const ConfigEcho& echo = {});
std::vector<HistogramBin> read_histogram_csv(const std::string& path, ConfigEcho* echo = nullptr);

/// Two-column CSV x,density.
void write_density_csv(const std::string& path, const std::vector<double>& xs,
                       const std::vector<double>& densities, const ConfigEcho& echo = {});
std::pair<std::vector<double>, std::vector<double>> read_density_csv(const std::string& path,
                                                                     ConfigEcho* echo = nullptr);

struct TableRow {
  std::string rule;
  double r_over_p = 0.0;
  double rate = 0.0;
  double se = 0.0;
  double mean_runtime_s = 0.0;
};

/// CSV with columns rule,r_over_p,rate,se,mean_runtime_s (Tables 1-2 layout).
void write_table_csv(const std::string& path, const std::vector<TableRow>& rows,
                     const ConfigEcho& echo = {});
std::vector<TableRow> read_table_csv(const std::string& path, ConfigEcho* echo = nullptr);

/// CSV with columns j,m_j,q_j,d_consecutive,d_rowsum.
void write_ladder_csv(const std::string& path, const std::vector<LadderDiagnosticsRow>& rows,
                      const ConfigEcho& echo = {});
std::vector<LadderDiagnosticsRow> read_ladder_csv(const std::string& path,
                                                  ConfigEcho* echo = nullptr);

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

}  // namespace specboot
