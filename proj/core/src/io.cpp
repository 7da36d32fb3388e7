#include "specboot/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "specboot/errors.hpp"

namespace specboot {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open for reading: " + path);
  return in;
}

void write_echo_comments(std::ofstream& out, const ConfigEcho& echo) {
  for (const auto& [key, value] : echo) out << "# " << key << " = " << value << "\n";
}

/// Shared CSV-with-echo reader: collects '# key = value' comments, checks the
/// header line, splits the remaining rows into cells.
std::vector<std::vector<std::string>> read_csv_body(const std::string& path,
                                                    const std::string& expected_header,
                                                    ConfigEcho* echo) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (echo != nullptr) {
        auto eq = line.find('=');
        if (eq != std::string::npos && line.size() > 2) {
          std::string key = line.substr(2, eq - 3);
          (*echo)[key] = line.substr(eq + 2);
        }
      }
      continue;
    }
    if (!header_seen) {
      if (line != expected_header)
        throw DomainError("unexpected CSV header in " + path + ": " + line);
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  if (!header_seen) throw DomainError("missing CSV header in " + path);
  return rows;
}

ProjectionKind projection_kind_from_name(const std::string& name) {
  if (name == "uniform") return ProjectionKind::kUniformCoordinates;
  if (name == "consecutive") return ProjectionKind::kConsecutiveBlockRandomStart;
  if (name == "block") return ProjectionKind::kBlockPreserving;
  if (name == "firstq") return ProjectionKind::kFirstQ;
  throw DomainError("unknown projection strategy: " + name);
}

std::string projection_kind_name(ProjectionKind kind) {
  switch (kind) {
    case ProjectionKind::kUniformCoordinates:
      return "uniform";
    case ProjectionKind::kConsecutiveBlockRandomStart:
      return "consecutive";
    case ProjectionKind::kBlockPreserving:
      return "block";
    case ProjectionKind::kFirstQ:
      return "firstq";
  }
  throw DomainError("unknown projection strategy");
}

}  // namespace

std::string format_double(double value) {
  char buffer[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buffer, sizeof(buffer), "%.*g", precision, value);
    if (std::strtod(buffer, nullptr) == value) break;
  }
  return buffer;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& values) {
  std::ofstream out = open_out(path);
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(values(i, j));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw DomainError("read_matrix_csv: ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DomainError("read_matrix_csv: empty file " + path);
  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return values;
}

void write_run_records(const std::string& path, const BootstrapRun& run,
                       const ConfigEcho& echo) {
  std::ofstream out = open_out(path);
  json header;
  header["record"] = "header";
  header["n"] = run.n;
  header["p"] = run.p;
  header["m"] = run.m;
  header["q"] = run.q;
  header["B"] = run.B;
  header["strategy"] = projection_kind_name(run.strategy.kind);
  header["block_size"] = run.strategy.block_size;
  header["projection_resample"] =
      run.resample == ProjectionResample::kPerReplicate ? "per-replicate" : "per-run";
  header["seed"] = run.seed;
  json fs = json::array();
  for (const auto& f : run.f_list) fs.push_back(f.coeffs());
  header["f_list"] = fs;
  json cfg = json::object();
  for (const auto& [key, value] : echo) cfg[key] = value;
  header["config"] = cfg;
  out << header.dump() << '\n';

  for (std::size_t b = 0; b < run.replicates.size(); ++b) {
    json rec;
    rec["record"] = "replicate";
    rec["index"] = b + 1;
    rec["eigenvalues"] = run.replicates[b].eigenvalues;
    rec["lss"] = run.replicates[b].lss_values;
    out << rec.dump() << '\n';
  }
}

BootstrapRun read_run_records(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw DomainError("read_run_records: empty file " + path);
  json header = json::parse(line);
  if (header.value("record", "") != "header")
    throw DomainError("read_run_records: missing header record in " + path);

  BootstrapRun run;
  run.n = header.at("n").get<int>();
  run.p = header.at("p").get<int>();
  run.m = header.at("m").get<int>();
  run.q = header.at("q").get<int>();
  run.B = header.at("B").get<int>();
  run.strategy.kind = projection_kind_from_name(header.at("strategy").get<std::string>());
  run.strategy.block_size = header.value("block_size", 0);
  run.resample = header.at("projection_resample").get<std::string>() == "per-run"
                     ? ProjectionResample::kPerRun
                     : ProjectionResample::kPerReplicate;
  run.seed = header.at("seed").get<std::uint64_t>();
  for (const auto& coeffs : header.at("f_list"))
    run.f_list.emplace_back(coeffs.get<std::vector<double>>());

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line);
    if (rec.value("record", "") != "replicate")
      throw DomainError("read_run_records: unexpected record in " + path);
    ReplicateRecord replicate;
    replicate.eigenvalues = rec.at("eigenvalues").get<std::vector<double>>();
    replicate.lss_values = rec.at("lss").get<std::vector<double>>();
    run.replicates.push_back(std::move(replicate));
  }
  if (static_cast<int>(run.replicates.size()) != run.B)
    throw DomainError("read_run_records: replicate count does not match header in " + path);
  run.replicate_seconds.assign(run.replicates.size(), 0.0);
  return run;
}

void write_test_record(const std::string& path, const TestResult& result,
                       const ConfigEcho& echo) {
  std::ofstream out = open_out(path);
  json rec;
  rec["record"] = "identity_test";
  rec["statistic"] = result.statistic;
  rec["centering"] = result.centering;
  rec["quantile"] = result.quantile;
  rec["alpha"] = result.alpha;
  rec["chosen_m"] = result.chosen_m;
  rec["chosen_q"] = result.chosen_q;
  rec["reject"] = result.reject;
  rec["bias_correction"] = result.bias_correction;
  rec["samples"] = result.samples;
  json cfg = json::object();
  for (const auto& [key, value] : echo) cfg[key] = value;
  rec["config"] = cfg;
  out << rec.dump() << '\n';
}

TestResult read_test_record(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw DomainError("read_test_record: empty file " + path);
  json rec = json::parse(line);
  if (rec.value("record", "") != "identity_test")
    throw DomainError("read_test_record: not a test record: " + path);
  TestResult result;
  result.statistic = rec.at("statistic").get<double>();
  result.centering = rec.at("centering").get<double>();
  result.quantile = rec.at("quantile").get<double>();
  result.alpha = rec.at("alpha").get<double>();
  result.chosen_m = rec.at("chosen_m").get<int>();
  result.chosen_q = rec.at("chosen_q").get<int>();
  result.reject = rec.at("reject").get<bool>();
  result.bias_correction = rec.at("bias_correction").get<double>();
  result.samples = rec.at("samples").get<std::vector<double>>();
  return result;
}

std::vector<HistogramBin> histogram_density(std::vector<double> values, int bins) {
  if (values.empty()) throw DomainError("histogram_density: empty sample");
  std::sort(values.begin(), values.end());
  const double lo = values.front();
  const double hi = values.back();
  const auto count = static_cast<double>(values.size());

  if (bins <= 0) {
    // Freedman-Diaconis: width 2 IQR n^{-1/3}.
    auto quantile_at = [&](double q) {
      double pos = q * (count - 1.0);
      auto idx = static_cast<std::size_t>(pos);
      double frac = pos - static_cast<double>(idx);
      if (idx + 1 >= values.size()) return values.back();
      return values[idx] * (1.0 - frac) + values[idx + 1] * frac;
    };
    double iqr = quantile_at(0.75) - quantile_at(0.25);
    double width = 2.0 * iqr / std::cbrt(count);
    if (width <= 0.0 || hi <= lo) {
      bins = 1;
    } else {
      bins = std::clamp(static_cast<int>(std::ceil((hi - lo) / width)), 1, 4096);
    }
  }

  std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
  double span = hi > lo ? hi - lo : 1.0;
  double width = span / bins;
  for (int b = 0; b < bins; ++b) {
    out[static_cast<std::size_t>(b)].left = lo + b * width;
    out[static_cast<std::size_t>(b)].right = lo + (b + 1) * width;
  }
  for (double v : values) {
    auto b = static_cast<int>((v - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    out[static_cast<std::size_t>(b)].density += 1.0;
  }
  for (auto& bin : out) bin.density /= count * width;
  return out;
}

void write_histogram_csv(const std::string& path, const std::vector<HistogramBin>& bins,
                         const ConfigEcho& echo) {
  std::ofstream out = open_out(path);
  write_echo_comments(out, echo);
  out << "bin_left,bin_right,density\n";
  for (const auto& bin : bins) {
    out << format_double(bin.left) << ',' << format_double(bin.right) << ','
        << format_double(bin.density) << '\n';
  }
}

std::vector<HistogramBin> read_histogram_csv(const std::string& path, ConfigEcho* echo) {
  auto rows = read_csv_body(path, "bin_left,bin_right,density", echo);
  std::vector<HistogramBin> bins;
  bins.reserve(rows.size());
  for (const auto& cells : rows) {
    if (cells.size() != 3) throw DomainError("malformed histogram row in " + path);
    bins.push_back({std::stod(cells[0]), std::stod(cells[1]), std::stod(cells[2])});
  }
  return bins;
}

void write_density_csv(const std::string& path, const std::vector<double>& xs,
                       const std::vector<double>& densities, const ConfigEcho& echo) {
  if (xs.size() != densities.size()) throw DomainError("write_density_csv: length mismatch");
  std::ofstream out = open_out(path);
  write_echo_comments(out, echo);
  out << "x,density\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    out << format_double(xs[i]) << ',' << format_double(densities[i]) << '\n';
}

std::pair<std::vector<double>, std::vector<double>> read_density_csv(const std::string& path,
                                                                     ConfigEcho* echo) {
  auto rows = read_csv_body(path, "x,density", echo);
  std::pair<std::vector<double>, std::vector<double>> curve;
  for (const auto& cells : rows) {
    if (cells.size() != 2) throw DomainError("malformed density row in " + path);
    curve.first.push_back(std::stod(cells[0]));
    curve.second.push_back(std::stod(cells[1]));
  }
  return curve;
}

void write_table_csv(const std::string& path, const std::vector<TableRow>& rows,
                     const ConfigEcho& echo) {
  std::ofstream out = open_out(path);
  write_echo_comments(out, echo);
  out << "rule,r_over_p,rate,se,mean_runtime_s\n";
  for (const auto& row : rows) {
    out << row.rule << ',' << format_double(row.r_over_p) << ',' << format_double(row.rate)
        << ',' << format_double(row.se) << ',' << format_double(row.mean_runtime_s) << '\n';
  }
}

std::vector<TableRow> read_table_csv(const std::string& path, ConfigEcho* echo) {
  auto body = read_csv_body(path, "rule,r_over_p,rate,se,mean_runtime_s", echo);
  std::vector<TableRow> rows;
  rows.reserve(body.size());
  for (const auto& cells : body) {
    if (cells.size() != 5) throw DomainError("malformed table row in " + path);
    rows.push_back({cells[0], std::stod(cells[1]), std::stod(cells[2]), std::stod(cells[3]),
                    std::stod(cells[4])});
  }
  return rows;
}

void write_ladder_csv(const std::string& path, const std::vector<LadderDiagnosticsRow>& rows,
                      const ConfigEcho& echo) {
  std::ofstream out = open_out(path);
  write_echo_comments(out, echo);
  out << "j,m_j,q_j,d_consecutive,d_rowsum\n";
  for (const auto& row : rows) {
    out << row.j << ',' << row.m << ',' << row.q << ',' << format_double(row.d_consecutive)
        << ',' << format_double(row.d_rowsum) << '\n';
  }
}

std::vector<LadderDiagnosticsRow> read_ladder_csv(const std::string& path, ConfigEcho* echo) {
  auto body = read_csv_body(path, "j,m_j,q_j,d_consecutive,d_rowsum", echo);
  std::vector<LadderDiagnosticsRow> rows;
  rows.reserve(body.size());
  for (const auto& cells : body) {
    if (cells.size() != 5) throw DomainError("malformed ladder row in " + path);
    rows.push_back({std::stoi(cells[0]), std::stoi(cells[1]), std::stoi(cells[2]),
                    std::stod(cells[3]), std::stod(cells[4])});
  }
  return rows;
}

}  // namespace specboot
