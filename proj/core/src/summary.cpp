#include "aoisched/summary.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace aoisched {

namespace fs = std::filesystem;

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return {std::nan(""), std::nan("")};
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

double loglog_slope(std::span<const double> curve, Round from, Round to, int points) {
  if (from < 1 || to > static_cast<Round>(curve.size()) || from >= to || points < 2) {
    throw std::invalid_argument("slope window outside the curve");
  }
  std::vector<Round> rounds;
  const double lo = std::log(static_cast<double>(from));
  const double hi = std::log(static_cast<double>(to));
  for (int i = 0; i < points; ++i) {
    const auto t = static_cast<Round>(std::llround(std::exp(lo + (hi - lo) * i / (points - 1))));
    if (rounds.empty() || rounds.back() != t) rounds.push_back(t);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (Round t : rounds) {
    const double r = curve[static_cast<std::size_t>(t - 1)];
    if (!(r > 0.0)) continue;
    const double x = std::log(static_cast<double>(t));
    const double y = std::log(r);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double denom = n * sxx - sx * sx;
  return (n * sxy - sx * sy) / denom;
}

std::vector<double> mean_curve(const std::vector<std::vector<double>>& curves) {
  if (curves.empty()) return {};
  std::vector<double> out(curves.front().size(), 0.0);
  for (const auto& c : curves) {
    if (c.size() != out.size()) throw std::invalid_argument("curves differ in length");
    for (std::size_t i = 0; i < c.size(); ++i) out[i] += c[i];
  }
  for (double& v : out) v /= static_cast<double>(curves.size());
  return out;
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return columns[i];
  }
  throw std::out_of_range("no column '" + name + "'");
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing file " + path.string());
  CsvTable table;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (table.header.empty()) {
      table.header = cells;
      table.columns.resize(cells.size());
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw std::runtime_error(path.string() + ": ragged row");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      table.columns[i].push_back(cells[i].empty() ? std::nan("") : std::stod(cells[i]));
    }
  }
  if (table.header.empty()) throw std::runtime_error(path.string() + ": no header");
  return table;
}

std::vector<SummaryRow> summarize(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw std::runtime_error("missing manifest.json in " + dir.string());
  const auto manifest = nlohmann::json::parse(in);
  const auto& config = manifest.at("config");
  const bool fl = config.at("mode").get<std::string>() == "fl";
  const auto seeds = manifest.at("seeds").get<std::vector<std::uint64_t>>();

  std::vector<SummaryRow> rows;
  for (const auto& variant : config.at("variants")) {
    SummaryRow row;
    row.label = variant.at("label").get<std::string>();
    std::vector<double> regret, accuracy, variance;
    std::vector<std::vector<double>> curves;
    for (auto seed : seeds) {
      const std::string file = std::string(fl ? "metrics_" : "regret_") + row.label + "_s" +
                               std::to_string(seed) + ".csv";
      const CsvTable table = read_csv(dir / file);
      auto r = table.column("R");
      const auto& v = table.column("V_t");
      if (fl) {
        // Row 0 is the initial evaluation, not a round.
        accuracy.push_back(table.column("accuracy").back());
        r.erase(r.begin());
        double cum = 0.0;
        for (std::size_t i = 1; i < v.size(); ++i) cum += v[i];
        variance.push_back(cum);
      } else {
        double cum = 0.0;
        for (double x : v) cum += x;
        variance.push_back(cum);
      }
      regret.push_back(r.back());
      curves.push_back(std::move(r));
    }
    row.seeds = static_cast<int>(seeds.size());
    row.final_regret = mean_std(regret);
    row.final_accuracy = fl ? mean_std(accuracy)
                            : MeanStd{std::nan(""), std::nan("")};
    row.cumulative_variance = mean_std(variance);
    const auto avg = mean_curve(curves);
    const auto horizon = static_cast<Round>(avg.size());
    row.loglog_slope = horizon >= 20 ? loglog_slope(avg, std::max<Round>(1, horizon / 10), horizon)
                                     : std::nan("");
    rows.push_back(std::move(row));
  }

  std::ofstream out(dir / "summary.csv");
  if (!out) throw std::runtime_error("cannot write summary.csv in " + dir.string());
  out << "# aoisched summary v1\n"
      << "label,seeds,final_regret_mean,final_regret_std,final_accuracy_mean,final_accuracy_std,"
         "cum_variance_mean,cum_variance_std,loglog_slope\n";
  for (const auto& r : rows) {
    out << r.label << ',' << r.seeds << ',' << r.final_regret.mean << ',' << r.final_regret.std
        << ',' << r.final_accuracy.mean << ',' << r.final_accuracy.std << ','
        << r.cumulative_variance.mean << ',' << r.cumulative_variance.std << ','
        << r.loglog_slope << '\n';
  }
  return rows;
}

}  // namespace aoisched
