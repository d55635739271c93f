#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "aoisched/aoi.hpp"

namespace aoisched {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single value
};

MeanStd mean_std(std::span<const double> values);

// Least-squares slope of log R(t) against log t at `points` log-spaced rounds
// in [from, to] (1-based, curve[t-1] = R(t)). Rounds with R(t) <= 0 are
// skipped; NaN if fewer than two remain.
double loglog_slope(std::span<const double> curve, Round from, Round to, int points = 100);

// Element-wise mean of equally long curves.
std::vector<double> mean_curve(const std::vector<std::vector<double>>& curves);

struct SummaryRow {
  std::string label;
  int seeds = 0;
  MeanStd final_regret;
  MeanStd final_accuracy;  // NaN for bandit runs
  MeanStd cumulative_variance;
  double loglog_slope = 0.0;  // of the seed-averaged regret over the last decade
};

// Reads manifest.json and the per-seed CSVs in `dir`, writes summary.csv
// there and returns one row per variant.
std::vector<SummaryRow> summarize(const std::filesystem::path& dir);

// Columns of one run CSV keyed by header name; '#' lines are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  const std::vector<double>& column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace aoisched
