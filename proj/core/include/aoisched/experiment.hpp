#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aoisched/env.hpp"
#include "aoisched/flsim.hpp"
#include "aoisched/scheduler.hpp"

namespace aoisched {

enum class RunMode { kBandit, kFl };

const char* to_string(RunMode mode);
const char* to_string(RankingMode mode);

struct EnvConfig {
  ChannelKind kind = ChannelKind::kPiecewiseStationary;
  int channels = 5;
  Round horizon = 20000;
  std::vector<Round> breakpoints;
  std::vector<std::vector<double>> segment_means;  // one row per segment
  // Adversarial only: replay `adversarial_csv` if set, else generate flips.
  double flip_probability = 0.1;
  std::uint64_t adversarial_seed = 1;
  std::string adversarial_csv;

  bool operator==(const EnvConfig&) const = default;
};

struct VariantConfig {
  std::string label;
  PolicySpec policy;
  MatchingSpec matching;

  bool operator==(const VariantConfig&) const = default;
};

struct ExperimentConfig {
  std::string name = "experiment";
  RunMode mode = RunMode::kBandit;
  int clients = 2;  // M
  EnvConfig env;
  std::vector<VariantConfig> variants;
  FlSpec fl;
  std::vector<std::uint64_t> seeds;
  std::string output = "runs";
  bool log_decisions = false;

  bool operator==(const ExperimentConfig&) const = default;
};

// Parsing fills every default explicitly (including alpha, resolved against
// the horizon), so serializing the result is self-contained. Errors are
// std::invalid_argument naming the offending field.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);
void validate(const ExperimentConfig& config);

// FNV-1a over the canonical JSON dump.
std::uint64_t config_hash(const ExperimentConfig& config);

ChannelEnvironment build_environment(const EnvConfig& env);

struct RunOptions {
  std::optional<std::uint64_t> seed_override;
  std::optional<std::filesystem::path> output;
  bool bandit_only = false;
  int threads = 0;  // 0: hardware concurrency
};

struct ExperimentOutput {
  std::filesystem::path directory;
  std::vector<std::filesystem::path> files;  // relative to directory
};

// Runs every (variant, seed) pair and writes one CSV per pair plus
// manifest.json. Pairs run in parallel; each writes only its own files.
ExperimentOutput run_experiment(ExperimentConfig config, const RunOptions& options = {});

// Deterministic per-run file name, e.g. "regret_glr-cucb_s3.csv".
std::string run_file_name(RunMode mode, const std::string& label, std::uint64_t seed);

inline constexpr int kCsvSchemaVersion = 1;

}  // namespace aoisched
