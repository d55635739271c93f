#include "aoisched/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "aoisched/bandit_sim.hpp"
#include "aoisched/glr_cucb.hpp"

namespace aoisched {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(RunMode mode) { return mode == RunMode::kBandit ? "bandit" : "fl"; }

const char* to_string(RankingMode mode) {
  switch (mode) {
    case RankingMode::kAuto:
      return "auto";
    case RankingMode::kUcb:
      return "ucb";
    case RankingMode::kMean:
      return "mean";
  }
  return "unknown";
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw std::invalid_argument(field + ": " + message);
}

// Rejects keys outside `known` so that typos do not silently fall back to
// defaults.
void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> known) {
  if (!j.is_object()) fail(where.empty() ? "config" : where, "expected an object");
  for (const auto& item : j.items()) {
    const bool ok = std::any_of(known.begin(), known.end(),
                                [&](const char* k) { return item.key() == k; });
    if (!ok) fail(where.empty() ? item.key() : where + "." + item.key(), "unknown field");
  }
}

template <typename T>
T read(const json& j, const char* key, const std::string& where, T fallback) {
  const std::string field = where.empty() ? key : where + "." + key;
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(field, std::string("wrong type (") + e.what() + ")");
  }
}

ChannelKind parse_kind(const std::string& s) {
  if (s == "stationary") return ChannelKind::kStationary;
  if (s == "piecewise") return ChannelKind::kPiecewiseStationary;
  if (s == "adversarial") return ChannelKind::kAdversarial;
  fail("env.kind", "expected stationary, piecewise or adversarial, got '" + s + "'");
}

RankingMode parse_ranking(const std::string& s, const std::string& field) {
  if (s == "auto") return RankingMode::kAuto;
  if (s == "ucb") return RankingMode::kUcb;
  if (s == "mean") return RankingMode::kMean;
  fail(field, "expected auto, ucb or mean, got '" + s + "'");
}

bool label_char_ok(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
         c == '_' || c == '+' || c == '.';
}

std::string default_label(const VariantConfig& v, RunMode mode) {
  std::string label = v.policy.label();
  if (mode == RunMode::kFl) label += v.matching.enabled ? "-aware" : "-randmatch";
  return label;
}

EnvConfig parse_env(const json& j) {
  check_keys(j, "env",
             {"kind", "channels", "horizon", "breakpoints", "segment_means", "flip_probability",
              "adversarial_seed", "adversarial_csv"});
  EnvConfig env;
  env.kind = parse_kind(read<std::string>(j, "kind", "env", to_string(env.kind)));
  env.channels = read<int>(j, "channels", "env", env.channels);
  env.horizon = read<Round>(j, "horizon", "env", env.horizon);
  env.breakpoints = read<std::vector<Round>>(j, "breakpoints", "env", {});
  env.segment_means = read<std::vector<std::vector<double>>>(j, "segment_means", "env", {});
  env.flip_probability = read<double>(j, "flip_probability", "env", env.flip_probability);
  env.adversarial_seed = read<std::uint64_t>(j, "adversarial_seed", "env", env.adversarial_seed);
  env.adversarial_csv = read<std::string>(j, "adversarial_csv", "env", "");
  return env;
}

VariantConfig parse_variant(const json& j, const std::string& where, Round horizon,
                            RunMode mode) {
  check_keys(j, where, {"label", "policy", "matching"});
  VariantConfig v;
  const json policy = j.value("policy", json::object());
  const std::string pw = where + ".policy";
  check_keys(policy, pw, {"name", "aa", "gamma", "alpha", "delta"});
  const std::string name = read<std::string>(policy, "name", pw, to_string(v.policy.kind));
  try {
    v.policy.kind = parse_policy_kind(name);
  } catch (const std::invalid_argument& e) {
    fail(pw + ".name", e.what());
  }
  v.policy.aoi_aware = read<bool>(policy, "aa", pw, false);
  v.policy.gamma = read<double>(policy, "gamma", pw, v.policy.gamma);
  v.policy.alpha = read<double>(policy, "alpha", pw,
                                horizon >= 1 ? default_exploration_alpha(horizon) : 0.0);
  v.policy.delta = read<double>(policy, "delta", pw, v.policy.delta);

  const json matching = j.value("matching", json::object());
  const std::string mw = where + ".matching";
  check_keys(matching, mw, {"enabled", "beta", "mode"});
  v.matching.enabled = read<bool>(matching, "enabled", mw, v.matching.enabled);
  v.matching.beta = read<double>(matching, "beta", mw, v.matching.beta);
  v.matching.mode =
      parse_ranking(read<std::string>(matching, "mode", mw, "auto"), mw + ".mode");

  v.label = read<std::string>(j, "label", where, default_label(v, mode));
  return v;
}

FlSpec parse_fl(const json& j) {
  check_keys(j, "fl", {"eta", "local_steps", "batch", "dirichlet_alpha", "task"});
  FlSpec fl;
  fl.training.eta = read<double>(j, "eta", "fl", fl.training.eta);
  fl.training.local_steps = read<int>(j, "local_steps", "fl", fl.training.local_steps);
  fl.training.batch = read<int>(j, "batch", "fl", fl.training.batch);
  fl.dirichlet_alpha = read<double>(j, "dirichlet_alpha", "fl", fl.dirichlet_alpha);
  const json task = j.value("task", json::object());
  check_keys(task, "fl.task",
             {"features", "classes", "samples_per_client", "validation_samples", "center_scale",
              "noise", "scale_spread"});
  fl.task.features = read<int>(task, "features", "fl.task", fl.task.features);
  fl.task.classes = read<int>(task, "classes", "fl.task", fl.task.classes);
  fl.task.samples_per_client =
      read<int>(task, "samples_per_client", "fl.task", fl.task.samples_per_client);
  fl.task.validation_samples =
      read<int>(task, "validation_samples", "fl.task", fl.task.validation_samples);
  fl.task.center_scale = read<double>(task, "center_scale", "fl.task", fl.task.center_scale);
  fl.task.noise = read<double>(task, "noise", "fl.task", fl.task.noise);
  fl.task.scale_spread = read<double>(task, "scale_spread", "fl.task", fl.task.scale_spread);
  return fl;
}

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

void append_number(std::string& out, double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  out.append(buf, res.ptr);
}

void append_number(std::string& out, std::int64_t x) { out += std::to_string(x); }

template <typename T>
std::string joined(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    append_number(out, static_cast<std::int64_t>(values[i]));
  }
  return out;
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_header_comment(std::ofstream& out, const char* kind, const ExperimentConfig& config,
                          const std::string& label, std::uint64_t seed) {
  out << "# aoisched " << kind << " v" << kCsvSchemaVersion << " experiment=" << config.name
      << " variant=" << label << " seed=" << seed << '\n';
}

std::string age_columns(int clients) {
  std::string out;
  for (int i = 1; i <= clients; ++i) out += ",a" + std::to_string(i);
  return out;
}

void run_bandit_job(const ExperimentConfig& config, const ChannelEnvironment& env,
                    const VariantConfig& variant, std::uint64_t seed, const fs::path& dir) {
  BanditOptions options;
  options.keep_ages = true;
  options.log_decisions = config.log_decisions;
  const BanditRun run = simulate_bandit(env, variant.policy, config.clients, seed, options);

  auto out = open_csv(dir / run_file_name(RunMode::kBandit, variant.label, seed));
  write_header_comment(out, "regret", config, variant.label, seed);
  out << "round" << age_columns(config.clients) << ",V_t,R\n";
  std::string line;
  for (std::size_t r = 0; r < run.regret.size(); ++r) {
    line.clear();
    append_number(line, static_cast<std::int64_t>(r + 1));
    for (Age a : run.ages[r]) {
      line += ',';
      append_number(line, a);
    }
    line += ',';
    append_number(line, run.variance[r]);
    line += ',';
    append_number(line, run.regret[r]);
    line += '\n';
    out << line;
  }
  if (!out) throw std::runtime_error("write failed for variant " + variant.label);

  if (config.log_decisions) {
    auto log = open_csv(dir / ("decisions_" + variant.label + "_s" + std::to_string(seed) + ".csv"));
    write_header_comment(log, "decisions", config, variant.label, seed);
    log << "round,policy,selected,assignment,rewards,restart\n";
    for (const auto& d : run.decisions) {
      std::vector<int> assigned(d.assignment.channel_of().begin(), d.assignment.channel_of().end());
      log << d.t << ',' << variant.policy.label() << ',' << joined(d.selected) << ','
          << joined(assigned) << ',' << joined(d.rewards) << ',' << (d.restart ? 1 : 0) << '\n';
    }
  }
}

void run_fl_job(const ExperimentConfig& config, const ChannelEnvironment& env,
                const VariantConfig& variant, std::uint64_t seed, const fs::path& dir) {
  FederatedRun run(env, variant.policy, variant.matching, config.fl, config.clients, seed);
  auto out = open_csv(dir / run_file_name(RunMode::kFl, variant.label, seed));
  write_header_comment(out, "metrics", config, variant.label, seed);
  out << "round,loss,accuracy,successes" << age_columns(config.clients) << ",V_t,R\n";

  std::ofstream log;
  if (config.log_decisions) {
    log = open_csv(dir / ("matching_" + variant.label + "_s" + std::to_string(seed) + ".csv"));
    write_header_comment(log, "matching", config, variant.label, seed);
    log << "round,client,age,normalized_age,contribution,priority,channel,zeta\n";
  }

  std::string line;
  {
    const Evaluation& e0 = run.initial_evaluation();
    line = "0,";
    append_number(line, e0.loss);
    line += ',';
    append_number(line, e0.accuracy);
    line += ",0";
    for (Age a : run.ledger().ages()) {
      line += ',';
      append_number(line, a);
    }
    line += ",";
    append_number(line, age_variance(run.ledger().ages()));
    line += ",0\n";
    out << line;
  }
  while (!run.done()) {
    const RoundRecord rec = run.run_round();
    line.clear();
    append_number(line, rec.t);
    line += ',';
    append_number(line, rec.loss);
    line += ',';
    append_number(line, rec.accuracy);
    line += ',';
    append_number(line, static_cast<std::int64_t>(rec.successes));
    for (Age a : rec.ages) {
      line += ',';
      append_number(line, a);
    }
    line += ',';
    append_number(line, rec.variance);
    line += ',';
    append_number(line, rec.regret);
    line += '\n';
    out << line;

    if (log.is_open()) {
      for (int i = 0; i < config.clients; ++i) {
        line.clear();
        append_number(line, rec.t);
        line += ',';
        append_number(line, static_cast<std::int64_t>(i));
        line += ',';
        append_number(line, rec.ages[i]);
        for (const auto* v : {&rec.normalized_ages, &rec.contributions, &rec.priorities}) {
          line += ',';
          if (!v->empty()) append_number(line, (*v)[i]);
        }
        line += ',';
        append_number(line, static_cast<std::int64_t>(rec.assignment.channel(i)));
        line += ',';
        append_number(line, rec.zeta[i]);
        line += '\n';
        log << line;
      }
    }
  }
  if (!out) throw std::runtime_error("write failed for variant " + variant.label);
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  check_keys(j, "",
             {"name", "mode", "clients", "env", "variants", "fl", "seeds", "output",
              "log_decisions"});
  ExperimentConfig c;
  c.name = read<std::string>(j, "name", "", c.name);
  const std::string mode = read<std::string>(j, "mode", "", "bandit");
  if (mode == "bandit") {
    c.mode = RunMode::kBandit;
  } else if (mode == "fl") {
    c.mode = RunMode::kFl;
  } else {
    fail("mode", "expected bandit or fl, got '" + mode + "'");
  }
  c.clients = read<int>(j, "clients", "", c.clients);
  c.env = parse_env(j.value("env", json::object()));

  if (!j.contains("variants") || !j.at("variants").is_array()) {
    fail("variants", "expected a non-empty array");
  }
  const auto& variants = j.at("variants");
  for (std::size_t i = 0; i < variants.size(); ++i) {
    c.variants.push_back(parse_variant(variants[i], "variants[" + std::to_string(i) + "]",
                                       c.env.horizon, c.mode));
  }
  c.fl = parse_fl(j.value("fl", json::object()));
  c.seeds = read<std::vector<std::uint64_t>>(j, "seeds", "", {});
  c.output = read<std::string>(j, "output", "", c.output);
  c.log_decisions = read<bool>(j, "log_decisions", "", false);
  validate(c);
  return c;
}

json to_json(const ExperimentConfig& c) {
  json env = {
      {"kind", to_string(c.env.kind)},
      {"channels", c.env.channels},
      {"horizon", c.env.horizon},
      {"breakpoints", c.env.breakpoints},
      {"segment_means", c.env.segment_means},
      {"flip_probability", c.env.flip_probability},
      {"adversarial_seed", c.env.adversarial_seed},
      {"adversarial_csv", c.env.adversarial_csv},
  };
  json variants = json::array();
  for (const auto& v : c.variants) {
    json policy = {{"name", to_string(v.policy.kind)},
                   {"aa", v.policy.aoi_aware},
                   {"gamma", v.policy.gamma},
                   {"delta", v.policy.delta}};
    policy["alpha"] = v.policy.alpha ? json(*v.policy.alpha) : json(nullptr);
    variants.push_back({{"label", v.label},
                        {"policy", policy},
                        {"matching",
                         {{"enabled", v.matching.enabled},
                          {"beta", v.matching.beta},
                          {"mode", to_string(v.matching.mode)}}}});
  }
  json task = {{"features", c.fl.task.features},
               {"classes", c.fl.task.classes},
               {"samples_per_client", c.fl.task.samples_per_client},
               {"validation_samples", c.fl.task.validation_samples},
               {"center_scale", c.fl.task.center_scale},
               {"noise", c.fl.task.noise},
               {"scale_spread", c.fl.task.scale_spread}};
  json fl = {{"eta", c.fl.training.eta},
             {"local_steps", c.fl.training.local_steps},
             {"batch", c.fl.training.batch},
             {"dirichlet_alpha", c.fl.dirichlet_alpha},
             {"task", task}};
  return {{"name", c.name},         {"mode", to_string(c.mode)}, {"clients", c.clients},
          {"env", env},             {"variants", variants},      {"fl", fl},
          {"seeds", c.seeds},       {"output", c.output},        {"log_decisions", c.log_decisions}};
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void validate(const ExperimentConfig& c) {
  if (c.name.empty()) fail("name", "must not be empty");
  if (c.clients < 1) fail("clients", "must be >= 1");
  const EnvConfig& e = c.env;
  if (e.channels < c.clients) fail("env.channels", "need channels >= clients");
  if (e.horizon < 1) fail("env.horizon", "must be >= 1");
  if (e.kind == ChannelKind::kAdversarial) {
    if (!in_unit(e.flip_probability)) fail("env.flip_probability", "must lie in [0, 1]");
  } else {
    if (e.kind == ChannelKind::kStationary && !e.breakpoints.empty()) {
      fail("env.breakpoints", "stationary channels take no breakpoints");
    }
    if (e.segment_means.size() != e.breakpoints.size() + 1) {
      fail("env.segment_means", "need one row per segment (breakpoints + 1)");
    }
    for (std::size_t s = 0; s < e.segment_means.size(); ++s) {
      const std::string field = "env.segment_means[" + std::to_string(s) + "]";
      if (static_cast<int>(e.segment_means[s].size()) != e.channels) {
        fail(field, "need one mean per channel");
      }
      for (double mu : e.segment_means[s]) {
        if (!in_unit(mu)) fail(field, "means must lie in [0, 1]");
      }
    }
    Round previous = 1;
    for (Round b : e.breakpoints) {
      if (b <= previous || b > e.horizon) {
        fail("env.breakpoints", "must be strictly increasing within (1, horizon]");
      }
      previous = b;
    }
  }

  if (c.variants.empty()) fail("variants", "need at least one variant");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < c.variants.size(); ++i) {
    const auto& v = c.variants[i];
    const std::string where = "variants[" + std::to_string(i) + "]";
    if (v.label.empty() || !std::all_of(v.label.begin(), v.label.end(), label_char_ok)) {
      fail(where + ".label", "must be non-empty and use only [A-Za-z0-9._+-]");
    }
    if (!labels.insert(v.label).second) fail(where + ".label", "duplicate label '" + v.label + "'");
    const auto& p = v.policy;
    if (!(p.gamma > 0.0 && p.gamma <= 1.0)) fail(where + ".policy.gamma", "must lie in (0, 1]");
    if (p.alpha && !in_unit(*p.alpha)) fail(where + ".policy.alpha", "must lie in [0, 1]");
    if (!(p.delta > 0.0 && p.delta < 1.0)) fail(where + ".policy.delta", "must lie in (0, 1)");
    if (p.aoi_aware && p.kind != PolicyKind::kMExp3 && p.kind != PolicyKind::kGlrCucb) {
      fail(where + ".policy.aa", "the AoI-aware wrapper applies to mexp3 and glr-cucb only");
    }
    if (!in_unit(v.matching.beta)) fail(where + ".matching.beta", "must lie in [0, 1]");
    if (v.matching.mode == RankingMode::kUcb && p.kind != PolicyKind::kGlrCucb) {
      fail(where + ".matching.mode", "ucb ranking requires the glr-cucb policy");
    }
  }

  const FlSpec& fl = c.fl;
  if (!(fl.training.eta > 0.0)) fail("fl.eta", "must be > 0");
  if (fl.training.local_steps < 1) fail("fl.local_steps", "must be >= 1");
  if (fl.training.batch < 1) fail("fl.batch", "must be >= 1");
  if (!(fl.dirichlet_alpha > 0.0)) fail("fl.dirichlet_alpha", "must be > 0");
  if (fl.task.features < 1) fail("fl.task.features", "must be >= 1");
  if (fl.task.classes < 2) fail("fl.task.classes", "must be >= 2");
  if (fl.task.samples_per_client < 1) fail("fl.task.samples_per_client", "must be >= 1");
  if (fl.task.validation_samples < 1) fail("fl.task.validation_samples", "must be >= 1");
  if (!(fl.task.noise >= 0.0)) fail("fl.task.noise", "must be >= 0");
  if (!(fl.task.center_scale >= 0.0)) fail("fl.task.center_scale", "must be >= 0");
  if (!(fl.task.scale_spread >= 1.0)) fail("fl.task.scale_spread", "must be >= 1");

  if (c.seeds.empty()) fail("seeds", "need at least one seed");
  if (std::set<std::uint64_t>(c.seeds.begin(), c.seeds.end()).size() != c.seeds.size()) {
    fail("seeds", "seeds must be distinct");
  }
  if (c.output.empty()) fail("output", "must not be empty");
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ChannelEnvironment build_environment(const EnvConfig& e) {
  switch (e.kind) {
    case ChannelKind::kStationary:
      if (e.segment_means.size() != 1) fail("env.segment_means", "stationary needs one row");
      return make_stationary(e.segment_means.front(), e.horizon);
    case ChannelKind::kPiecewiseStationary:
      return make_piecewise(e.channels, e.horizon, e.breakpoints, e.segment_means);
    case ChannelKind::kAdversarial: {
      StateMatrix states = e.adversarial_csv.empty()
                               ? gen_adversarial_flips(e.channels, e.horizon, e.flip_probability,
                                                       e.adversarial_seed)
                               : load_state_matrix_csv(e.adversarial_csv);
      if (states.channels() != e.channels || states.rounds() != e.horizon) {
        fail("env.adversarial_csv", "matrix shape does not match channels x horizon");
      }
      return make_adversarial(std::move(states));
    }
  }
  fail("env.kind", "unsupported");
}

std::string run_file_name(RunMode mode, const std::string& label, std::uint64_t seed) {
  return std::string(mode == RunMode::kBandit ? "regret_" : "metrics_") + label + "_s" +
         std::to_string(seed) + ".csv";
}

ExperimentOutput run_experiment(ExperimentConfig config, const RunOptions& options) {
  if (options.seed_override) config.seeds = {*options.seed_override};
  if (options.output) config.output = options.output->string();
  if (options.bandit_only) config.mode = RunMode::kBandit;
  validate(config);

  const ChannelEnvironment env = build_environment(config.env);
  ExperimentOutput result;
  result.directory = config.output;
  std::error_code ec;
  fs::create_directories(result.directory, ec);
  if (ec || !fs::is_directory(result.directory)) {
    throw std::runtime_error("cannot create output directory " + result.directory.string());
  }

  struct Job {
    const VariantConfig* variant;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& v : config.variants) {
    for (auto seed : config.seeds) {
      jobs.push_back({&v, seed});
      result.files.emplace_back(run_file_name(config.mode, v.label, seed));
    }
  }

  int threads = options.threads > 0 ? options.threads
                                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(jobs.size()));
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        if (config.mode == RunMode::kBandit) {
          run_bandit_job(config, env, *jobs[i].variant, jobs[i].seed, result.directory);
        } else {
          run_fl_job(config, env, *jobs[i].variant, jobs[i].seed, result.directory);
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
  }
  if (error) std::rethrow_exception(error);

  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(config_hash(config)));
  json manifest = {{"schema_version", kCsvSchemaVersion},
                   {"config_hash", hash},
                   {"seeds", config.seeds},
                   {"config", to_json(config)}};
  json files = json::array();
  for (const auto& f : result.files) files.push_back(f.string());
  manifest["files"] = files;
  std::ofstream out(result.directory / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in " + result.directory.string());
  out << manifest.dump(2) << '\n';
  result.files.emplace_back("manifest.json");
  return result;
}

}  // namespace aoisched
