#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "aoisched/bandit_sim.hpp"
#include "aoisched/experiment.hpp"
#include "aoisched/presets.hpp"
#include "aoisched/summary.hpp"

namespace aoisched {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("aoisched_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json small_bandit_json() {
  return nlohmann::json::parse(R"({
    "name": "small",
    "mode": "bandit",
    "clients": 2,
    "env": {"kind": "piecewise", "channels": 3, "horizon": 300, "breakpoints": [151],
            "segment_means": [[0.8, 0.5, 0.2], [0.2, 0.5, 0.8]]},
    "variants": [{"policy": {"name": "glr-cucb"}}, {"policy": {"name": "mexp3", "aa": true}},
                 {"policy": {"name": "random"}}],
    "seeds": [1, 2]
  })");
}

std::string error_of(const nlohmann::json& j) {
  try {
    config_from_json(j);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

TEST(Config, DefaultsAndRoundTrip) {
  const auto c = config_from_json(small_bandit_json());
  EXPECT_EQ(c.variants.size(), 3u);
  EXPECT_EQ(c.variants[0].label, "glr-cucb");
  EXPECT_EQ(c.variants[1].label, "aa-mexp3");
  ASSERT_TRUE(c.variants[0].policy.alpha.has_value());
  EXPECT_DOUBLE_EQ(*c.variants[0].policy.alpha, default_exploration_alpha(300));
  EXPECT_EQ(config_from_json(to_json(c)), c);
  EXPECT_EQ(config_hash(c), config_hash(config_from_json(to_json(c))));
  auto other = c;
  other.seeds.push_back(3);
  EXPECT_NE(config_hash(c), config_hash(other));
}

TEST(Config, ErrorsNameTheField) {
  auto j = small_bandit_json();
  j["env"]["chanels"] = 3;
  EXPECT_NE(error_of(j).find("env.chanels"), std::string::npos);

  j = small_bandit_json();
  j["env"]["segment_means"][1] = {0.2, 1.5, 0.8};
  EXPECT_NE(error_of(j).find("env.segment_means[1]"), std::string::npos);

  j = small_bandit_json();
  j["variants"][0]["policy"]["gamma"] = "high";
  EXPECT_NE(error_of(j).find("variants[0].policy.gamma"), std::string::npos);

  j = small_bandit_json();
  j["variants"][2]["policy"]["aa"] = true;
  EXPECT_NE(error_of(j).find("variants[2].policy.aa"), std::string::npos);

  j = small_bandit_json();
  j["clients"] = 4;
  EXPECT_NE(error_of(j).find("env.channels"), std::string::npos);

  j = small_bandit_json();
  j["seeds"] = nlohmann::json::array();
  EXPECT_NE(error_of(j).find("seeds"), std::string::npos);

  j = small_bandit_json();
  j["mode"] = "fast";
  EXPECT_NE(error_of(j).find("mode"), std::string::npos);
}

TEST(Config, LoadWithComments) {
  const auto dir = scratch_dir("load");
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "c.json");
    out << "// experiment\n" << small_bandit_json().dump(2) << '\n';
  }
  EXPECT_EQ(load_config(dir / "c.json").name, "small");
  EXPECT_THROW(load_config(dir / "missing.json"), std::runtime_error);
}

TEST(Presets, AllValidAndRoundTrip) {
  for (const auto& p : list_presets()) {
    const auto c = make_preset(p.name);
    EXPECT_NO_THROW(validate(c)) << p.name;
    EXPECT_EQ(config_from_json(to_json(c)), c) << p.name;
    EXPECT_NO_THROW(build_environment(c.env)) << p.name;
  }
  EXPECT_THROW(make_preset("nope"), std::invalid_argument);
  const auto n6 = make_preset("fig2c-n6").env.segment_means;
  const auto n4 = make_preset("fig2c-n4").env.segment_means;
  for (std::size_t s = 0; s < n4.size(); ++s) {
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(n4[s][k], n6[s][k]);
  }
}

TEST(RunExperiment, ByteIdenticalReruns) {
  auto c = config_from_json(small_bandit_json());
  c.log_decisions = true;
  const auto a = run_experiment(c, {std::nullopt, scratch_dir("rerun_a"), false, 2});
  const auto b = run_experiment(c, {std::nullopt, scratch_dir("rerun_b"), false, 1});
  ASSERT_EQ(a.files, b.files);
  for (const auto& f : a.files) {
    if (f == "manifest.json") continue;
    EXPECT_EQ(slurp(a.directory / f), slurp(b.directory / f)) << f;
  }
  const auto csv = read_csv(a.directory / run_file_name(RunMode::kBandit, "glr-cucb", 1));
  EXPECT_EQ(csv.header, (std::vector<std::string>{"round", "a1", "a2", "V_t", "R"}));
  EXPECT_EQ(csv.column("round").size(), 300u);
  EXPECT_TRUE(fs::exists(a.directory / "decisions_glr-cucb_s1.csv"));
  const auto manifest = nlohmann::json::parse(slurp(a.directory / "manifest.json"));
  EXPECT_EQ(manifest["schema_version"], kCsvSchemaVersion);
  auto recorded = c;
  recorded.output = a.directory.string();
  EXPECT_EQ(config_from_json(manifest["config"]), recorded);
}

TEST(RunExperiment, CsvMatchesDirectSimulation) {
  const auto c = config_from_json(small_bandit_json());
  const auto out = run_experiment(c, {2, scratch_dir("direct"), false, 1});
  const auto env = build_environment(c.env);
  const auto run = simulate_bandit(env, c.variants[0].policy, 2, 2);
  const auto csv = read_csv(out.directory / "regret_glr-cucb_s2.csv");
  const auto& r = csv.column("R");
  ASSERT_EQ(r.size(), run.regret.size());
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_EQ(r[i], static_cast<double>(run.regret[i]));
}

TEST(Summarize, SingleSeedHasZeroStd) {
  const auto c = config_from_json(small_bandit_json());
  const auto out = run_experiment(c, {5, scratch_dir("summary"), false, 1});
  const auto rows = summarize(out.directory);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& row : rows) {
    EXPECT_EQ(row.seeds, 1);
    EXPECT_EQ(row.final_regret.std, 0.0);
    EXPECT_TRUE(std::isnan(row.final_accuracy.mean));
  }
  EXPECT_TRUE(fs::exists(out.directory / "summary.csv"));
}

TEST(Summarize, MeanStdAndSlope) {
  const std::vector<double> v{1, 2, 3, 4};
  const auto ms = mean_std(v);
  EXPECT_DOUBLE_EQ(ms.mean, 2.5);
  EXPECT_NEAR(ms.std, std::sqrt(5.0 / 3), 1e-15);
  std::vector<double> linear(1000), root(1000);
  for (int t = 1; t <= 1000; ++t) {
    linear[t - 1] = 3.0 * t;
    root[t - 1] = std::sqrt(t);
  }
  EXPECT_NEAR(loglog_slope(linear, 100, 1000), 1.0, 1e-9);
  EXPECT_NEAR(loglog_slope(root, 100, 1000), 0.5, 1e-3);
  EXPECT_TRUE(std::isnan(loglog_slope(std::vector<double>(1000, 0.0), 100, 1000)));
  EXPECT_EQ(mean_curve({{1, 2}, {3, 6}}), (std::vector<double>{2, 4}));
}

TEST(RunExperiment, FlMetricsFile) {
  auto c = make_preset("fl-desk");
  c.env.horizon = 20;
  c.env.breakpoints = {8, 15};
  c.fl.task.samples_per_client = 40;
  c.fl.task.validation_samples = 100;
  c.seeds = {1};
  c.log_decisions = true;
  const auto out = run_experiment(c, {std::nullopt, scratch_dir("fl"), false, 1});
  const auto csv = read_csv(out.directory / run_file_name(RunMode::kFl, c.variants[0].label, 1));
  EXPECT_EQ(csv.column("round").size(), 21u);
  EXPECT_EQ(csv.column("round").front(), 0.0);
  const auto rows = summarize(out.directory);
  for (const auto& row : rows) EXPECT_FALSE(std::isnan(row.final_accuracy.mean));

  const auto bandit = run_experiment(c, {std::nullopt, scratch_dir("fl_bandit"), true, 1});
  EXPECT_TRUE(fs::exists(bandit.directory / run_file_name(RunMode::kBandit, c.variants[0].label, 1)));
}

}  // namespace
}  // namespace aoisched
