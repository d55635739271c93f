#include "aoisched/presets.hpp"

#include <numeric>
#include <stdexcept>

namespace aoisched {

namespace {

constexpr std::uint64_t kMeansSeed = 20240917;

std::vector<std::uint64_t> seed_range(int count) {
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(count));
  std::iota(seeds.begin(), seeds.end(), 1);
  return seeds;
}

VariantConfig variant(PolicyKind kind, bool aa, Round horizon, bool matching = true) {
  VariantConfig v;
  v.policy.kind = kind;
  v.policy.aoi_aware = aa;
  v.policy.alpha = default_exploration_alpha(horizon);
  v.matching.enabled = matching;
  return v;
}

EnvConfig piecewise(int channels, Round horizon, int breakpoints) {
  EnvConfig env;
  env.kind = breakpoints == 0 ? ChannelKind::kStationary : ChannelKind::kPiecewiseStationary;
  env.channels = channels;
  env.horizon = horizon;
  env.breakpoints = equal_breakpoints(horizon, breakpoints + 1);
  env.segment_means = preset_segment_means(channels, breakpoints + 1);
  return env;
}

ExperimentConfig bandit_base(const std::string& name, EnvConfig env) {
  ExperimentConfig c;
  c.name = name;
  c.mode = RunMode::kBandit;
  c.clients = 2;
  c.env = std::move(env);
  c.seeds = seed_range(10);
  c.output = "runs/" + name;
  return c;
}

ExperimentConfig fl_base(const std::string& name, EnvConfig env, int clients) {
  ExperimentConfig c;
  c.name = name;
  c.mode = RunMode::kFl;
  c.clients = clients;
  c.env = std::move(env);
  c.seeds = seed_range(5);
  c.output = "runs/" + name;
  return c;
}

void label_all(ExperimentConfig& c) {
  for (auto& v : c.variants) {
    v.label = v.policy.label();
    if (c.mode == RunMode::kFl) v.label += v.matching.enabled ? "-aware" : "-randmatch";
  }
}

ExperimentConfig build(const std::string& name) {
  constexpr Round kT = 20000;
  if (name == "fig2a") {
    auto c = bandit_base(name, piecewise(5, kT, 5));
    c.variants = {variant(PolicyKind::kRandom, false, kT), variant(PolicyKind::kMExp3, false, kT),
                  variant(PolicyKind::kMExp3, true, kT), variant(PolicyKind::kGlrCucb, false, kT),
                  variant(PolicyKind::kGlrCucb, true, kT)};
    return c;
  }
  for (int ct : {0, 4, 8, 12}) {
    if (name == "fig2b-ct" + std::to_string(ct)) {
      auto c = bandit_base(name, piecewise(5, kT, ct));
      c.variants = {variant(PolicyKind::kGlrCucb, false, kT)};
      return c;
    }
  }
  for (int n : {4, 5, 6}) {
    if (name == "fig2c-n" + std::to_string(n)) {
      // Nested channel sets: the first n columns of one 6-channel draw.
      auto env = piecewise(6, kT, 5);
      env.channels = n;
      for (auto& row : env.segment_means) row.resize(static_cast<std::size_t>(n));
      auto c = bandit_base(name, std::move(env));
      c.variants = {variant(PolicyKind::kMExp3, false, kT)};
      return c;
    }
  }

  constexpr Round kRounds = 250;
  if (name == "fl-piecewise") {
    auto c = fl_base(name, piecewise(30, kRounds, 2), 20);
    c.variants = {variant(PolicyKind::kGlrCucb, false, kRounds, true),
                  variant(PolicyKind::kGlrCucb, false, kRounds, false),
                  variant(PolicyKind::kGlrCucb, true, kRounds, true),
                  variant(PolicyKind::kRandom, false, kRounds, false)};
    return c;
  }
  if (name == "fl-ceiling") {
    EnvConfig env;
    env.kind = ChannelKind::kStationary;
    env.channels = 30;
    env.horizon = kRounds;
    env.segment_means = {std::vector<double>(30, 1.0)};
    auto c = fl_base(name, std::move(env), 20);
    c.variants = {variant(PolicyKind::kRandom, false, kRounds, false)};
    return c;
  }
  if (name == "fl-adversarial") {
    EnvConfig env;
    env.kind = ChannelKind::kAdversarial;
    env.channels = 6;
    env.horizon = kRounds;
    env.flip_probability = 0.1;
    env.adversarial_seed = 7;
    auto c = fl_base(name, std::move(env), 4);
    c.variants = {variant(PolicyKind::kMExp3, false, kRounds, true),
                  variant(PolicyKind::kRandom, false, kRounds, false)};
    return c;
  }
  if (name == "fl-desk") {
    auto c = fl_base(name, piecewise(6, kRounds, 2), 4);
    c.variants = {variant(PolicyKind::kGlrCucb, false, kRounds, true),
                  variant(PolicyKind::kRandom, false, kRounds, false)};
    return c;
  }
  throw std::invalid_argument("unknown preset '" + name + "' (see `presets list`)");
}

}  // namespace

std::vector<std::vector<double>> preset_segment_means(int n_channels, int segment_count) {
  Rng rng(kMeansSeed);
  return draw_segment_means(n_channels, segment_count, 0.1, 0.9, rng);
}

std::vector<PresetInfo> list_presets() {
  return {
      {"fig2a", "N=5, M=2, T=20000, 5 breakpoints; random, mexp3, glr-cucb and AA variants"},
      {"fig2b-ct0", "glr-cucb, N=5, M=2, T=20000, stationary"},
      {"fig2b-ct4", "glr-cucb, N=5, M=2, T=20000, 4 equal-length breakpoints"},
      {"fig2b-ct8", "glr-cucb, N=5, M=2, T=20000, 8 equal-length breakpoints"},
      {"fig2b-ct12", "glr-cucb, N=5, M=2, T=20000, 12 equal-length breakpoints"},
      {"fig2c-n4", "mexp3, N=4, M=2, T=20000, 5 breakpoints"},
      {"fig2c-n5", "mexp3, N=5, M=2, T=20000, 5 breakpoints"},
      {"fig2c-n6", "mexp3, N=6, M=2, T=20000, 5 breakpoints"},
      {"fl-piecewise", "FL, N=30, M=20, 250 rounds, piecewise channels; aware vs random matching"},
      {"fl-ceiling", "FL, N=30, M=20, 250 rounds, every channel always Good"},
      {"fl-adversarial", "FL, N=6, M=4, 250 rounds, adversarial flip channels"},
      {"fl-desk", "FL smoke run, N=6, M=4, 250 rounds"},
  };
}

ExperimentConfig make_preset(const std::string& name) {
  ExperimentConfig c = build(name);
  label_all(c);
  validate(c);
  return c;
}

}  // namespace aoisched
