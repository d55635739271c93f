#pragma once

#include <cstdint>
#include <vector>

#include "aoisched/aoi.hpp"
#include "aoisched/assignment.hpp"
#include "aoisched/env.hpp"
#include "aoisched/scheduler.hpp"

namespace aoisched {

struct DecisionLogEntry {
  Round t = 0;
  std::vector<int> selected;
  Assignment assignment;
  std::vector<std::uint8_t> rewards;  // one per selected channel
  bool restart = false;
};

struct BanditOptions {
  bool keep_ages = false;      // fill BanditRun::ages
  bool log_decisions = false;  // fill BanditRun::decisions
};

struct BanditRun {
  std::vector<Age> regret;  // R(t), t = 1..T
  std::vector<Age> policy_age_sums;
  std::vector<Age> oracle_age_sums;
  std::vector<double> variance;  // V_t under the policy
  AgeTrace ages;                 // policy ages after each round, if kept
  int restarts = 0;
  int forced_explorations = 0;
  int aoi_exploits = 0;
  std::vector<DecisionLogEntry> decisions;

  Age final_regret() const { return regret.empty() ? 0 : regret.back(); }
};

// Runs one policy over the whole horizon, alongside the top-M oracle on the
// same channel draws. Channel states come from stream 1 of `seed`, policy
// randomness from stream 2, so two policies with the same seed face
// identical channels.
BanditRun simulate_bandit(const ChannelEnvironment& env, const PolicySpec& policy, int clients,
                          std::uint64_t seed, BanditOptions options = {});

}  // namespace aoisched
