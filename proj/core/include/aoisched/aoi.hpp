#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aoisched/env.hpp"

namespace aoisched {

using Age = std::int64_t;

// Per-round client ages, one row per round (row r holds a(r+1)).
using AgeTrace = std::vector<std::vector<Age>>;

// Sum of squared deviations of the ages from their mean.
double age_variance(std::span<const Age> ages);

// Age of Information per client. All ages start at 1 (round 0); each update
// resets successful clients to 1 and increments everyone else.
class AoiLedger {
 public:
  explicit AoiLedger(int clients);

  // success[i] != 0 iff client i delivered its update this round.
  void update(std::span<const std::uint8_t> success);
  void update_set(std::span<const int> success_set);

  int clients() const { return static_cast<int>(ages_.size()); }
  std::span<const Age> ages() const { return ages_; }
  Age age(int client) const { return ages_[client]; }
  Round round() const { return round_; }
  Age age_total() const;
  Age cumulative_age_sum() const { return cumulative_age_sum_; }
  const std::vector<double>& variance_trace() const { return variance_trace_; }
  double cumulative_variance() const;

 private:
  std::vector<Age> ages_;
  Round round_ = 0;
  Age cumulative_age_sum_ = 0;
  std::vector<double> variance_trace_;
};

// Running AoI regret: entry t-1 holds R(t) = sum over rounds <= t of
// (policy age total - oracle age total).
class RegretAccumulator {
 public:
  void record(Age policy_age_total, Age oracle_age_total);

  const std::vector<Age>& curve() const { return curve_; }
  const std::vector<Age>& policy_age_sums() const { return policy_; }
  const std::vector<Age>& oracle_age_sums() const { return oracle_; }
  Age final_regret() const { return curve_.empty() ? 0 : curve_.back(); }

 private:
  std::vector<Age> policy_;
  std::vector<Age> oracle_;
  std::vector<Age> curve_;
};

std::vector<Age> aoi_regret(const AgeTrace& policy_trace, const AgeTrace& oracle_trace);

// Expected staleness sum_{tau>=0} prod_{k<=tau} (1 - mu) = (1 - mu) / mu for a
// client served by a constant-mean channel. This counts failed rounds since
// the last success, i.e. the ledger age minus one.
double expected_aoi_stationary(double mu);

struct UniformAoi {
  double per_client;  // M / s
  double total;       // M^2 / s
};

// Expected ages when s of the M clients, chosen uniformly, succeed each round.
UniformAoi mean_aoi_uniform(int clients, int successes_per_round);

}  // namespace aoisched
