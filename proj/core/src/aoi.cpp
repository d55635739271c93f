#include "aoisched/aoi.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace aoisched {

double age_variance(std::span<const Age> ages) {
  if (ages.empty()) return 0.0;
  const double mean =
      static_cast<double>(std::accumulate(ages.begin(), ages.end(), Age{0})) / ages.size();
  double v = 0.0;
  for (Age a : ages) {
    const double d = static_cast<double>(a) - mean;
    v += d * d;
  }
  return v;
}

AoiLedger::AoiLedger(int clients) : ages_(static_cast<std::size_t>(clients), 1) {
  if (clients < 1) throw std::invalid_argument("ledger needs at least one client");
}

void AoiLedger::update(std::span<const std::uint8_t> success) {
  if (success.size() != ages_.size()) {
    throw std::invalid_argument("success mask has " + std::to_string(success.size()) +
                                " entries for " + std::to_string(ages_.size()) + " clients");
  }
  for (std::size_t i = 0; i < ages_.size(); ++i) {
    ages_[i] = success[i] ? 1 : ages_[i] + 1;
  }
  ++round_;
  cumulative_age_sum_ += age_total();
  variance_trace_.push_back(age_variance(ages_));
}

void AoiLedger::update_set(std::span<const int> success_set) {
  std::vector<std::uint8_t> mask(ages_.size(), 0);
  for (int i : success_set) {
    if (i < 0 || i >= clients()) throw std::out_of_range("client index out of range");
    mask[i] = 1;
  }
  update(mask);
}

Age AoiLedger::age_total() const { return std::accumulate(ages_.begin(), ages_.end(), Age{0}); }

double AoiLedger::cumulative_variance() const {
  return std::accumulate(variance_trace_.begin(), variance_trace_.end(), 0.0);
}

void RegretAccumulator::record(Age policy_age_total, Age oracle_age_total) {
  policy_.push_back(policy_age_total);
  oracle_.push_back(oracle_age_total);
  const Age previous = curve_.empty() ? 0 : curve_.back();
  curve_.push_back(previous + policy_age_total - oracle_age_total);
}

std::vector<Age> aoi_regret(const AgeTrace& policy_trace, const AgeTrace& oracle_trace) {
  if (policy_trace.size() != oracle_trace.size()) {
    throw std::invalid_argument("policy and oracle traces differ in length");
  }
  RegretAccumulator acc;
  for (std::size_t r = 0; r < policy_trace.size(); ++r) {
    const auto& p = policy_trace[r];
    const auto& o = oracle_trace[r];
    if (p.size() != o.size()) throw std::invalid_argument("policy and oracle traces differ in width");
    acc.record(std::accumulate(p.begin(), p.end(), Age{0}), std::accumulate(o.begin(), o.end(), Age{0}));
  }
  return acc.curve();
}

double expected_aoi_stationary(double mu) {
  if (mu == 0.0) throw std::domain_error("expected AoI diverges for a channel with mean 0");
  if (!(mu > 0.0 && mu <= 1.0)) throw std::invalid_argument("mean must lie in (0, 1]");
  return (1.0 - mu) / mu;
}

UniformAoi mean_aoi_uniform(int clients, int successes_per_round) {
  if (successes_per_round == 0) throw std::domain_error("no successful clients per round");
  if (clients < 1 || successes_per_round < 1 || successes_per_round > clients) {
    throw std::invalid_argument("need 1 <= s <= M");
  }
  const double m = clients;
  const double s = successes_per_round;
  return {m / s, m * m / s};
}

}  // namespace aoisched
