#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "aoisched/aoi.hpp"
#include "aoisched/env.hpp"
#include "aoisched/match.hpp"
#include "aoisched/scheduler.hpp"
#include "aoisched/task.hpp"

namespace aoisched {

struct LocalTraining {
  double eta = 0.1;     // learning rate
  int local_steps = 2;  // E
  int batch = 32;       // |xi|

  bool operator==(const LocalTraining&) const = default;
};

// Mini-batches drawn without replacement, reshuffling the shard when it runs
// out.
class BatchSampler {
 public:
  BatchSampler(std::vector<std::size_t> rows, std::uint64_t seed);
  std::vector<std::size_t> next(std::size_t batch);
  std::size_t size() const { return rows_.size(); }

 private:
  std::vector<std::size_t> rows_;
  std::size_t cursor_ = 0;
  Rng rng_;
};

// (start - end) / eta.
std::vector<double> cumulative_update(std::span<const double> start, std::span<const double> end,
                                      double eta);

class Client {
 public:
  Client(int id, std::vector<std::size_t> shard, std::size_t params, std::uint64_t seed);

  // E SGD steps from the global model; refreshes the cumulative update.
  void local_sgd(std::span<const double> global_model, const Dataset& train,
                 const LocalTraining& training);

  int id() const { return id_; }
  const std::vector<std::size_t>& shard() const { return shard_; }
  std::span<const double> update() const { return update_; }  // G~
  std::span<const double> local_model() const { return local_model_; }
  int trainings() const { return trainings_; }

 private:
  int id_;
  std::vector<std::size_t> shard_;
  BatchSampler sampler_;
  std::vector<double> update_;
  std::vector<double> local_model_;
  int trainings_ = 0;
};

// w <- w - eta * sum_{i in S} zeta_i G~_i, with zeta summing to 1 over S.
// No-op when nobody succeeded.
void global_update(std::vector<double>& model, std::span<const std::uint8_t> success,
                   std::span<const Client> clients, std::span<const double> zeta, double eta);

enum class RankingMode { kAuto, kUcb, kMean };

struct MatchingSpec {
  bool enabled = true;  // false: uniform random client-channel matching
  double beta = 0.5;
  RankingMode mode = RankingMode::kAuto;  // auto: ucb for glr-cucb, mean otherwise

  bool operator==(const MatchingSpec&) const = default;
};

struct FlSpec {
  TaskSpec task;
  LocalTraining training;
  double dirichlet_alpha = 0.5;

  bool operator==(const FlSpec&) const = default;
};

struct RoundRecord {
  Round t = 0;
  double loss = 0.0;
  double accuracy = 0.0;
  int successes = 0;
  std::vector<Age> ages;
  double variance = 0.0;  // V_t
  Age regret = 0;         // R(t) against the oracle on the same channel draws
  std::vector<int> selected;
  Assignment assignment;
  std::vector<std::uint8_t> rewards;  // one per selected channel
  bool restart = false;
  bool aoi_exploit = false;
  std::vector<double> normalized_ages;
  std::vector<double> contributions;
  std::vector<double> priorities;
  std::vector<double> zeta;
};

// One asynchronous federated-learning run over scheduled channels.
//
// Each round: clients that delivered last round retrain from the current
// global model; the scheduler picks M channels; the matcher maps clients to
// them; channel states decide who delivers; buffers, contribution scores and
// the global model are updated; ages advance.
class FederatedRun {
 public:
  FederatedRun(const ChannelEnvironment& env, const PolicySpec& policy,
               const MatchingSpec& matching, const FlSpec& fl, int clients, std::uint64_t seed);

  RoundRecord run_round();
  bool done() const { return t_ >= env_.horizon(); }

  Round round() const { return t_; }
  const Evaluation& initial_evaluation() const { return initial_; }
  std::span<const double> model() const { return model_; }
  const AoiLedger& ledger() const { return ledger_; }
  const RegretAccumulator& regret() const { return regret_; }
  const std::vector<Client>& clients() const { return clients_; }
  const ContributionState& contributions() const { return contributions_; }
  const Scheduler& scheduler() const { return *scheduler_; }
  const SyntheticTask& task() const { return task_; }

 private:
  Assignment match(const Decision& decision, RoundRecord& record);

  const ChannelEnvironment& env_;
  MatchingSpec matching_;
  FlSpec fl_;
  int m_;
  Round t_ = 0;
  Rng env_rng_;
  Rng policy_rng_;
  Rng match_rng_;
  SyntheticTask task_;
  std::vector<Client> clients_;
  std::vector<double> model_;
  std::unique_ptr<Scheduler> scheduler_;
  AoiLedger ledger_;
  AoiLedger oracle_ledger_;
  RegretAccumulator regret_;
  ContributionState contributions_;
  FairnessState fairness_;
  std::vector<std::uint8_t> trained_;  // membership in S_{t-1}
  Evaluation initial_;
};

}  // namespace aoisched
