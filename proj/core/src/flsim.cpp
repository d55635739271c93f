#include "aoisched/flsim.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace aoisched {

namespace {

// Stream ids for Rng::stream; one per independent source of randomness.
constexpr std::uint64_t kEnvStream = 1;
constexpr std::uint64_t kPolicyStream = 2;
constexpr std::uint64_t kTaskStream = 3;
constexpr std::uint64_t kPartitionStream = 4;
constexpr std::uint64_t kMatchStream = 5;
constexpr std::uint64_t kClientStreamBase = 100;

}  // namespace

BatchSampler::BatchSampler(std::vector<std::size_t> rows, std::uint64_t seed)
    : rows_(std::move(rows)), cursor_(rows_.size()), rng_(seed) {
  if (rows_.empty()) throw std::invalid_argument("client shard is empty");
}

std::vector<std::size_t> BatchSampler::next(std::size_t batch) {
  batch = std::min(batch, rows_.size());
  std::vector<std::size_t> out;
  out.reserve(batch);
  while (out.size() < batch) {
    if (cursor_ == rows_.size()) {
      rng_.shuffle(std::span<std::size_t>(rows_));
      cursor_ = 0;
    }
    out.push_back(rows_[cursor_++]);
  }
  return out;
}

std::vector<double> cumulative_update(std::span<const double> start, std::span<const double> end,
                                      double eta) {
  if (eta == 0.0) throw std::domain_error("cumulative update undefined for eta = 0");
  if (start.size() != end.size()) throw std::invalid_argument("model dimensions differ");
  std::vector<double> out(start.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (start[i] - end[i]) / eta;
  return out;
}

Client::Client(int id, std::vector<std::size_t> shard, std::size_t params, std::uint64_t seed)
    : id_(id),
      shard_(shard),
      sampler_(std::move(shard), seed),
      update_(params, 0.0),
      local_model_(params, 0.0) {}

void Client::local_sgd(std::span<const double> global_model, const Dataset& train,
                       const LocalTraining& training) {
  if (global_model.size() != update_.size()) throw std::invalid_argument("model dimension mismatch");
  local_model_.assign(global_model.begin(), global_model.end());
  std::vector<double> grad;
  for (int e = 0; e < training.local_steps; ++e) {
    const auto batch = sampler_.next(static_cast<std::size_t>(training.batch));
    softmax_loss(local_model_, train, batch, &grad);
    for (std::size_t i = 0; i < grad.size(); ++i) local_model_[i] -= training.eta * grad[i];
  }
  // With eta = 0 the local model cannot move and the cumulative update is
  // taken as zero rather than 0/0.
  if (training.eta == 0.0) {
    std::fill(update_.begin(), update_.end(), 0.0);
  } else {
    update_ = cumulative_update(global_model, local_model_, training.eta);
  }
  ++trainings_;
}

void global_update(std::vector<double>& model, std::span<const std::uint8_t> success,
                   std::span<const Client> clients, std::span<const double> zeta, double eta) {
  if (success.size() != clients.size() || zeta.size() != clients.size()) {
    throw std::invalid_argument("one success flag and weight per client");
  }
  for (std::size_t i = 0; i < clients.size(); ++i) {
    if (!success[i]) continue;
    const auto g = clients[i].update();
    if (g.size() != model.size()) throw std::invalid_argument("update dimension mismatch");
    for (std::size_t k = 0; k < model.size(); ++k) model[k] -= eta * zeta[i] * g[k];
  }
}

FederatedRun::FederatedRun(const ChannelEnvironment& env, const PolicySpec& policy,
                           const MatchingSpec& matching, const FlSpec& fl, int clients,
                           std::uint64_t seed)
    : env_(env),
      matching_(matching),
      fl_(fl),
      m_(clients),
      env_rng_(Rng::stream(seed, kEnvStream)),
      policy_rng_(Rng::stream(seed, kPolicyStream)),
      match_rng_(Rng::stream(seed, kMatchStream)),
      ledger_(clients),
      oracle_ledger_(clients),
      contributions_(clients, softmax_parameter_count(fl.task.features, fl.task.classes)),
      fairness_(matching.beta),
      trained_(static_cast<std::size_t>(clients), 1) {
  if (clients < 1 || env.n_channels() < clients) throw std::invalid_argument("need N >= M >= 1");
  if (!(fl.training.eta > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  if (fl.training.local_steps < 1 || fl.training.batch < 1) {
    throw std::invalid_argument("local_steps and batch must be >= 1");
  }

  Rng task_rng = Rng::stream(seed, kTaskStream);
  task_ = make_synthetic_task(fl.task, clients, task_rng);
  Rng partition_rng = Rng::stream(seed, kPartitionStream);
  auto shards = dirichlet_partition(task_.train.labels, fl.task.classes, fl.dirichlet_alpha,
                                    clients, partition_rng);
  const std::size_t params = softmax_parameter_count(task_.train.dim, task_.train.classes);
  clients_.reserve(static_cast<std::size_t>(clients));
  for (int i = 0; i < clients; ++i) {
    const auto client_seed = Rng::stream(seed, kClientStreamBase + i).engine()();
    clients_.emplace_back(i, std::move(shards[i]), params, client_seed);
  }
  model_.assign(params, 0.0);
  scheduler_ = make_scheduler(policy, env, clients);
  if (matching.enabled && matching.mode == RankingMode::kUcb && !scheduler_->cucb()) {
    throw std::invalid_argument("UCB channel ranking requires the glr-cucb policy");
  }
  initial_ = evaluate(model_, task_.validation);
}

Assignment FederatedRun::match(const Decision& decision, RoundRecord& record) {
  if (!matching_.enabled) {
    std::vector<int> channels = decision.selected;
    match_rng_.shuffle(std::span<int>(channels));
    return Assignment(std::move(channels), env_.n_channels());
  }
  const FairnessBlend blend = fairness_.blend(ledger_.ages());
  const auto scores = contributions_.scores();
  record.normalized_ages = blend.normalized_ages;
  record.contributions.assign(scores.begin(), scores.end());
  record.priorities = priority(scores, blend.normalized_ages, blend.beta_t);

  const bool by_ucb = matching_.mode == RankingMode::kUcb ||
                      (matching_.mode == RankingMode::kAuto && scheduler_->cucb() != nullptr);
  const ChannelRanking ranking = by_ucb
                                     ? rank_channels_ucb(*scheduler_->cucb(), decision.selected, t_)
                                     : rank_channels_mean(scheduler_->history(), decision.selected);
  return match_clients(ranking, record.priorities, env_.n_channels());
}

RoundRecord FederatedRun::run_round() {
  if (done()) throw std::logic_error("run already reached the horizon");
  ++t_;
  RoundRecord record;
  record.t = t_;

  for (std::size_t i = 0; i < clients_.size(); ++i) {
    if (trained_[i]) clients_[i].local_sgd(model_, task_.train, fl_.training);
  }

  const Decision decision = scheduler_->select({t_, ledger_.ages()}, policy_rng_);
  const Assignment assignment = match(decision, record);

  const ChannelRealization realization = env_.sample_round(t_, env_rng_);
  std::vector<ChannelFeedback> feedback;
  for (int k : decision.selected) {
    feedback.push_back({k, realization.states[k]});
    record.rewards.push_back(realization.states[k]);
  }
  record.restart = scheduler_->observe(decision, feedback, t_);

  std::vector<std::uint8_t> success(clients_.size(), 0);
  for (int i = 0; i < m_; ++i) success[i] = realization.states[assignment.channel(i)];
  record.successes = static_cast<int>(std::count(success.begin(), success.end(), 1));

  if (record.successes > 0) {
    std::vector<double> zeta;
    if (matching_.enabled) {
      for (int i = 0; i < m_; ++i) {
        if (success[i]) {
          contributions_.update_buffers(i, clients_[i].update(), clients_[i].local_model(), t_);
        }
      }
      // Leave-one-out baselines come from the aggregate formed with the
      // previous scores; the refreshed scores then set this round's weights.
      const auto provisional = aggregation_weights(contributions_.scores(), success);
      std::vector<double> agg_gradient(model_.size(), 0.0), agg_model(model_.size(), 0.0);
      for (int i = 0; i < m_; ++i) {
        if (!success[i]) continue;
        const auto g = contributions_.gradient(i);
        const auto w = contributions_.model(i);
        for (std::size_t k = 0; k < model_.size(); ++k) {
          agg_gradient[k] += provisional[i] * g[k];
          agg_model[k] += provisional[i] * w[k];
        }
      }
      contributions_.refresh(agg_gradient, agg_model, provisional,
                             [this](std::span<const double> w) {
                               return evaluate(w, task_.validation).loss;
                             });
      zeta = aggregation_weights(contributions_.scores(), success);
    } else {
      zeta = aggregation_weights(std::vector<double>(clients_.size(), 1.0), success);
    }
    global_update(model_, success, clients_, zeta, fl_.training.eta);
    record.zeta = std::move(zeta);
  } else {
    record.zeta.assign(clients_.size(), 0.0);
  }

  ledger_.update(success);
  trained_ = success;

  const Assignment oracle = oracle_select(env_.true_means(t_), m_, t_);
  std::vector<std::uint8_t> oracle_success(clients_.size(), 0);
  for (int i = 0; i < m_; ++i) oracle_success[i] = realization.states[oracle.channel(i)];
  oracle_ledger_.update(oracle_success);
  regret_.record(ledger_.age_total(), oracle_ledger_.age_total());

  const Evaluation eval = evaluate(model_, task_.validation);
  record.loss = eval.loss;
  record.accuracy = eval.accuracy;
  record.ages.assign(ledger_.ages().begin(), ledger_.ages().end());
  record.variance = ledger_.variance_trace().back();
  record.regret = regret_.final_regret();
  record.selected = decision.selected;
  record.assignment = assignment;
  record.aoi_exploit = decision.aoi_exploit;
  return record;
}

}  // namespace aoisched
