#include "aoisched/bandit_sim.hpp"

#include <stdexcept>

namespace aoisched {

BanditRun simulate_bandit(const ChannelEnvironment& env, const PolicySpec& policy, int clients,
                          std::uint64_t seed, BanditOptions options) {
  if (clients < 1 || env.n_channels() < clients) throw std::invalid_argument("need N >= M >= 1");
  auto scheduler = make_scheduler(policy, env, clients);
  Rng env_rng = Rng::stream(seed, 1);
  Rng policy_rng = Rng::stream(seed, 2);
  AoiLedger ledger(clients);
  AoiLedger oracle_ledger(clients);
  RegretAccumulator regret;
  BanditRun run;

  std::vector<std::uint8_t> success(static_cast<std::size_t>(clients));
  std::vector<std::uint8_t> oracle_success(static_cast<std::size_t>(clients));
  std::vector<ChannelFeedback> feedback;
  for (Round t = 1; t <= env.horizon(); ++t) {
    const Decision decision = scheduler->select({t, ledger.ages()}, policy_rng);
    const ChannelRealization realization = env.sample_round(t, env_rng);

    feedback.clear();
    for (int k : decision.selected) feedback.push_back({k, realization.states[k]});
    const bool restart = scheduler->observe(decision, feedback, t);
    run.restarts += restart;
    run.forced_explorations += decision.forced_exploration;
    run.aoi_exploits += decision.aoi_exploit;

    for (int i = 0; i < clients; ++i) {
      success[i] = realization.states[decision.assignment.channel(i)];
    }
    ledger.update(success);

    const Assignment oracle = oracle_select(env.true_means(t), clients, t);
    for (int i = 0; i < clients; ++i) oracle_success[i] = realization.states[oracle.channel(i)];
    oracle_ledger.update(oracle_success);
    regret.record(ledger.age_total(), oracle_ledger.age_total());

    if (options.keep_ages) run.ages.emplace_back(ledger.ages().begin(), ledger.ages().end());
    if (options.log_decisions) {
      DecisionLogEntry entry{t, decision.selected, decision.assignment, {}, restart};
      for (const auto& f : feedback) entry.rewards.push_back(f.reward);
      run.decisions.push_back(std::move(entry));
    }
  }
  run.regret = regret.curve();
  run.policy_age_sums = regret.policy_age_sums();
  run.oracle_age_sums = regret.oracle_age_sums();
  run.variance = ledger.variance_trace();
  return run;
}

}  // namespace aoisched
