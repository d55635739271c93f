#include "aoisched/scheduler.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace aoisched {

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kOracle:
      return "oracle";
    case PolicyKind::kRandom:
      return "random";
    case PolicyKind::kMExp3:
      return "mexp3";
    case PolicyKind::kGlrCucb:
      return "glr-cucb";
  }
  return "unknown";
}

PolicyKind parse_policy_kind(const std::string& name) {
  if (name == "oracle") return PolicyKind::kOracle;
  if (name == "random") return PolicyKind::kRandom;
  if (name == "mexp3") return PolicyKind::kMExp3;
  if (name == "glr-cucb") return PolicyKind::kGlrCucb;
  throw std::invalid_argument("unknown policy '" + name +
                              "' (expected oracle, random, mexp3 or glr-cucb)");
}

std::string PolicySpec::label() const {
  return std::string(aoi_aware ? "aa-" : "") + to_string(kind);
}

bool Scheduler::observe(const Decision& decision, std::span<const ChannelFeedback> feedback,
                        Round t) {
  for (const auto& f : feedback) history_.record(f.channel, f.reward);
  return on_observe(decision, feedback, t);
}

OracleScheduler::OracleScheduler(const ChannelEnvironment& env, int clients)
    : Scheduler(env.n_channels(), clients), env_(env) {
  if (clients < 1 || env.n_channels() < clients) throw std::invalid_argument("need N >= M >= 1");
}

Decision OracleScheduler::select(const RoundContext& ctx, Rng&) {
  const auto means = env_.true_means(ctx.t);
  Decision d;
  d.selected = top_channels(means, clients());
  d.assignment = rotate_assignment(d.selected, ctx.t, n_channels());
  return d;
}

Decision RandomScheduler::select(const RoundContext&, Rng& rng) {
  Decision d;
  d.assignment = random_select(n_channels(), clients(), rng);
  d.selected.assign(d.assignment.channel_of().begin(), d.assignment.channel_of().end());
  return d;
}

MExp3Scheduler::MExp3Scheduler(int n_channels, int clients, double gamma)
    : Scheduler(n_channels, clients), state_(n_channels, clients, gamma) {}

Decision MExp3Scheduler::select(const RoundContext& ctx, Rng& rng) {
  auto draw = state_.select(rng, ctx.t);
  Decision d;
  d.super_arm = draw.super_arm;
  d.selected.assign(draw.assignment.channel_of().begin(), draw.assignment.channel_of().end());
  d.assignment = std::move(draw.assignment);
  return d;
}

bool MExp3Scheduler::on_observe(const Decision& decision,
                                std::span<const ChannelFeedback> feedback, Round) {
  std::size_t arm = 0;
  if (decision.super_arm) {
    arm = *decision.super_arm;
  } else {
    std::vector<int> sorted = decision.selected;
    std::sort(sorted.begin(), sorted.end());
    arm = state_.combo_index(sorted);
  }
  state_.update(arm, feedback);
  return false;
}

GlrCucbScheduler::GlrCucbScheduler(int n_channels, int clients, GlrCucbParams params)
    : Scheduler(n_channels, clients), state_(n_channels, clients, params) {}

Decision GlrCucbScheduler::select(const RoundContext& ctx, Rng& rng) {
  auto sel = state_.select(ctx.t, rng);
  Decision d;
  d.selected = std::move(sel.ranked);
  d.assignment = std::move(sel.assignment);
  d.forced_exploration = sel.forced;
  return d;
}

bool GlrCucbScheduler::on_observe(const Decision&, std::span<const ChannelFeedback> feedback,
                                  Round t) {
  return state_.update(feedback, t);
}

AoiAwareScheduler::AoiAwareScheduler(std::unique_ptr<Scheduler> base)
    : Scheduler(base->n_channels(), base->clients()), base_(std::move(base)) {}

std::optional<double> AoiAwareScheduler::threshold() const {
  const auto means = base_->empirical_means();
  const double best = *std::max_element(means.begin(), means.end());
  if (!(best > 0.0)) return std::nullopt;
  return 1.0 / best;
}

Decision AoiAwareScheduler::select(const RoundContext& ctx, Rng& rng) {
  const auto h = threshold();
  const Age total = std::accumulate(ctx.ages.begin(), ctx.ages.end(), Age{0});
  if (!h || static_cast<double>(total) <= clients() * *h) return base_->select(ctx, rng);

  Decision d;
  d.selected = top_channels(base_->empirical_means(), clients());
  d.assignment = rotate_assignment(d.selected, ctx.t, n_channels());
  d.aoi_exploit = true;
  return d;
}

bool AoiAwareScheduler::on_observe(const Decision& decision,
                                   std::span<const ChannelFeedback> feedback, Round t) {
  return base_->observe(decision, feedback, t);
}

std::unique_ptr<Scheduler> make_scheduler(const PolicySpec& spec, const ChannelEnvironment& env,
                                          int clients) {
  const int n = env.n_channels();
  std::unique_ptr<Scheduler> base;
  switch (spec.kind) {
    case PolicyKind::kOracle:
      base = std::make_unique<OracleScheduler>(env, clients);
      break;
    case PolicyKind::kRandom:
      base = std::make_unique<RandomScheduler>(n, clients);
      break;
    case PolicyKind::kMExp3:
      base = std::make_unique<MExp3Scheduler>(n, clients, spec.gamma);
      break;
    case PolicyKind::kGlrCucb:
      base = std::make_unique<GlrCucbScheduler>(
          n, clients,
          GlrCucbParams{spec.alpha.value_or(default_exploration_alpha(env.horizon())), spec.delta});
      break;
  }
  if (spec.aoi_aware) {
    if (spec.kind != PolicyKind::kMExp3 && spec.kind != PolicyKind::kGlrCucb) {
      throw std::invalid_argument("AoI-aware wrapping applies to mexp3 and glr-cucb only");
    }
    return std::make_unique<AoiAwareScheduler>(std::move(base));
  }
  return base;
}

}  // namespace aoisched
