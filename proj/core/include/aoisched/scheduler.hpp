#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aoisched/aoi.hpp"
#include "aoisched/assignment.hpp"
#include "aoisched/env.hpp"
#include "aoisched/glr_cucb.hpp"
#include "aoisched/mexp3.hpp"

namespace aoisched {

enum class PolicyKind { kOracle, kRandom, kMExp3, kGlrCucb };

const char* to_string(PolicyKind kind);
PolicyKind parse_policy_kind(const std::string& name);

struct PolicySpec {
  PolicyKind kind = PolicyKind::kGlrCucb;
  bool aoi_aware = false;
  double gamma = 0.5;
  std::optional<double> alpha;  // unset: 0.05 sqrt(ln T / T)
  double delta = 0.001;

  std::string label() const;
  bool operator==(const PolicySpec&) const = default;
};

struct RoundContext {
  Round t = 1;
  std::span<const Age> ages;  // a(t - 1), before this round's transmissions
};

struct Decision {
  std::vector<int> selected;  // scheduled channels, in the policy's rank order
  Assignment assignment;
  std::optional<std::size_t> super_arm;
  bool forced_exploration = false;
  bool aoi_exploit = false;
};

// Channel scheduling policy. One instance drives one run: select, then
// observe the rewards of the scheduled channels, once per round.
class Scheduler {
 public:
  Scheduler(int n_channels, int clients) : n_channels_(n_channels), clients_(clients), history_(n_channels) {}
  virtual ~Scheduler() = default;

  virtual std::string name() const = 0;
  virtual Decision select(const RoundContext& ctx, Rng& rng) = 0;

  // Feedback holds one entry per scheduled channel. Returns true when the
  // policy restarted its statistics.
  bool observe(const Decision& decision, std::span<const ChannelFeedback> feedback, Round t);

  // Per-channel success-rate estimates used for AoI-aware exploitation.
  virtual std::vector<double> empirical_means() const { return history_.means(); }

  virtual const GlrCucb* cucb() const { return nullptr; }
  virtual const MExp3* mexp3() const { return nullptr; }

  // Observations over the whole run, never reset.
  const ChannelHistory& history() const { return history_; }
  int n_channels() const { return n_channels_; }
  int clients() const { return clients_; }

 protected:
  virtual bool on_observe(const Decision& decision, std::span<const ChannelFeedback> feedback,
                          Round t) = 0;

 private:
  int n_channels_;
  int clients_;
  ChannelHistory history_;
};

class OracleScheduler final : public Scheduler {
 public:
  OracleScheduler(const ChannelEnvironment& env, int clients);
  std::string name() const override { return "oracle"; }
  Decision select(const RoundContext& ctx, Rng& rng) override;

 protected:
  bool on_observe(const Decision&, std::span<const ChannelFeedback>, Round) override { return false; }

 private:
  const ChannelEnvironment& env_;
};

class RandomScheduler final : public Scheduler {
 public:
  RandomScheduler(int n_channels, int clients) : Scheduler(n_channels, clients) {}
  std::string name() const override { return "random"; }
  Decision select(const RoundContext& ctx, Rng& rng) override;

 protected:
  bool on_observe(const Decision&, std::span<const ChannelFeedback>, Round) override { return false; }
};

class MExp3Scheduler final : public Scheduler {
 public:
  MExp3Scheduler(int n_channels, int clients, double gamma);
  std::string name() const override { return "mexp3"; }
  Decision select(const RoundContext& ctx, Rng& rng) override;
  const MExp3* mexp3() const override { return &state_; }

 protected:
  bool on_observe(const Decision& decision, std::span<const ChannelFeedback> feedback,
                  Round t) override;

 private:
  MExp3 state_;
};

class GlrCucbScheduler final : public Scheduler {
 public:
  GlrCucbScheduler(int n_channels, int clients, GlrCucbParams params);
  std::string name() const override { return "glr-cucb"; }
  Decision select(const RoundContext& ctx, Rng& rng) override;
  // Means since the last restart; 0 for channels not pulled since then.
  std::vector<double> empirical_means() const override { return state_.emp_means(); }
  const GlrCucb* cucb() const override { return &state_; }

 protected:
  bool on_observe(const Decision& decision, std::span<const ChannelFeedback> feedback,
                  Round t) override;

 private:
  GlrCucb state_;
};

// AoI-aware wrapper. With h(t) = 1 / max_k mu~_k, when the total client age
// exceeds M h(t) the wrapper schedules the M channels with the highest
// empirical means instead of consulting the base policy. The base policy
// still learns from every round. Delegates while all means are 0.
class AoiAwareScheduler final : public Scheduler {
 public:
  explicit AoiAwareScheduler(std::unique_ptr<Scheduler> base);
  std::string name() const override { return "aa-" + base_->name(); }
  Decision select(const RoundContext& ctx, Rng& rng) override;
  std::vector<double> empirical_means() const override { return base_->empirical_means(); }
  const GlrCucb* cucb() const override { return base_->cucb(); }
  const MExp3* mexp3() const override { return base_->mexp3(); }
  const Scheduler& base() const { return *base_; }

  // Threshold h(t); nullopt on cold start.
  std::optional<double> threshold() const;

 protected:
  bool on_observe(const Decision& decision, std::span<const ChannelFeedback> feedback,
                  Round t) override;

 private:
  std::unique_ptr<Scheduler> base_;
};

// env is consulted only by the oracle.
std::unique_ptr<Scheduler> make_scheduler(const PolicySpec& spec, const ChannelEnvironment& env,
                                          int clients);

}  // namespace aoisched
