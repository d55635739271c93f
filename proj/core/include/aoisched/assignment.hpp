#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aoisched/env.hpp"
#include "aoisched/rng.hpp"

namespace aoisched {

// Injective client -> channel map: every client holds exactly one channel and
// no channel is shared.
class Assignment {
 public:
  Assignment() = default;
  Assignment(std::vector<int> channel_of, int n_channels);

  int clients() const { return static_cast<int>(channel_of_.size()); }
  int channel(int client) const { return channel_of_[client]; }
  std::span<const int> channel_of() const { return channel_of_; }

  // beta[i][k] = 1 iff client i transmits on channel k.
  std::vector<std::vector<std::uint8_t>> beta(int n_channels) const;

  bool operator==(const Assignment&) const = default;

 private:
  std::vector<int> channel_of_;
};

bool is_valid_assignment(std::span<const int> channel_of, int n_channels);

// Reward observed on one scheduled channel.
struct ChannelFeedback {
  int channel = 0;
  std::uint8_t reward = 0;
};

// Per-channel observation counts accumulated over a whole run.
class ChannelHistory {
 public:
  explicit ChannelHistory(int n_channels = 0)
      : pulls_(static_cast<std::size_t>(n_channels), 0),
        successes_(static_cast<std::size_t>(n_channels), 0) {}

  void record(int channel, std::uint8_t reward) {
    ++pulls_[channel];
    successes_[channel] += reward;
  }

  int n_channels() const { return static_cast<int>(pulls_.size()); }
  std::int64_t pulls(int channel) const { return pulls_[channel]; }
  std::int64_t successes(int channel) const { return successes_[channel]; }
  bool observed(int channel) const { return pulls_[channel] > 0; }
  // 0 for a channel never observed.
  double mean(int channel) const {
    return pulls_[channel] ? static_cast<double>(successes_[channel]) / pulls_[channel] : 0.0;
  }
  std::vector<double> means() const;

 private:
  std::vector<std::int64_t> pulls_;
  std::vector<std::int64_t> successes_;
};

// Channels sorted by descending score, lower index first on ties.
std::vector<int> rank_by_score(std::span<const int> channels, std::span<const double> score);

// The m highest-scoring channels of [0, score.size()), ranked.
std::vector<int> top_channels(std::span<const double> score, int m);

// Client j receives ranked[(j + t) mod M], so every client cycles through the
// ranked channels over consecutive rounds.
Assignment rotate_assignment(std::span<const int> ranked, Round t, int n_channels);

// Top-M channels by true mean with the rotation above.
Assignment oracle_select(std::span<const double> true_means, int clients, Round t);

// Uniform M-subset with a uniform bijection onto clients.
Assignment random_select(int n_channels, int clients, Rng& rng);

}  // namespace aoisched
