#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "aoisched/rng.hpp"

namespace aoisched {

// Rounds are 1-based throughout: t in [1, horizon].
using Round = std::int64_t;

enum class ChannelKind { kStationary, kPiecewiseStationary, kAdversarial };

const char* to_string(ChannelKind kind);

// Dense N x T matrix of Good (1) / Bad (0) channel states.
class StateMatrix {
 public:
  StateMatrix() = default;
  StateMatrix(int channels, Round rounds);

  int channels() const { return channels_; }
  Round rounds() const { return rounds_; }

  // round is 1-based.
  std::uint8_t at(int channel, Round round) const {
    return data_[index(channel, round)];
  }
  void set(int channel, Round round, std::uint8_t state) {
    data_[index(channel, round)] = state;
  }
  std::span<const std::uint8_t> row(int channel) const {
    return {data_.data() + static_cast<std::size_t>(channel) * rounds_,
            static_cast<std::size_t>(rounds_)};
  }

  bool operator==(const StateMatrix&) const = default;

 private:
  std::size_t index(int channel, Round round) const {
    return static_cast<std::size_t>(channel) * static_cast<std::size_t>(rounds_) +
           static_cast<std::size_t>(round - 1);
  }

  int channels_ = 0;
  Round rounds_ = 0;
  std::vector<std::uint8_t> data_;
};

struct Segment {
  Round start_round = 1;
  std::vector<double> means;
};

struct ChannelRealization {
  Round round = 0;
  std::vector<std::uint8_t> states;  // 1 = Good, 0 = Bad, one per channel
};

// Immutable channel process. sample_round draws one uniform per channel in
// channel-index order (Bernoulli kinds); the adversarial kind consumes nothing.
class ChannelEnvironment {
 public:
  ChannelKind kind() const { return kind_; }
  int n_channels() const { return n_channels_; }
  Round horizon() const { return horizon_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const StateMatrix& adversarial_states() const { return adversarial_; }

  // C_T: number of segments minus one (0 for stationary and adversarial).
  int breakpoint_count() const;

  ChannelRealization sample_round(Round t, Rng& rng) const;

  // Ground truth for the oracle and regret accounting only.
  std::vector<double> true_means(Round t) const;

  // Number of true_means() calls made on this object; lets tests prove that
  // learning policies never consult ground truth.
  std::size_t true_means_reads() const { return reads_.count.load(); }

  friend ChannelEnvironment make_stationary(std::vector<double> means, Round horizon);
  friend ChannelEnvironment make_piecewise(int n_channels, Round horizon,
                                           std::vector<Round> breakpoints,
                                           std::vector<std::vector<double>> per_segment_means);
  friend ChannelEnvironment make_adversarial(StateMatrix states);

 private:
  struct ReadCounter {
    mutable std::atomic<std::size_t> count{0};
    ReadCounter() = default;
    ReadCounter(const ReadCounter&) {}
    ReadCounter& operator=(const ReadCounter&) { return *this; }
  };

  ChannelEnvironment() = default;
  const Segment& segment_at(Round t) const;
  void check_round(Round t) const;

  ChannelKind kind_ = ChannelKind::kStationary;
  int n_channels_ = 0;
  Round horizon_ = 0;
  std::vector<Segment> segments_;
  StateMatrix adversarial_;
  ReadCounter reads_;
};

ChannelEnvironment make_stationary(std::vector<double> means, Round horizon);

// breakpoints: rounds at which a new segment starts, strictly increasing in
// (1, horizon]. per_segment_means has breakpoints.size() + 1 rows.
ChannelEnvironment make_piecewise(int n_channels, Round horizon, std::vector<Round> breakpoints,
                                  std::vector<std::vector<double>> per_segment_means);

ChannelEnvironment make_adversarial(StateMatrix states);

// Each channel starts Good/Bad with probability 1/2 and flips its state each
// round with flip_probability. Deterministic in seed.
StateMatrix gen_adversarial_flips(int n_channels, Round horizon, double flip_probability,
                                  std::uint64_t seed);

// count - 1 breakpoints splitting [1, horizon] into equal-length segments.
std::vector<Round> equal_breakpoints(Round horizon, int segment_count);

// Segment means drawn i.i.d. uniform on [low, high].
std::vector<std::vector<double>> draw_segment_means(int n_channels, int segment_count, double low,
                                                    double high, Rng& rng);

// One row per channel, comma-separated 0/1 entries.
StateMatrix load_state_matrix_csv(const std::filesystem::path& path);
void save_state_matrix_csv(const StateMatrix& states, const std::filesystem::path& path);

}  // namespace aoisched
