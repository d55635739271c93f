#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aoisched/assignment.hpp"

namespace aoisched {

// Bernoulli KL divergence kl(p, q) with 0 ln 0 := 0; q is clamped to
// [1e-9, 1 - 1e-9].
double kl_bernoulli(double p, double q);

// Generalized likelihood ratio change detector over a stream of 0/1 samples.
//
//   statistic = max_{1 <= s < n} [ s kl(mean(1..s), mean(1..n))
//                                  + (n - s) kl(mean(s+1..n), mean(1..n)) ]
//   threshold = (1 + 1/n) ln(3 n sqrt(n) / delta)
//
// For binary samples the statistic reduces to x ln x terms of the prefix
// counts, so each check is O(n) with no logarithms on the hot path.
class GlrDetector {
 public:
  explicit GlrDetector(double delta);

  // Appends a sample and reports whether the statistic reached the threshold.
  // The detector does not reset itself.
  bool push(std::uint8_t sample);
  void reset();

  std::size_t size() const { return samples_.size(); }
  std::size_t ones() const { return prefix_ones_.back(); }
  double mean() const { return size() ? static_cast<double>(ones()) / size() : 0.0; }
  std::span<const std::uint8_t> samples() const { return samples_; }
  double delta() const { return delta_; }

  double statistic() const;
  double threshold() const { return threshold(size(), delta_); }
  static double threshold(std::size_t n, double delta);

 private:
  double delta_;
  std::vector<std::uint8_t> samples_;
  std::vector<std::uint32_t> prefix_ones_{0};
};

struct GlrCucbParams {
  double alpha = 0.0;    // forced-exploration rate; 0 disables it
  double delta = 0.001;  // detector confidence
};

// alpha = 0.05 sqrt(ln T / T).
double default_exploration_alpha(Round horizon);

// Combinatorial UCB over individual channels, restarted in full whenever the
// GLR detector of any pulled channel fires.
class GlrCucb {
 public:
  GlrCucb(int n_channels, int clients, GlrCucbParams params);

  struct Selection {
    std::vector<int> ranked;  // chosen channels by descending UCB
    Assignment assignment;
    bool forced = false;
  };

  Selection select(Round t, Rng& rng) const;

  // Feeds rewards of the pulled channels; returns true if a restart fired
  // (all statistics cleared, last restart set to t).
  bool update(std::span<const ChannelFeedback> feedback, Round t);

  // mu~ + sqrt(3 ln(t - tau) / (2 D)); +inf for a channel with D = 0.
  double ucb(int channel, Round t) const;
  std::vector<double> ucb_values(Round t) const;

  int n_channels() const { return n_channels_; }
  int clients() const { return clients_; }
  const GlrCucbParams& params() const { return params_; }
  double emp_mean(int channel) const { return detectors_[channel].mean(); }
  std::vector<double> emp_means() const;
  std::size_t pulls(int channel) const { return detectors_[channel].size(); }
  const GlrDetector& detector(int channel) const { return detectors_[channel]; }
  Round last_restart() const { return last_restart_; }
  int restarts() const { return restarts_; }

  // Length of the forced-exploration cycle, at least N + 1; 0 when disabled.
  std::int64_t exploration_cycle() const { return cycle_; }

 private:
  int n_channels_;
  int clients_;
  GlrCucbParams params_;
  std::int64_t cycle_ = 0;
  std::vector<GlrDetector> detectors_;
  Round last_restart_ = 0;
  int restarts_ = 0;
};

}  // namespace aoisched
