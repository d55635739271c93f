#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aoisched/assignment.hpp"

namespace aoisched {

// All M-subsets of {0..N-1} in lexicographic order. Throws when the count
// exceeds limit.
std::vector<std::vector<int>> enumerate_combinations(int n, int m, std::size_t limit = 100000);

// Exponential-weights scheduler over super-arms (M-subsets of channels).
//
//   p_I = (1 - gamma) * w_I / sum_J w_J + gamma / C
//   draw I ~ p, observe X = sum of the M channel rewards in I
//   w_I <- w_I * exp(gamma * (X / p_I) / C)
//
// After each update all weights are divided by the largest one (leaves p
// unchanged) and floored at the smallest normal double so they stay positive.
class MExp3 {
 public:
  MExp3(int n_channels, int clients, double gamma, std::size_t max_combos = 100000);

  struct Draw {
    std::size_t super_arm = 0;
    Assignment assignment;
  };

  // Samples a super-arm from the current probabilities. Its channels go to
  // clients by the (j + t) mod M rotation, ranked by historical mean.
  Draw select(Rng& rng, Round t) const;

  // Feedback must cover exactly the channels of the played super-arm.
  void update(std::size_t super_arm, std::span<const ChannelFeedback> feedback);

  int n_channels() const { return n_channels_; }
  int clients() const { return clients_; }
  double gamma() const { return gamma_; }
  std::size_t combo_count() const { return combos_.size(); }
  const std::vector<std::vector<int>>& combos() const { return combos_; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> probabilities() const { return probs_; }
  const ChannelHistory& history() const { return history_; }

  // Index of a sorted channel set in combos().
  std::size_t combo_index(std::span<const int> sorted_channels) const;

 private:
  void compute_probabilities();

  int n_channels_;
  int clients_;
  double gamma_;
  std::vector<std::vector<int>> combos_;
  std::vector<double> weights_;
  std::vector<double> probs_;
  ChannelHistory history_;
};

}  // namespace aoisched
