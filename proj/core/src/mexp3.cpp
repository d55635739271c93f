#include "aoisched/mexp3.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace aoisched {

std::vector<std::vector<int>> enumerate_combinations(int n, int m, std::size_t limit) {
  if (m < 1 || n < m) {
    throw std::invalid_argument("need N >= M >= 1 to enumerate super-arms");
  }
  // C(n, m) computed incrementally; stop as soon as it passes the limit.
  double count = 1.0;
  for (int i = 1; i <= m; ++i) {
    count = count * (n - m + i) / i;
    if (count > static_cast<double>(limit) + 0.5) {
      throw std::invalid_argument("C(" + std::to_string(n) + "," + std::to_string(m) +
                                  ") super-arms exceed the limit of " + std::to_string(limit) +
                                  "; exponential weights over super-arms only suit small systems");
    }
  }
  std::vector<std::vector<int>> out;
  out.reserve(static_cast<std::size_t>(std::llround(count)));
  std::vector<int> current(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) current[i] = i;
  while (true) {
    out.push_back(current);
    int i = m - 1;
    while (i >= 0 && current[i] == n - m + i) --i;
    if (i < 0) break;
    ++current[i];
    for (int j = i + 1; j < m; ++j) current[j] = current[j - 1] + 1;
  }
  return out;
}

MExp3::MExp3(int n_channels, int clients, double gamma, std::size_t max_combos)
    : n_channels_(n_channels),
      clients_(clients),
      gamma_(gamma),
      combos_(enumerate_combinations(n_channels, clients, max_combos)),
      weights_(combos_.size(), 1.0),
      probs_(combos_.size(), 0.0),
      history_(n_channels) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
  compute_probabilities();
}

void MExp3::compute_probabilities() {
  double total = 0.0;
  for (double w : weights_) total += w;
  const double c = static_cast<double>(combos_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    probs_[i] = (1.0 - gamma_) * weights_[i] / total + gamma_ / c;
  }
}

MExp3::Draw MExp3::select(Rng& rng, Round t) const {
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t arm = probs_.size() - 1;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    cumulative += probs_[i];
    if (u < cumulative) {
      arm = i;
      break;
    }
  }
  const auto means = history_.means();
  std::vector<double> score(means.size());
  for (int k = 0; k < n_channels_; ++k) {
    // Unobserved channels rank after every observed one.
    score[k] = history_.observed(k) ? means[k] : -1.0;
  }
  const auto ranked = rank_by_score(combos_[arm], score);
  return {arm, rotate_assignment(ranked, t, n_channels_)};
}

void MExp3::update(std::size_t super_arm, std::span<const ChannelFeedback> feedback) {
  if (super_arm >= combos_.size()) throw std::out_of_range("super-arm index out of range");
  const auto& combo = combos_[super_arm];
  if (feedback.size() != combo.size()) {
    throw std::invalid_argument("feedback must cover the played super-arm");
  }
  double reward = 0.0;
  for (const auto& f : feedback) {
    if (!std::binary_search(combo.begin(), combo.end(), f.channel)) {
      throw std::invalid_argument("feedback for channel outside the played super-arm");
    }
    reward += f.reward;
    history_.record(f.channel, f.reward);
  }
  const double c = static_cast<double>(combos_.size());
  const double estimate = reward / probs_[super_arm];
  weights_[super_arm] *= std::exp(gamma_ * estimate / c);

  const double w_max = *std::max_element(weights_.begin(), weights_.end());
  constexpr double kFloor = std::numeric_limits<double>::min();
  for (double& w : weights_) w = std::max(w / w_max, kFloor);
  compute_probabilities();
}

std::size_t MExp3::combo_index(std::span<const int> sorted_channels) const {
  std::vector<int> key(sorted_channels.begin(), sorted_channels.end());
  auto it = std::lower_bound(combos_.begin(), combos_.end(), key);
  if (it == combos_.end() || *it != key) throw std::invalid_argument("not a valid super-arm");
  return static_cast<std::size_t>(it - combos_.begin());
}

}  // namespace aoisched
