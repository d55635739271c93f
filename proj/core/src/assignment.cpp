#include "aoisched/assignment.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace aoisched {

bool is_valid_assignment(std::span<const int> channel_of, int n_channels) {
  std::vector<std::uint8_t> used(static_cast<std::size_t>(std::max(n_channels, 0)), 0);
  for (int k : channel_of) {
    if (k < 0 || k >= n_channels || used[k]) return false;
    used[k] = 1;
  }
  return true;
}

Assignment::Assignment(std::vector<int> channel_of, int n_channels)
    : channel_of_(std::move(channel_of)) {
  if (!is_valid_assignment(channel_of_, n_channels)) {
    throw std::invalid_argument("assignment is not an injective map into " +
                                std::to_string(n_channels) + " channels");
  }
}

std::vector<std::vector<std::uint8_t>> Assignment::beta(int n_channels) const {
  std::vector<std::vector<std::uint8_t>> b(channel_of_.size(),
                                           std::vector<std::uint8_t>(n_channels, 0));
  for (std::size_t i = 0; i < channel_of_.size(); ++i) b[i][channel_of_[i]] = 1;
  return b;
}

std::vector<double> ChannelHistory::means() const {
  std::vector<double> out(pulls_.size());
  for (int k = 0; k < n_channels(); ++k) out[k] = mean(k);
  return out;
}

std::vector<int> rank_by_score(std::span<const int> channels, std::span<const double> score) {
  std::vector<int> out(channels.begin(), channels.end());
  std::sort(out.begin(), out.end(), [&](int a, int b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return a < b;
  });
  return out;
}

std::vector<int> top_channels(std::span<const double> score, int m) {
  if (m < 0 || m > static_cast<int>(score.size())) {
    throw std::invalid_argument("cannot pick " + std::to_string(m) + " of " +
                                std::to_string(score.size()) + " channels");
  }
  std::vector<int> all(score.size());
  std::iota(all.begin(), all.end(), 0);
  auto ranked = rank_by_score(all, score);
  ranked.resize(static_cast<std::size_t>(m));
  return ranked;
}

Assignment rotate_assignment(std::span<const int> ranked, Round t, int n_channels) {
  const auto m = static_cast<Round>(ranked.size());
  std::vector<int> channel_of(ranked.size());
  for (Round j = 0; j < m; ++j) channel_of[j] = ranked[(j + t) % m];
  return Assignment(std::move(channel_of), n_channels);
}

Assignment oracle_select(std::span<const double> true_means, int clients, Round t) {
  const int n = static_cast<int>(true_means.size());
  if (clients < 1 || n < clients) {
    throw std::invalid_argument("oracle needs N >= M >= 1, got N=" + std::to_string(n) +
                                " M=" + std::to_string(clients));
  }
  return rotate_assignment(top_channels(true_means, clients), t, n);
}

Assignment random_select(int n_channels, int clients, Rng& rng) {
  if (clients < 1 || n_channels < clients) {
    throw std::invalid_argument("random scheduling needs N >= M >= 1");
  }
  std::vector<int> perm(static_cast<std::size_t>(n_channels));
  std::iota(perm.begin(), perm.end(), 0);
  // Partial Fisher-Yates: the first M slots form a uniform ordered M-subset.
  for (int j = 0; j < clients; ++j) {
    const auto pick = j + static_cast<int>(rng.index(static_cast<std::size_t>(n_channels - j)));
    std::swap(perm[j], perm[pick]);
  }
  perm.resize(static_cast<std::size_t>(clients));
  return Assignment(std::move(perm), n_channels);
}

}  // namespace aoisched
