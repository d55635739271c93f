#include "aoisched/match.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace aoisched {

namespace {

ChannelRanking ranking_from(std::span<const int> selected, std::span<const double> score) {
  ChannelRanking out;
  out.order = rank_by_score(selected, score);
  out.scores.reserve(out.order.size());
  for (int k : out.order) out.scores.push_back(score[k]);
  return out;
}

void check_same_size(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("vector dimensions differ");
}

}  // namespace

ChannelRanking rank_channels_ucb(const GlrCucb& state, std::span<const int> selected, Round t) {
  return ranking_from(selected, state.ucb_values(t));
}

ChannelRanking rank_channels_mean(const ChannelHistory& history, std::span<const int> selected) {
  std::vector<double> score(static_cast<std::size_t>(history.n_channels()));
  for (int k = 0; k < history.n_channels(); ++k) {
    score[k] = history.observed(k) ? history.mean(k) : -std::numeric_limits<double>::infinity();
  }
  return ranking_from(selected, score);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  check_same_size(a, b);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::vector<double> leave_one_out(std::span<const double> aggregate, std::span<const double> own,
                                  double zeta) {
  check_same_size(aggregate, own);
  if (!(zeta < 1.0)) throw std::domain_error("leave-one-out undefined for aggregation weight 1");
  std::vector<double> out(aggregate.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (aggregate[i] - zeta * own[i]) / (1.0 - zeta);
  }
  return out;
}

ContributionTerms marginal_contribution(std::span<const double> client_gradient,
                                        std::span<const double> client_model,
                                        std::span<const double> global_gradient,
                                        std::span<const double> global_model, double zeta,
                                        const LossFunction& validation_loss) {
  const auto others_gradient = leave_one_out(global_gradient, client_gradient, zeta);
  const auto others_model = leave_one_out(global_model, client_model, zeta);
  ContributionTerms out;
  const double cos = cosine_similarity(client_gradient, others_gradient);
  out.gamma_cos = std::isnan(cos) ? 1.0 : 1.0 - cos;
  out.gamma_err = validation_loss(others_model);
  out.raw = out.gamma_cos * out.gamma_err;
  return out;
}

std::vector<double> min_max_normalize(std::span<const double> values, double constant_value) {
  std::vector<double> out(values.begin(), values.end());
  if (out.empty()) return out;
  const auto [lo, hi] = std::minmax_element(out.begin(), out.end());
  const double min = *lo, range = *hi - *lo;
  for (double& v : out) v = range > 0.0 ? (v - min) / range : constant_value;
  return out;
}

ContributionState::ContributionState(int clients, std::size_t dim)
    : dim_(dim),
      gradients_(static_cast<std::size_t>(clients) * dim, 0.0),
      models_(static_cast<std::size_t>(clients) * dim, 0.0),
      refreshed_(static_cast<std::size_t>(clients), 0),
      terms_(static_cast<std::size_t>(clients)),
      has_raw_(static_cast<std::size_t>(clients), 0),
      scores_(static_cast<std::size_t>(clients), 1.0 / clients) {
  if (clients < 1) throw std::invalid_argument("need at least one client");
}

std::span<const double> ContributionState::gradient(int client) const {
  return {gradients_.data() + static_cast<std::size_t>(client) * dim_, dim_};
}

std::span<const double> ContributionState::model(int client) const {
  return {models_.data() + static_cast<std::size_t>(client) * dim_, dim_};
}

void ContributionState::update_buffers(int client, std::span<const double> gradient,
                                       std::span<const double> model, Round t) {
  if (gradient.size() != dim_ || model.size() != dim_) {
    throw std::invalid_argument("buffer dimension mismatch");
  }
  const auto offset = static_cast<std::ptrdiff_t>(static_cast<std::size_t>(client) * dim_);
  std::copy(gradient.begin(), gradient.end(), gradients_.begin() + offset);
  std::copy(model.begin(), model.end(), models_.begin() + offset);
  refreshed_[client] = t;
}

void ContributionState::refresh(std::span<const double> global_gradient,
                                std::span<const double> global_model,
                                std::span<const double> zeta, const LossFunction& validation_loss) {
  if (zeta.size() != refreshed_.size()) throw std::invalid_argument("one weight per client");
  for (int m = 0; m < clients(); ++m) {
    if (!has_buffer(m) || !(zeta[m] < 1.0)) continue;
    terms_[m] = marginal_contribution(gradient(m), model(m), global_gradient, global_model,
                                      zeta[m], validation_loss);
    has_raw_[m] = 1;
  }
  rescale();
}

void ContributionState::rescale() {
  const double neutral = 1.0 / clients();
  std::vector<double> raw;
  for (int m = 0; m < clients(); ++m) {
    if (has_raw_[m]) raw.push_back(terms_[m].raw);
  }
  const auto scaled = min_max_normalize(raw, neutral);
  std::size_t next = 0;
  for (int m = 0; m < clients(); ++m) scores_[m] = has_raw_[m] ? scaled[next++] : neutral;
}

FairnessState::FairnessState(double beta) : beta_(beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in [0, 1]");
}

FairnessBlend FairnessState::blend(std::span<const Age> ages) {
  FairnessBlend out;
  out.variance = age_variance(ages);
  max_variance_ = std::max(max_variance_, out.variance);
  for (Age a : ages) max_age_ = std::max(max_age_, a);
  out.normalized_variance = max_variance_ > 0.0 ? out.variance / max_variance_ : 0.0;
  out.beta_t = beta_ * out.normalized_variance;
  out.normalized_ages.reserve(ages.size());
  for (Age a : ages) {
    out.normalized_ages.push_back(max_age_ > 0 ? static_cast<double>(a) / max_age_ : 0.0);
  }
  return out;
}

std::vector<double> priority(std::span<const double> contributions,
                             std::span<const double> normalized_ages, double beta_t) {
  check_same_size(contributions, normalized_ages);
  std::vector<double> out(contributions.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (1.0 - beta_t) * contributions[i] + beta_t * normalized_ages[i];
  }
  return out;
}

Assignment match_clients(const ChannelRanking& ranking, std::span<const double> priorities,
                         int n_channels) {
  if (ranking.order.size() != priorities.size()) {
    throw std::invalid_argument("need exactly one ranked channel per client");
  }
  std::vector<int> clients(priorities.size());
  std::iota(clients.begin(), clients.end(), 0);
  std::stable_sort(clients.begin(), clients.end(),
                   [&](int a, int b) { return priorities[a] > priorities[b]; });
  std::vector<int> channel_of(priorities.size());
  for (std::size_t rank = 0; rank < clients.size(); ++rank) {
    channel_of[clients[rank]] = ranking.order[rank];
  }
  return Assignment(std::move(channel_of), n_channels);
}

std::vector<double> aggregation_weights(std::span<const double> contributions,
                                        std::span<const std::uint8_t> success) {
  if (contributions.size() != success.size()) throw std::invalid_argument("one flag per client");
  double total = 0.0;
  std::size_t participants = 0;
  for (std::size_t m = 0; m < success.size(); ++m) {
    if (!success[m]) continue;
    if (contributions[m] < 0.0) throw std::invalid_argument("negative contribution score");
    total += contributions[m];
    ++participants;
  }
  if (participants == 0) throw std::invalid_argument("no successful clients to aggregate");
  std::vector<double> zeta(success.size(), 0.0);
  for (std::size_t m = 0; m < success.size(); ++m) {
    if (!success[m]) continue;
    zeta[m] = total > 0.0 ? contributions[m] / total : 1.0 / participants;
  }
  return zeta;
}

}  // namespace aoisched
