#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "aoisched/aoi.hpp"
#include "aoisched/assignment.hpp"
#include "aoisched/glr_cucb.hpp"

namespace aoisched {

// Scheduled channels, best first. scores[i] belongs to order[i].
struct ChannelRanking {
  std::vector<int> order;
  std::vector<double> scores;
};

// Sort by UCB value (piecewise-stationary mode); +inf ties keep index order.
ChannelRanking rank_channels_ucb(const GlrCucb& state, std::span<const int> selected, Round t);

// Sort by historical success rate; never-observed channels rank last
// (score -inf) in index order.
ChannelRanking rank_channels_mean(const ChannelHistory& history, std::span<const int> selected);

// Cosine of the angle between a and b; NaN when either vector is zero.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// (aggregate - zeta * own) / (1 - zeta): removes one participant from a
// zeta-weighted average. zeta must be < 1.
std::vector<double> leave_one_out(std::span<const double> aggregate, std::span<const double> own,
                                  double zeta);

struct ContributionTerms {
  double gamma_cos = 0.0;  // 1 - cos(client gradient, leave-one-out gradient)
  double gamma_err = 0.0;  // validation loss of the leave-one-out model
  double raw = 0.0;        // gamma_cos * gamma_err
};

using LossFunction = std::function<double(std::span<const double>)>;

// Leave-one-out marginal contribution of one client. A zero gradient on either
// side counts as orthogonal (gamma_cos = 1).
ContributionTerms marginal_contribution(std::span<const double> client_gradient,
                                        std::span<const double> client_model,
                                        std::span<const double> global_gradient,
                                        std::span<const double> global_model, double zeta,
                                        const LossFunction& validation_loss);

// Min-max scaling to [0, 1]; a constant input maps to `constant_value`.
std::vector<double> min_max_normalize(std::span<const double> values, double constant_value);

// Server-side buffers of each client's last delivered gradient and model,
// plus the contribution scores derived from them.
class ContributionState {
 public:
  ContributionState(int clients, std::size_t dim);

  // Only on successful delivery; a failed upload leaves the buffer untouched.
  void update_buffers(int client, std::span<const double> gradient, std::span<const double> model,
                      Round t);

  bool has_buffer(int client) const { return refreshed_[client] > 0; }
  Round refresh_round(int client) const { return refreshed_[client]; }
  std::span<const double> gradient(int client) const;
  std::span<const double> model(int client) const;

  // Recomputes the raw contribution of every buffered client whose weight is
  // below 1 against the aggregate gradient/model, then rescales. Clients
  // without a raw score (cold start) sit at the neutral 1/M.
  void refresh(std::span<const double> global_gradient, std::span<const double> global_model,
               std::span<const double> zeta, const LossFunction& validation_loss);

  // Normalized scores in [0, 1].
  std::span<const double> scores() const { return scores_; }
  std::span<const ContributionTerms> terms() const { return terms_; }
  int clients() const { return static_cast<int>(refreshed_.size()); }

 private:
  void rescale();

  std::size_t dim_;
  std::vector<double> gradients_;
  std::vector<double> models_;
  std::vector<Round> refreshed_;
  std::vector<ContributionTerms> terms_;
  std::vector<std::uint8_t> has_raw_;
  std::vector<double> scores_;
};

struct FairnessBlend {
  double variance = 0.0;             // V_t
  double normalized_variance = 0.0;  // V_t / max_{tau<=t} V_tau, 0 if that max is 0
  double beta_t = 0.0;               // beta * normalized_variance
  std::vector<double> normalized_ages;  // a_i / max_{tau<=t, j} a_j(tau)
};

// Tracks the running maxima needed to normalize AoI variance and ages.
class FairnessState {
 public:
  explicit FairnessState(double beta);

  // Folds the current ages into the running maxima and evaluates the blend.
  FairnessBlend blend(std::span<const Age> ages);

  double beta() const { return beta_; }
  double max_variance() const { return max_variance_; }
  Age max_age() const { return max_age_; }

 private:
  double beta_;
  double max_variance_ = 0.0;
  Age max_age_ = 0;
};

// lambda_i = (1 - beta_t) C_i + beta_t a~_i.
std::vector<double> priority(std::span<const double> contributions,
                             std::span<const double> normalized_ages, double beta_t);

// The client with the i-th highest priority (lower index on ties) gets
// ranking.order[i].
Assignment match_clients(const ChannelRanking& ranking, std::span<const double> priorities,
                         int n_channels);

// Contribution-proportional weights over the successful clients, summing to
// 1 among them; uniform if all their contributions are 0. Throws on an empty
// success set.
std::vector<double> aggregation_weights(std::span<const double> contributions,
                                        std::span<const std::uint8_t> success);

}  // namespace aoisched
