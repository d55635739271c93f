#include "aoisched/glr_cucb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace aoisched {

namespace {

constexpr double kKlEpsilon = 1e-9;

// n ln n, cached for small n.
class XLogX {
 public:
  static const XLogX& instance() {
    static const XLogX table;
    return table;
  }
  double operator()(std::uint32_t n) const {
    return n < values_.size() ? values_[n] : n * std::log(static_cast<double>(n));
  }

 private:
  XLogX() : values_(1u << 17) {
    values_[0] = 0.0;
    for (std::size_t n = 1; n < values_.size(); ++n) {
      values_[n] = static_cast<double>(n) * std::log(static_cast<double>(n));
    }
  }
  std::vector<double> values_;
};

}  // namespace

double kl_bernoulli(double p, double q) {
  q = std::clamp(q, kKlEpsilon, 1.0 - kKlEpsilon);
  double out = 0.0;
  if (p > 0.0) out += p * std::log(p / q);
  if (p < 1.0) out += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  return out;
}

GlrDetector::GlrDetector(double delta) : delta_(delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
}

bool GlrDetector::push(std::uint8_t sample) {
  samples_.push_back(sample ? 1 : 0);
  prefix_ones_.push_back(prefix_ones_.back() + (sample ? 1 : 0));
  if (samples_.size() < 2) return false;
  return statistic() >= threshold();
}

void GlrDetector::reset() {
  samples_.clear();
  prefix_ones_.assign(1, 0);
}

double GlrDetector::threshold(std::size_t n, double delta) {
  const double d = static_cast<double>(n);
  return (1.0 + 1.0 / d) * std::log(3.0 * d * std::sqrt(d) / delta);
}

double GlrDetector::statistic() const {
  const auto n = static_cast<std::uint32_t>(samples_.size());
  if (n < 2) return 0.0;
  const std::uint32_t total = prefix_ones_[n];
  if (total == 0 || total == n) return 0.0;
  const XLogX& xl = XLogX::instance();
  // s kl(k1/s, K/n) + (n-s) kl(k2/(n-s), K/n)
  //   = [xl(k1) + xl(s-k1) - xl(s)] + [xl(k2) + xl(n-s-k2) - xl(n-s)]
  //     - [xl(K) + xl(n-K) - xl(n)]
  const double whole = xl(total) + xl(n - total) - xl(n);
  // Each split term is a non-positive log-likelihood, so start below all of them.
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint32_t s = 1; s < n; ++s) {
    const std::uint32_t k1 = prefix_ones_[s];
    const std::uint32_t k2 = total - k1;
    const std::uint32_t rest = n - s;
    const double value = xl(k1) + xl(s - k1) - xl(s) + xl(k2) + xl(rest - k2) - xl(rest);
    best = std::max(best, value);
  }
  return std::max(0.0, best - whole);
}

double default_exploration_alpha(Round horizon) {
  const double t = static_cast<double>(horizon);
  return 0.05 * std::sqrt(std::log(t) / t);
}

GlrCucb::GlrCucb(int n_channels, int clients, GlrCucbParams params)
    : n_channels_(n_channels),
      clients_(clients),
      params_(params),
      detectors_(static_cast<std::size_t>(n_channels), GlrDetector(params.delta)) {
  if (clients < 1 || n_channels < clients) throw std::invalid_argument("need N >= M >= 1");
  if (!(params.alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  if (params.alpha > 0.0) {
    const double raw = std::floor(n_channels / params.alpha);
    cycle_ = raw > static_cast<double>(std::numeric_limits<std::int32_t>::max())
                 ? std::numeric_limits<std::int32_t>::max()
                 : std::max<std::int64_t>(static_cast<std::int64_t>(raw), n_channels + 1);
  }
}

double GlrCucb::ucb(int channel, Round t) const {
  const auto& d = detectors_[channel];
  if (d.size() == 0) return std::numeric_limits<double>::infinity();
  const double elapsed = static_cast<double>(t - last_restart_);
  return d.mean() + std::sqrt(3.0 * std::log(elapsed) / (2.0 * static_cast<double>(d.size())));
}

std::vector<double> GlrCucb::ucb_values(Round t) const {
  std::vector<double> out(static_cast<std::size_t>(n_channels_));
  for (int k = 0; k < n_channels_; ++k) out[k] = ucb(k, t);
  return out;
}

std::vector<double> GlrCucb::emp_means() const {
  std::vector<double> out(static_cast<std::size_t>(n_channels_));
  for (int k = 0; k < n_channels_; ++k) out[k] = emp_mean(k);
  return out;
}

GlrCucb::Selection GlrCucb::select(Round t, Rng& rng) const {
  if (t <= last_restart_) throw std::invalid_argument("round precedes the last restart");
  const auto scores = ucb_values(t);
  Selection out;
  if (cycle_ > 0) {
    const std::int64_t i = (t - last_restart_) % cycle_;
    if (i >= 1 && i <= n_channels_) {
      // Forced exploration: a uniform M-subset containing channel i.
      const int forced = static_cast<int>(i - 1);
      std::vector<int> others;
      for (int k = 0; k < n_channels_; ++k) {
        if (k != forced) others.push_back(k);
      }
      std::vector<int> chosen{forced};
      for (int j = 0; j + 1 < clients_; ++j) {
        const auto pick = j + static_cast<int>(rng.index(others.size() - j));
        std::swap(others[j], others[pick]);
        chosen.push_back(others[j]);
      }
      out.ranked = rank_by_score(chosen, scores);
      out.forced = true;
    }
  }
  if (!out.forced) out.ranked = top_channels(scores, clients_);
  out.assignment = rotate_assignment(out.ranked, t, n_channels_);
  return out;
}

bool GlrCucb::update(std::span<const ChannelFeedback> feedback, Round t) {
  for (const auto& f : feedback) {
    if (f.channel < 0 || f.channel >= n_channels_) throw std::out_of_range("feedback channel");
  }
  bool fired = false;
  for (const auto& f : feedback) {
    if (detectors_[f.channel].push(f.reward)) fired = true;
  }
  if (fired) {
    for (auto& d : detectors_) d.reset();
    last_restart_ = t;
    ++restarts_;
  }
  return fired;
}

}  // namespace aoisched
