#include "aoisched/env.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace aoisched {

namespace {

void check_means(std::span<const double> means, int n_channels) {
  if (static_cast<int>(means.size()) != n_channels) {
    throw std::invalid_argument("mean vector has " + std::to_string(means.size()) +
                                " entries, expected " + std::to_string(n_channels));
  }
  for (double mu : means) {
    if (!(mu >= 0.0 && mu <= 1.0)) {
      throw std::invalid_argument("channel mean " + std::to_string(mu) + " outside [0, 1]");
    }
  }
}

}  // namespace

const char* to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::kStationary:
      return "stationary";
    case ChannelKind::kPiecewiseStationary:
      return "piecewise";
    case ChannelKind::kAdversarial:
      return "adversarial";
  }
  return "unknown";
}

StateMatrix::StateMatrix(int channels, Round rounds)
    : channels_(channels),
      rounds_(rounds),
      data_(static_cast<std::size_t>(channels) * static_cast<std::size_t>(rounds), 0) {
  if (channels < 1 || rounds < 1) {
    throw std::invalid_argument("state matrix needs at least one channel and one round");
  }
}

int ChannelEnvironment::breakpoint_count() const {
  if (kind_ == ChannelKind::kAdversarial) return 0;
  return static_cast<int>(segments_.size()) - 1;
}

void ChannelEnvironment::check_round(Round t) const {
  if (t < 1 || t > horizon_) {
    throw std::out_of_range("round " + std::to_string(t) + " outside [1, " +
                            std::to_string(horizon_) + "]");
  }
}

const Segment& ChannelEnvironment::segment_at(Round t) const {
  // Last segment whose start is <= t.
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](Round r, const Segment& s) { return r < s.start_round; });
  return *std::prev(it);
}

ChannelRealization ChannelEnvironment::sample_round(Round t, Rng& rng) const {
  check_round(t);
  ChannelRealization out;
  out.round = t;
  out.states.resize(static_cast<std::size_t>(n_channels_));
  if (kind_ == ChannelKind::kAdversarial) {
    for (int k = 0; k < n_channels_; ++k) out.states[k] = adversarial_.at(k, t);
    return out;
  }
  const Segment& seg = segment_at(t);
  for (int k = 0; k < n_channels_; ++k) {
    out.states[k] = rng.bernoulli(seg.means[k]) ? 1 : 0;
  }
  return out;
}

std::vector<double> ChannelEnvironment::true_means(Round t) const {
  check_round(t);
  reads_.count.fetch_add(1, std::memory_order_relaxed);
  if (kind_ == ChannelKind::kAdversarial) {
    std::vector<double> column(static_cast<std::size_t>(n_channels_));
    for (int k = 0; k < n_channels_; ++k) column[k] = adversarial_.at(k, t);
    return column;
  }
  return segment_at(t).means;
}

ChannelEnvironment make_stationary(std::vector<double> means, Round horizon) {
  if (means.empty()) throw std::invalid_argument("need at least one channel");
  const int n = static_cast<int>(means.size());
  auto env = make_piecewise(n, horizon, {}, {std::move(means)});
  env.kind_ = ChannelKind::kStationary;
  return env;
}

ChannelEnvironment make_piecewise(int n_channels, Round horizon, std::vector<Round> breakpoints,
                                  std::vector<std::vector<double>> per_segment_means) {
  if (n_channels < 1) throw std::invalid_argument("need at least one channel");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (per_segment_means.size() != breakpoints.size() + 1) {
    throw std::invalid_argument("expected " + std::to_string(breakpoints.size() + 1) +
                                " segment mean vectors, got " +
                                std::to_string(per_segment_means.size()));
  }
  Round previous = 1;
  for (Round b : breakpoints) {
    if (b <= previous) throw std::invalid_argument("breakpoints must be strictly increasing and > 1");
    if (b > horizon) throw std::invalid_argument("breakpoint beyond horizon");
    previous = b;
  }
  for (const auto& means : per_segment_means) check_means(means, n_channels);

  ChannelEnvironment env;
  env.kind_ = ChannelKind::kPiecewiseStationary;
  env.n_channels_ = n_channels;
  env.horizon_ = horizon;
  env.segments_.reserve(per_segment_means.size());
  env.segments_.push_back({1, std::move(per_segment_means[0])});
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    env.segments_.push_back({breakpoints[i], std::move(per_segment_means[i + 1])});
  }
  return env;
}

ChannelEnvironment make_adversarial(StateMatrix states) {
  if (states.channels() < 1) throw std::invalid_argument("empty state matrix");
  for (int k = 0; k < states.channels(); ++k) {
    for (std::uint8_t s : states.row(k)) {
      if (s > 1) throw std::invalid_argument("adversarial state matrix entries must be 0 or 1");
    }
  }
  ChannelEnvironment env;
  env.kind_ = ChannelKind::kAdversarial;
  env.n_channels_ = states.channels();
  env.horizon_ = states.rounds();
  env.adversarial_ = std::move(states);
  return env;
}

StateMatrix gen_adversarial_flips(int n_channels, Round horizon, double flip_probability,
                                  std::uint64_t seed) {
  if (!(flip_probability >= 0.0 && flip_probability <= 1.0)) {
    throw std::invalid_argument("flip_probability outside [0, 1]");
  }
  StateMatrix states(n_channels, horizon);
  Rng rng(seed);
  for (int k = 0; k < n_channels; ++k) {
    std::uint8_t s = rng.bernoulli(0.5) ? 1 : 0;
    states.set(k, 1, s);
    for (Round t = 2; t <= horizon; ++t) {
      if (rng.bernoulli(flip_probability)) s ^= 1;
      states.set(k, t, s);
    }
  }
  return states;
}

std::vector<Round> equal_breakpoints(Round horizon, int segment_count) {
  if (segment_count < 1) throw std::invalid_argument("segment_count must be >= 1");
  if (segment_count > horizon) throw std::invalid_argument("more segments than rounds");
  std::vector<Round> out;
  for (int j = 1; j < segment_count; ++j) {
    out.push_back(1 + (horizon * j) / segment_count);
  }
  return out;
}

std::vector<std::vector<double>> draw_segment_means(int n_channels, int segment_count, double low,
                                                    double high, Rng& rng) {
  if (!(low >= 0.0 && high <= 1.0 && low <= high)) {
    throw std::invalid_argument("mean range must satisfy 0 <= low <= high <= 1");
  }
  std::vector<std::vector<double>> out(static_cast<std::size_t>(segment_count),
                                       std::vector<double>(static_cast<std::size_t>(n_channels)));
  for (auto& seg : out) {
    for (double& mu : seg) mu = low + (high - low) * rng.uniform();
  }
  return out;
}

StateMatrix load_state_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open state matrix " + path.string());
  std::vector<std::vector<std::uint8_t>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::uint8_t> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cell.erase(std::remove_if(cell.begin(), cell.end(), ::isspace), cell.end());
      if (cell == "0") {
        row.push_back(0);
      } else if (cell == "1") {
        row.push_back(1);
      } else {
        throw std::invalid_argument("non-binary entry '" + cell + "' in " + path.string());
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows[0].empty()) throw std::invalid_argument("empty state matrix file");
  StateMatrix states(static_cast<int>(rows.size()), static_cast<Round>(rows[0].size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].size() != rows[0].size()) throw std::invalid_argument("ragged state matrix rows");
    for (std::size_t t = 0; t < rows[k].size(); ++t) {
      states.set(static_cast<int>(k), static_cast<Round>(t + 1), rows[k][t]);
    }
  }
  return states;
}

void save_state_matrix_csv(const StateMatrix& states, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (int k = 0; k < states.channels(); ++k) {
    auto row = states.row(k);
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (t) out << ',';
      out << static_cast<int>(row[t]);
    }
    out << '\n';
  }
}

}  // namespace aoisched
