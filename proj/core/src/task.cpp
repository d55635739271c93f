#include "aoisched/task.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace aoisched {

namespace {

Dataset draw_samples(const std::vector<double>& centers, const TaskSpec& spec, int count,
                     Rng& rng) {
  Dataset out;
  out.dim = static_cast<std::size_t>(spec.features);
  out.classes = spec.classes;
  out.labels.resize(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.labels[i] = i % spec.classes;
  rng.shuffle(std::span<int>(out.labels));
  std::vector<double> scale(out.dim, 1.0);
  for (std::size_t f = 1; f < out.dim; ++f) {
    scale[f] = std::pow(spec.scale_spread, -static_cast<double>(f) / (out.dim - 1));
  }
  out.features.resize(out.labels.size() * out.dim);
  for (std::size_t i = 0; i < out.labels.size(); ++i) {
    const double* center = centers.data() + static_cast<std::size_t>(out.labels[i]) * out.dim;
    for (std::size_t f = 0; f < out.dim; ++f) {
      out.features[i * out.dim + f] = scale[f] * (center[f] + spec.noise * rng.normal());
    }
  }
  return out;
}

// Fills logits for one sample and returns their log-sum-exp.
double class_scores(std::span<const double> params, std::span<const double> x, int classes,
                    std::vector<double>& logits) {
  const std::size_t dim = x.size();
  const double* bias = params.data() + static_cast<std::size_t>(classes) * dim;
  logits.resize(static_cast<std::size_t>(classes));
  for (int c = 0; c < classes; ++c) {
    const double* w = params.data() + static_cast<std::size_t>(c) * dim;
    double z = bias[c];
    for (std::size_t f = 0; f < dim; ++f) z += w[f] * x[f];
    logits[c] = z;
  }
  const double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - peak);
  return peak + std::log(sum);
}

}  // namespace

SyntheticTask make_synthetic_task(const TaskSpec& spec, int clients, Rng& rng) {
  if (spec.features < 1 || spec.classes < 2 || spec.samples_per_client < 1 ||
      spec.validation_samples < 1 || clients < 1 || !(spec.scale_spread >= 1.0)) {
    throw std::invalid_argument("invalid synthetic task dimensions");
  }
  std::vector<double> centers(static_cast<std::size_t>(spec.classes) * spec.features);
  for (double& c : centers) c = spec.center_scale * rng.normal();
  SyntheticTask task;
  task.train = draw_samples(centers, spec, clients * spec.samples_per_client, rng);
  task.validation = draw_samples(centers, spec, spec.validation_samples, rng);
  return task;
}

std::size_t softmax_parameter_count(std::size_t dim, int classes) {
  return static_cast<std::size_t>(classes) * (dim + 1);
}

double softmax_loss(std::span<const double> params, const Dataset& data,
                    std::span<const std::size_t> rows, std::vector<double>* grad) {
  const std::size_t dim = data.dim;
  const int classes = data.classes;
  if (params.size() != softmax_parameter_count(dim, classes)) {
    throw std::invalid_argument("parameter vector does not match the task");
  }
  if (rows.empty()) throw std::invalid_argument("empty batch");
  if (grad) grad->assign(params.size(), 0.0);
  std::vector<double> logits;
  double loss = 0.0;
  const double scale = 1.0 / static_cast<double>(rows.size());
  for (std::size_t r : rows) {
    const auto x = data.row(r);
    const int y = data.labels[r];
    const double lse = class_scores(params, x, classes, logits);
    loss += lse - logits[y];
    if (!grad) continue;
    double* bias_grad = grad->data() + static_cast<std::size_t>(classes) * dim;
    for (int c = 0; c < classes; ++c) {
      const double coeff = (std::exp(logits[c] - lse) - (c == y ? 1.0 : 0.0)) * scale;
      double* w = grad->data() + static_cast<std::size_t>(c) * dim;
      for (std::size_t f = 0; f < dim; ++f) w[f] += coeff * x[f];
      bias_grad[c] += coeff;
    }
  }
  return loss * scale;
}

Evaluation evaluate(std::span<const double> params, const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("empty evaluation set");
  std::vector<double> logits;
  Evaluation out;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double lse = class_scores(params, data.row(i), data.classes, logits);
    out.loss += lse - logits[data.labels[i]];
    const auto best = std::max_element(logits.begin(), logits.end()) - logits.begin();
    if (best == data.labels[i]) ++correct;
  }
  out.loss /= static_cast<double>(data.size());
  out.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  return out;
}

std::vector<std::vector<std::size_t>> dirichlet_partition(std::span<const int> labels, int classes,
                                                          double alpha, int clients, Rng& rng,
                                                          int max_retries) {
  if (!(alpha > 0.0)) throw std::invalid_argument("Dirichlet alpha must be > 0");
  if (clients < 1) throw std::invalid_argument("need at least one client");
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= classes) throw std::invalid_argument("label out of range");
    by_class[labels[i]].push_back(i);
  }
  for (const auto& members : by_class) {
    if (members.empty()) throw std::invalid_argument("every class needs at least one sample");
  }

  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    std::vector<std::vector<std::size_t>> shards(static_cast<std::size_t>(clients));
    for (auto members : by_class) {
      rng.shuffle(std::span<std::size_t>(members));
      std::vector<double> p(static_cast<std::size_t>(clients));
      double total = 0.0;
      for (double& v : p) total += (v = rng.gamma(alpha));
      if (!(total > 0.0)) {
        // Every gamma draw underflowed; fall back to one random owner.
        std::fill(p.begin(), p.end(), 0.0);
        p[rng.index(p.size())] = total = 1.0;
      }
      // Largest-remainder rounding of p * |class|.
      const double n = static_cast<double>(members.size());
      std::vector<std::size_t> counts(p.size());
      std::vector<std::pair<double, int>> remainders(p.size());
      std::size_t assigned = 0;
      for (int j = 0; j < clients; ++j) {
        const double exact = p[j] / total * n;
        counts[j] = static_cast<std::size_t>(std::floor(exact));
        assigned += counts[j];
        remainders[j] = {exact - std::floor(exact), j};
      }
      std::stable_sort(remainders.begin(), remainders.end(),
                       [](const auto& a, const auto& b) { return a.first > b.first; });
      for (std::size_t r = 0; assigned < members.size(); ++r, ++assigned) {
        ++counts[remainders[r].second];
      }
      std::size_t cursor = 0;
      for (int j = 0; j < clients; ++j) {
        for (std::size_t c = 0; c < counts[j]; ++c) shards[j].push_back(members[cursor++]);
      }
    }
    const bool all_nonempty =
        std::all_of(shards.begin(), shards.end(), [](const auto& s) { return !s.empty(); });
    if (all_nonempty) {
      for (auto& s : shards) std::sort(s.begin(), s.end());
      return shards;
    }
  }
  throw std::runtime_error("Dirichlet partition left a client without data after " +
                           std::to_string(max_retries) +
                           " retries; use a larger dataset or a larger alpha");
}

}  // namespace aoisched
