#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aoisched/rng.hpp"

namespace aoisched {

// Row-major feature matrix with integer class labels.
struct Dataset {
  std::size_t dim = 0;
  int classes = 0;
  std::vector<double> features;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const { return {features.data() + i * dim, dim}; }
};

// Gaussian-mixture classification task: one center per class drawn from
// N(0, center_scale^2 I), samples = center + N(0, noise^2 I). Feature f is
// then multiplied by scale_spread^(-f / (features - 1)), so the last feature
// is scale_spread times smaller than the first. The Bayes classifier is
// unchanged but gradient descent needs many steps along the small directions.
struct TaskSpec {
  int features = 20;
  int classes = 10;
  int samples_per_client = 200;
  int validation_samples = 1000;
  double center_scale = 1.0;
  double noise = 1.0;
  double scale_spread = 10.0;

  bool operator==(const TaskSpec&) const = default;
};

struct SyntheticTask {
  Dataset train;       // clients * samples_per_client, balanced classes
  Dataset validation;  // server-held split, drawn separately
};

SyntheticTask make_synthetic_task(const TaskSpec& spec, int clients, Rng& rng);

// Softmax regression. Parameters are a flat vector: classes x dim weights
// followed by classes biases.
std::size_t softmax_parameter_count(std::size_t dim, int classes);

// Mean cross-entropy over the given rows; writes the mean gradient into grad
// (resized) when non-null.
double softmax_loss(std::span<const double> params, const Dataset& data,
                    std::span<const std::size_t> rows, std::vector<double>* grad);

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};

// Mean cross-entropy and top-1 accuracy over the whole set (argmax ties go to
// the lower class index).
Evaluation evaluate(std::span<const double> params, const Dataset& data);

// Splits each class across clients by Dirichlet(alpha) proportions (largest
// remainder rounding). Draws are repeated until every client holds at least
// one sample; throws after max_retries failures. Returns row indices per
// client.
std::vector<std::vector<std::size_t>> dirichlet_partition(std::span<const int> labels, int classes,
                                                          double alpha, int clients, Rng& rng,
                                                          int max_retries = 100);

}  // namespace aoisched
