#pragma once

#include <string>
#include <vector>

#include "aoisched/experiment.hpp"

namespace aoisched {

struct PresetInfo {
  std::string name;
  std::string description;
};

std::vector<PresetInfo> list_presets();

// Throws std::invalid_argument for an unknown name.
ExperimentConfig make_preset(const std::string& name);

// Channel means of the regret presets: segment_count rows over n_channels,
// drawn once from a fixed stream in [0.1, 0.9].
std::vector<std::vector<double>> preset_segment_means(int n_channels, int segment_count);

}  // namespace aoisched
