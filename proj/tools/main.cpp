#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "aoisched/experiment.hpp"
#include "aoisched/presets.hpp"
#include "aoisched/summary.hpp"

namespace {

void print_summary(const std::vector<aoisched::SummaryRow>& rows) {
  std::printf("%-24s %5s %22s %18s %24s %8s\n", "variant", "seeds", "final regret",
              "final accuracy", "cum AoI variance", "slope");
  for (const auto& r : rows) {
    std::printf("%-24s %5d %12.1f +- %-7.1f %8.4f +- %-6.4f %12.1f +- %-9.1f %8.3f\n",
                r.label.c_str(), r.seeds, r.final_regret.mean, r.final_regret.std,
                r.final_accuracy.mean, r.final_accuracy.std, r.cumulative_variance.mean,
                r.cumulative_variance.std, r.loglog_slope);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AoI-aware channel scheduling for asynchronous federated learning"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment from a config file or a preset");
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed_override;
  std::string output;
  bool bandit_only = false;
  bool then_summarize = false;
  int threads = 0;
  run->add_option("config", config_path, "JSON experiment config");
  run->add_option("--preset", preset, "Built-in preset name (see `presets list`)");
  run->add_option("--seed-override", seed_override, "Run this single seed instead");
  run->add_option("--output", output, "Output directory (overrides the config)");
  run->add_flag("--bandit-only", bandit_only, "Skip FL training; emit regret CSVs only");
  run->add_option("--threads", threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  run->add_flag("--summarize", then_summarize, "Print the summary table afterwards");

  auto* summarize = app.add_subcommand("summarize", "Aggregate the runs in an output directory");
  std::string summary_dir;
  summarize->add_option("dir", summary_dir, "Experiment output directory")->required();

  auto* presets = app.add_subcommand("presets", "Inspect built-in presets");
  presets->require_subcommand(1);
  auto* list = presets->add_subcommand("list", "List preset names");
  auto* show = presets->add_subcommand("show", "Print a preset as a JSON config");
  std::string show_name;
  show->add_option("name", show_name)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (config_path.empty() == preset.empty()) {
        throw std::invalid_argument("give exactly one of a config path or --preset");
      }
      aoisched::ExperimentConfig config =
          preset.empty() ? aoisched::load_config(config_path) : aoisched::make_preset(preset);
      aoisched::RunOptions options;
      options.seed_override = seed_override;
      if (!output.empty()) options.output = output;
      options.bandit_only = bandit_only;
      options.threads = threads;
      const auto result = aoisched::run_experiment(config, options);
      std::cout << "wrote " << result.files.size() << " files to " << result.directory.string()
                << '\n';
      if (then_summarize) print_summary(aoisched::summarize(result.directory));
    } else if (*summarize) {
      print_summary(aoisched::summarize(summary_dir));
      std::cout << "wrote " << (std::filesystem::path(summary_dir) / "summary.csv").string()
                << '\n';
    } else if (*list) {
      for (const auto& p : aoisched::list_presets()) {
        std::printf("%-16s %s\n", p.name.c_str(), p.description.c_str());
      }
    } else if (*show) {
      std::cout << aoisched::to_json(aoisched::make_preset(show_name)).dump(2) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
