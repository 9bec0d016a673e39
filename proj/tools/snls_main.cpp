// Batch driver for SNLS verification experiments.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "snls/experiments.hpp"
#include "snls/io.hpp"

namespace {

int run_command(const std::string& config_path, const std::string& preset,
                std::optional<std::uint64_t> seed, int threads,
                const std::string& out_dir) {
  snls::ExperimentConfig cfg;
  if (!preset.empty()) {
    cfg = snls::parse_config_text(snls::preset_config_text(preset));
  } else if (!config_path.empty()) {
    cfg = snls::parse_config(config_path);
  } else {
    std::cerr << "run: need --config or --preset\n";
    return 2;
  }
  if (threads > 0) cfg.threads = threads;
  if (!out_dir.empty()) cfg.output_dir = out_dir;

  const snls::RunArtifacts artifacts = snls::run_experiment(cfg, seed);
  for (const snls::Verdict& v : artifacts.verdicts) {
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << v.experiment
              << "  (artifacts: " << artifacts.out_dir.string() << ")\n";
    if (!v.pass) {
      for (const auto& [key, value] : v.metrics)
        std::cout << "  " << key << " = " << snls::io::format_double(value)
                  << "\n";
    }
  }
  return artifacts.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral SNLS simulator and identity-verification lab"};
  app.require_subcommand(1);

  std::string config_path, preset, out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 0;

  CLI::App* run = app.add_subcommand("run", "Run an experiment");
  run->add_option("--config", config_path, "Config file (JSON)");
  run->add_option("--preset", preset, "Built-in preset name");
  run->add_option("--seed", seed, "Noise seed (overrides config and env)");
  run->add_option("--threads", threads, "Thread cap for ensembles");
  run->add_option("--out", out_dir, "Output directory");

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "Validate a config");
  validate->add_option("--config", validate_path, "Config file (JSON)")
      ->required();

  std::string write_dir;
  CLI::App* presets = app.add_subcommand("list-presets", "List presets");
  presets->add_option("--write", write_dir,
                      "Also write preset configs into this directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return run_command(config_path, preset, seed, threads, out_dir);
    if (validate->parsed()) {
      snls::parse_config(validate_path);
      std::cout << "ok\n";
      return 0;
    }
    if (presets->parsed()) {
      for (const auto& [name, description] : snls::preset_list()) {
        std::printf("%-28s %s\n", name.c_str(), description.c_str());
        if (!write_dir.empty())
          snls::io::atomic_write(
              std::filesystem::path(write_dir) / (name + ".json"),
              snls::preset_config_text(name));
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
