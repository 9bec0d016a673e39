#pragma once

#include <map>

#include "snls/config.hpp"
#include "snls/ensemble.hpp"
#include "snls/perturb.hpp"

namespace snls {

struct Verdict {
  std::string experiment;
  bool pass = false;
  std::map<std::string, double> metrics;
  std::map<std::string, double> tolerances;
  std::uint64_t seed = 0;
  std::string config_hash;
};

std::string verdict_to_json(const Verdict& verdict);

struct RunArtifacts {
  bool pass = false;
  std::vector<Verdict> verdicts;
  std::filesystem::path out_dir;
};

/// Physics objects materialized from a validated config.
struct ExperimentSetup {
  GridPtr grid;
  NonlinearitySpec spec;
  MultiplierOperator op;
  GridField u0;
  SolverConfig solver;
  std::uint64_t seed = 0;
};

ExperimentSetup materialize(const ExperimentConfig& config,
                            std::optional<std::uint64_t> cli_seed = {});

/// Runs the configured experiment: writes the config snapshot first, then
/// stats/trajectory CSVs and one verdict JSON per enabled test under the
/// output directory. Pass/fail is the conjunction of the verdicts.
RunArtifacts run_experiment(const ExperimentConfig& config,
                            std::optional<std::uint64_t> cli_seed = {});

/// Built-in presets: (name, one-line description).
std::vector<std::pair<std::string, std::string>> preset_list();
std::string preset_config_text(const std::string& name);

/// Samples a stochastic-convolution path onto the solver half-step lattice.
PathForcing sample_convolution_path(const GridPtr& grid,
                                    const MultiplierOperator& op,
                                    NoiseStream stream, double t0,
                                    double half_dt, std::int64_t half_steps);

}  // namespace snls
