#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "snls/dynamics.hpp"

namespace snls {

enum class ExperimentKind {
  deterministic_conservation,
  noise_isometry,
  mass_balance,
  energy_balance,
  lwp_threshold,
  picard_contraction,
  perturbation_sweep,
  long_time_assembly,
  truncation_convergence,
  strichartz_spotcheck,
  moment_bounds,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct OperatorConfig {
  enum class Type { decay, explicit_table };
  Type type = Type::decay;
  double amplitude = 0.1;
  double decay = 1.0;
  std::vector<std::pair<std::vector<int>, double>> entries;
};

struct InitialDataConfig {
  enum class Type { zero, plane_wave, gaussian, random_sobolev };
  Type type = Type::gaussian;
  std::vector<int> mode;
  double amplitude = 0.5;
  double phase = 0.0;
  std::vector<double> center;
  double width = 1.0;
  double sobolev_s = 0.0;
  std::uint64_t data_seed = 1;
};

/// Experiment-specific knobs; every field has a working default.
struct ExperimentParams {
  double eta = 0.25;
  double epsilon = 1.0;
  double holder_q = 8.0;
  int holder_depth = 6;
  int paths = 10;
  int picard_iterations = 7;
  double picard_tol = 2e-6;
  double window_t = 0.5;  // interval length for lwp/picard experiments
  std::vector<double> amplitudes;
  std::vector<double> truncation_modes;  // N values in mode-index units
  int spotcheck_samples = 100;
  double moment_power = 2.0;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::mass_balance;

  int dimension = 1;
  int criticality = 0;  // 0 mass, 1 energy, -1 explicit p
  double p = 5.0;
  int grid_modes = 64;
  double domain_length = 8.0 * 3.14159265358979323846;

  OperatorConfig op;
  SolverConfig solver;
  InitialDataConfig data;

  int trajectories = 256;
  std::optional<std::uint64_t> seed;
  double r_max = std::numeric_limits<double>::infinity();
  int threads = 1;

  ExperimentParams params;
  std::string output_dir = "out";
};

/// Parses and validates a config file; unknown keys are rejected with the
/// offending key path, defaults are filled.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text);

/// Canonical JSON snapshot (sorted keys) used for artifacts and hashing.
std::string config_to_json(const ExperimentConfig& config);

/// Seed precedence: CLI flag > config key > SNLS_SEED env > 0.
std::uint64_t resolve_seed(const ExperimentConfig& config,
                           std::optional<std::uint64_t> cli_seed);

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace snls
