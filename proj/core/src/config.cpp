#include "snls/config.hpp"

#include <json.hpp>

#include <cstdlib>
#include <set>

#include "snls/io.hpp"

namespace snls {

using nlohmann::json;

namespace {

const std::vector<std::pair<ExperimentKind, const char*>> kKindNames = {
    {ExperimentKind::deterministic_conservation, "deterministic-conservation"},
    {ExperimentKind::noise_isometry, "noise-isometry"},
    {ExperimentKind::mass_balance, "mass-balance"},
    {ExperimentKind::energy_balance, "energy-balance"},
    {ExperimentKind::lwp_threshold, "lwp-threshold"},
    {ExperimentKind::picard_contraction, "picard-contraction"},
    {ExperimentKind::perturbation_sweep, "perturbation-sweep"},
    {ExperimentKind::long_time_assembly, "long-time-assembly"},
    {ExperimentKind::truncation_convergence, "truncation-convergence"},
    {ExperimentKind::strichartz_spotcheck, "strichartz-spotcheck"},
    {ExperimentKind::moment_bounds, "moment-bounds"},
};

void reject_unknown(const json& j, const std::string& path,
                    const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError(path + ": unknown key '" + it.key() + "'");
  }
}

template <typename T>
T get_or(const json& j, const std::string& path, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + "." + key + ": wrong type");
  }
}

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (const auto& [k, n] : kKindNames)
    if (name == n) return k;
  throw ConfigError("experiment: unknown kind '" + name + "'");
}

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(j, "config",
                 {"experiment", "physics", "operator", "solver", "ensemble",
                  "initial_data", "params", "output_dir", "threads"});

  ExperimentConfig cfg;
  if (!j.contains("experiment"))
    throw ConfigError("config.experiment: required");
  cfg.kind = experiment_kind_from_string(j.at("experiment").get<std::string>());
  cfg.output_dir = get_or<std::string>(j, "config", "output_dir", "out");
  cfg.threads = get_or<int>(j, "config", "threads", 1);

  if (j.contains("physics")) {
    const json& p = j.at("physics");
    reject_unknown(p, "config.physics",
                   {"dimension", "criticality", "grid_modes", "domain_length"});
    cfg.dimension = get_or<int>(p, "config.physics", "dimension", 1);
    cfg.grid_modes = get_or<int>(p, "config.physics", "grid_modes", 64);
    cfg.domain_length = get_or<double>(p, "config.physics", "domain_length",
                                       cfg.domain_length);
    if (p.contains("criticality")) {
      const json& c = p.at("criticality");
      if (c.is_string()) {
        const std::string s = c.get<std::string>();
        if (s == "mass") {
          cfg.criticality = 0;
        } else if (s == "energy") {
          cfg.criticality = 1;
        } else {
          throw ConfigError(
              "config.physics.criticality: expected \"mass\", \"energy\", or "
              "a number p > 1");
        }
      } else if (c.is_number()) {
        cfg.criticality = -1;
        cfg.p = c.get<double>();
      } else {
        throw ConfigError("config.physics.criticality: wrong type");
      }
    }
  }
  if (cfg.dimension < 1 || cfg.dimension > 4)
    throw ConfigError("config.physics.dimension: must be in [1,4]");
  if (!power_of_two(cfg.grid_modes) || cfg.grid_modes < 8)
    throw ConfigError(
        "config.physics.grid_modes: must be a power of two >= 8");
  if (!(cfg.domain_length > 0.0))
    throw ConfigError("config.physics.domain_length: must be positive");
  if (cfg.criticality == 1 && (cfg.dimension < 3 || cfg.dimension > 6))
    throw ConfigError(
        "config.physics.criticality: energy-critical requires 3 <= d <= 6");
  if (cfg.criticality == -1 && !(cfg.p > 1.0))
    throw ConfigError("config.physics.criticality: requires p > 1");
  if (cfg.criticality == 0) cfg.p = 1.0 + 4.0 / cfg.dimension;
  if (cfg.criticality == 1) cfg.p = 1.0 + 4.0 / (cfg.dimension - 2);

  if (j.contains("operator")) {
    const json& op = j.at("operator");
    reject_unknown(op, "config.operator",
                   {"type", "amplitude", "decay", "entries"});
    const std::string type =
        get_or<std::string>(op, "config.operator", "type", "multiplier-decay");
    if (type == "multiplier-decay") {
      cfg.op.type = OperatorConfig::Type::decay;
      cfg.op.amplitude = get_or<double>(op, "config.operator", "amplitude", 0.1);
      cfg.op.decay = get_or<double>(
          op, "config.operator", "decay",
          cfg.criticality == 1 ? 1.0 + 0.5 * cfg.dimension + 0.5
                               : 0.5 * cfg.dimension + 0.5);
    } else if (type == "explicit") {
      cfg.op.type = OperatorConfig::Type::explicit_table;
      if (!op.contains("entries"))
        throw ConfigError("config.operator.entries: required for explicit");
      for (const json& e : op.at("entries")) {
        reject_unknown(e, "config.operator.entries[]", {"mode", "sigma"});
        std::vector<int> mode = e.at("mode").get<std::vector<int>>();
        const double sigma = e.at("sigma").get<double>();
        cfg.op.entries.emplace_back(std::move(mode), sigma);
      }
    } else {
      throw ConfigError("config.operator.type: unknown type '" + type + "'");
    }
  } else {
    cfg.op.decay = cfg.criticality == 1 ? 1.0 + 0.5 * cfg.dimension + 0.5
                                        : 0.5 * cfg.dimension + 0.5;
  }
  if (cfg.op.amplitude < 0.0)
    throw ConfigError("config.operator.amplitude: must be nonnegative");

  if (j.contains("solver")) {
    const json& s = j.at("solver");
    reject_unknown(s, "config.solver",
                   {"dt", "t_final", "snapshot_stride", "dealias",
                    "disable_nonlinearity", "truncation"});
    cfg.solver.dt = get_or<double>(s, "config.solver", "dt", 1e-3);
    cfg.solver.t_final = get_or<double>(s, "config.solver", "t_final", 1.0);
    cfg.solver.snapshot_stride =
        get_or<int>(s, "config.solver", "snapshot_stride", 50);
    cfg.solver.dealias = get_or<bool>(s, "config.solver", "dealias", true);
    cfg.solver.disable_nonlinearity =
        get_or<bool>(s, "config.solver", "disable_nonlinearity", false);
    if (s.contains("truncation") && !s.at("truncation").is_null())
      cfg.solver.truncation_N = s.at("truncation").get<double>();
  } else {
    cfg.solver.snapshot_stride = 50;
  }
  if (!(cfg.solver.dt > 0.0) || !(cfg.solver.t_final > 0.0))
    throw ConfigError("config.solver: dt and t_final must be positive");
  if (cfg.solver.dt > cfg.solver.t_final)
    throw ConfigError("config.solver: dt must not exceed t_final");
  if (cfg.solver.snapshot_stride < 1)
    throw ConfigError("config.solver.snapshot_stride: must be >= 1");

  if (j.contains("ensemble")) {
    const json& e = j.at("ensemble");
    reject_unknown(e, "config.ensemble", {"trajectories", "seed", "r_max"});
    cfg.trajectories = get_or<int>(e, "config.ensemble", "trajectories", 256);
    if (e.contains("seed"))
      cfg.seed = e.at("seed").get<std::uint64_t>();
    if (e.contains("r_max") && !e.at("r_max").is_null())
      cfg.r_max = e.at("r_max").get<double>();
  }
  if (cfg.trajectories < 2)
    throw ConfigError("config.ensemble.trajectories: must be >= 2");

  if (j.contains("initial_data")) {
    const json& d = j.at("initial_data");
    reject_unknown(d, "config.initial_data",
                   {"type", "mode", "amplitude", "phase", "center", "width",
                    "sobolev_s", "data_seed"});
    const std::string type =
        get_or<std::string>(d, "config.initial_data", "type", "gaussian");
    if (type == "zero") {
      cfg.data.type = InitialDataConfig::Type::zero;
    } else if (type == "plane-wave") {
      cfg.data.type = InitialDataConfig::Type::plane_wave;
      cfg.data.mode = get_or<std::vector<int>>(d, "config.initial_data",
                                               "mode", {1});
    } else if (type == "gaussian") {
      cfg.data.type = InitialDataConfig::Type::gaussian;
    } else if (type == "random-sobolev") {
      cfg.data.type = InitialDataConfig::Type::random_sobolev;
    } else {
      throw ConfigError("config.initial_data.type: unknown type '" + type +
                        "'");
    }
    cfg.data.amplitude =
        get_or<double>(d, "config.initial_data", "amplitude", 0.5);
    cfg.data.phase = get_or<double>(d, "config.initial_data", "phase", 0.0);
    cfg.data.width = get_or<double>(d, "config.initial_data", "width", 1.0);
    cfg.data.sobolev_s =
        get_or<double>(d, "config.initial_data", "sobolev_s", 0.0);
    cfg.data.data_seed =
        get_or<std::uint64_t>(d, "config.initial_data", "data_seed", 1);
    cfg.data.center = get_or<std::vector<double>>(d, "config.initial_data",
                                                  "center", {});
  }

  if (j.contains("params")) {
    const json& p = j.at("params");
    reject_unknown(p, "config.params",
                   {"eta", "epsilon", "holder_q", "holder_depth", "paths",
                    "picard_iterations", "picard_tol", "window_t",
                    "amplitudes", "truncation_modes", "spotcheck_samples",
                    "moment_power"});
    cfg.params.eta = get_or<double>(p, "config.params", "eta", 0.25);
    cfg.params.epsilon = get_or<double>(p, "config.params", "epsilon", 1.0);
    cfg.params.holder_q = get_or<double>(p, "config.params", "holder_q", 8.0);
    cfg.params.holder_depth =
        get_or<int>(p, "config.params", "holder_depth", 6);
    cfg.params.paths = get_or<int>(p, "config.params", "paths", 10);
    cfg.params.picard_iterations =
        get_or<int>(p, "config.params", "picard_iterations", 7);
    cfg.params.picard_tol =
        get_or<double>(p, "config.params", "picard_tol", 2e-6);
    cfg.params.window_t = get_or<double>(p, "config.params", "window_t", 0.5);
    cfg.params.amplitudes =
        get_or<std::vector<double>>(p, "config.params", "amplitudes", {});
    cfg.params.truncation_modes = get_or<std::vector<double>>(
        p, "config.params", "truncation_modes", {});
    cfg.params.spotcheck_samples =
        get_or<int>(p, "config.params", "spotcheck_samples", 100);
    cfg.params.moment_power =
        get_or<double>(p, "config.params", "moment_power", 2.0);
  }
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  return parse_config_text(io::read_file(path));
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = to_string(cfg.kind);
  j["output_dir"] = cfg.output_dir;
  j["threads"] = cfg.threads;
  j["physics"]["dimension"] = cfg.dimension;
  if (cfg.criticality == 0)
    j["physics"]["criticality"] = "mass";
  else if (cfg.criticality == 1)
    j["physics"]["criticality"] = "energy";
  else
    j["physics"]["criticality"] = cfg.p;
  j["physics"]["grid_modes"] = cfg.grid_modes;
  j["physics"]["domain_length"] = cfg.domain_length;
  if (cfg.op.type == OperatorConfig::Type::decay) {
    j["operator"]["type"] = "multiplier-decay";
    j["operator"]["amplitude"] = cfg.op.amplitude;
    j["operator"]["decay"] = cfg.op.decay;
  } else {
    j["operator"]["type"] = "explicit";
    json entries = json::array();
    for (const auto& [mode, sigma] : cfg.op.entries)
      entries.push_back({{"mode", mode}, {"sigma", sigma}});
    j["operator"]["entries"] = entries;
  }
  j["solver"]["dt"] = cfg.solver.dt;
  j["solver"]["t_final"] = cfg.solver.t_final;
  j["solver"]["snapshot_stride"] = cfg.solver.snapshot_stride;
  j["solver"]["dealias"] = cfg.solver.dealias;
  j["solver"]["disable_nonlinearity"] = cfg.solver.disable_nonlinearity;
  if (cfg.solver.truncation_N)
    j["solver"]["truncation"] = *cfg.solver.truncation_N;
  j["ensemble"]["trajectories"] = cfg.trajectories;
  if (cfg.seed) j["ensemble"]["seed"] = *cfg.seed;
  if (std::isfinite(cfg.r_max)) j["ensemble"]["r_max"] = cfg.r_max;
  switch (cfg.data.type) {
    case InitialDataConfig::Type::zero:
      j["initial_data"]["type"] = "zero";
      break;
    case InitialDataConfig::Type::plane_wave:
      j["initial_data"]["type"] = "plane-wave";
      j["initial_data"]["mode"] = cfg.data.mode;
      break;
    case InitialDataConfig::Type::gaussian:
      j["initial_data"]["type"] = "gaussian";
      j["initial_data"]["width"] = cfg.data.width;
      if (!cfg.data.center.empty())
        j["initial_data"]["center"] = cfg.data.center;
      break;
    case InitialDataConfig::Type::random_sobolev:
      j["initial_data"]["type"] = "random-sobolev";
      j["initial_data"]["sobolev_s"] = cfg.data.sobolev_s;
      j["initial_data"]["data_seed"] = cfg.data.data_seed;
      break;
  }
  j["initial_data"]["amplitude"] = cfg.data.amplitude;
  j["params"]["eta"] = cfg.params.eta;
  j["params"]["epsilon"] = cfg.params.epsilon;
  j["params"]["holder_q"] = cfg.params.holder_q;
  j["params"]["holder_depth"] = cfg.params.holder_depth;
  j["params"]["paths"] = cfg.params.paths;
  j["params"]["picard_iterations"] = cfg.params.picard_iterations;
  j["params"]["picard_tol"] = cfg.params.picard_tol;
  j["params"]["window_t"] = cfg.params.window_t;
  if (!cfg.params.amplitudes.empty())
    j["params"]["amplitudes"] = cfg.params.amplitudes;
  if (!cfg.params.truncation_modes.empty())
    j["params"]["truncation_modes"] = cfg.params.truncation_modes;
  j["params"]["spotcheck_samples"] = cfg.params.spotcheck_samples;
  j["params"]["moment_power"] = cfg.params.moment_power;
  return j.dump(2) + "\n";
}

std::uint64_t resolve_seed(const ExperimentConfig& config,
                           std::optional<std::uint64_t> cli_seed) {
  if (cli_seed) return *cli_seed;
  if (config.seed) return *config.seed;
  if (const char* env = std::getenv("SNLS_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError("SNLS_SEED: not a valid unsigned integer");
    }
  }
  return 0;
}

}  // namespace snls
