#include "snls/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "snls/io.hpp"
#include "snls/picard.hpp"

namespace snls {

using nlohmann::json;

namespace {

std::size_t flat_index_of_mode(const SpectralGrid& grid,
                               const std::vector<int>& mode) {
  if (static_cast<int>(mode.size()) != grid.dimension())
    throw ConfigError("operator entry: mode size must match dimension");
  std::size_t flat = 0;
  const int M = grid.modes_per_axis();
  for (int a = 0; a < grid.dimension(); ++a) {
    const int m = mode[a];
    if (m < -M / 2 || m >= M / 2)
      throw ConfigError("operator entry: mode outside [-M/2, M/2)");
    const int idx = m >= 0 ? m : m + M;
    flat = flat * M + static_cast<std::size_t>(idx);
  }
  return flat;
}

double least_squares_slope(const std::vector<double>& x,
                           const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string stats_csv(const ensemble::EnsembleStats& stats,
                      const std::vector<double>& predicted_mass,
                      const std::vector<double>& predicted_energy_rhs) {
  std::ostringstream out;
  out << "t,mean_mass,se_mass,predicted_mass,mean_energy,se_energy,"
         "predicted_energy_rhs\n";
  const bool has_energy = !stats.mean_energy.empty();
  for (std::size_t i = 0; i < stats.times.size(); ++i) {
    out << io::format_double(stats.times[i]) << ','
        << io::format_double(stats.mean_mass[i]) << ','
        << io::format_double(stats.se_mass[i]) << ','
        << io::format_double(i < predicted_mass.size() ? predicted_mass[i]
                                                       : std::nan("")) << ','
        << io::format_double(has_energy ? stats.mean_energy[i]
                                        : std::nan("")) << ','
        << io::format_double(has_energy ? stats.se_energy[i] : std::nan(""))
        << ','
        << io::format_double(i < predicted_energy_rhs.size()
                                 ? predicted_energy_rhs[i]
                                 : std::nan(""))
        << '\n';
  }
  return out.str();
}

std::string trajectories_csv(const ensemble::EnsembleStats& stats) {
  std::ostringstream out;
  out << "stream_id,diverged,stopped,sup_mass,final_mass,sup_energy,"
         "sup_monitor\n";
  for (const auto& s : stats.summaries) {
    out << s.stream_id << ',' << (s.diverged ? 1 : 0) << ','
        << (s.stopped ? 1 : 0) << ',' << io::format_double(s.sup_mass) << ','
        << io::format_double(s.final_mass) << ','
        << io::format_double(s.sup_energy) << ','
        << io::format_double(s.sup_monitor) << '\n';
  }
  return out.str();
}

std::string ledger_csv(const perturb::AssemblyReport& report) {
  std::ostringstream out;
  out << "interval,t_lo,t_hi,w_norm,linear_norm,forcing_norm,lwp_lhs,"
         "solution_norm,error_dual_norm,sup_distance,spacetime_distance,"
         "pass_linear,pass_forcing,pass_lwp,pass_error\n";
  for (const auto& r : report.rows) {
    out << r.index << ',' << io::format_double(r.t_lo) << ','
        << io::format_double(r.t_hi) << ',' << io::format_double(r.w_norm)
        << ',' << io::format_double(r.linear_norm) << ','
        << io::format_double(r.forcing_norm) << ','
        << io::format_double(r.lwp_lhs) << ','
        << io::format_double(r.solution_norm) << ','
        << io::format_double(r.error_dual_norm) << ','
        << io::format_double(r.sup_distance) << ','
        << io::format_double(r.spacetime_distance) << ','
        << (r.pass_linear ? 1 : 0) << ',' << (r.pass_forcing ? 1 : 0) << ','
        << (r.pass_lwp ? 1 : 0) << ',' << (r.pass_error ? 1 : 0) << '\n';
  }
  return out.str();
}

ensemble::EnsembleConfig ensemble_config_for(const ExperimentConfig& cfg,
                                             const ExperimentSetup& setup) {
  ensemble::EnsembleConfig ec;
  ec.trajectories = cfg.trajectories;
  ec.seed = setup.seed;
  ec.spec = setup.spec;
  ec.solver = setup.solver;
  ec.stopping.r_max = cfg.r_max;
  ec.threads = std::max(1, cfg.threads);
  return ec;
}

// Mean-level dt-refinement delta: one control run at dt/2, doubled stride so
// both runs share output times. This separates MC error from scheme error.
double mass_discretization_budget(const ExperimentConfig& cfg,
                                  const ExperimentSetup& setup,
                                  const ensemble::EnsembleStats& stats) {
  ensemble::EnsembleConfig control = ensemble_config_for(cfg, setup);
  control.solver.dt *= 0.5;
  control.solver.snapshot_stride *= 2;
  const ensemble::EnsembleStats half =
      ensemble::run_ensemble(control, setup.u0, setup.op);
  double delta = 0.0;
  const std::size_t n = std::min(stats.times.size(), half.times.size());
  for (std::size_t i = 0; i < n; ++i)
    delta = std::max(delta,
                     std::abs(stats.mean_mass[i] - half.mean_mass[i]));
  return 2.0 * delta;
}

}  // namespace

std::string verdict_to_json(const Verdict& verdict) {
  json j;
  j["experiment"] = verdict.experiment;
  j["pass"] = verdict.pass;
  j["metrics"] = verdict.metrics;
  j["tolerances"] = verdict.tolerances;
  j["seed"] = verdict.seed;
  j["config_hash"] = verdict.config_hash;
  return j.dump(2) + "\n";
}

ExperimentSetup materialize(const ExperimentConfig& cfg,
                            std::optional<std::uint64_t> cli_seed) {
  ExperimentSetup setup;
  setup.grid =
      SpectralGrid::make(cfg.dimension, cfg.grid_modes, cfg.domain_length);
  if (cfg.criticality == 0)
    setup.spec = NonlinearitySpec::mass_critical(cfg.dimension);
  else if (cfg.criticality == 1)
    setup.spec = NonlinearitySpec::energy_critical(cfg.dimension);
  else
    setup.spec = NonlinearitySpec::explicit_power(cfg.dimension, cfg.p);

  if (cfg.op.type == OperatorConfig::Type::decay) {
    setup.op = MultiplierOperator::decay(setup.grid, cfg.op.amplitude,
                                         cfg.op.decay);
  } else {
    std::vector<double> weights(setup.grid->total_points(), 0.0);
    for (const auto& [mode, sigma] : cfg.op.entries)
      weights[flat_index_of_mode(*setup.grid, mode)] = sigma;
    setup.op = MultiplierOperator(setup.grid, std::move(weights));
  }

  switch (cfg.data.type) {
    case InitialDataConfig::Type::zero:
      setup.u0 = initial_data::zero(setup.grid);
      break;
    case InitialDataConfig::Type::plane_wave:
      setup.u0 = initial_data::plane_wave(
          setup.grid, cfg.data.mode,
          std::polar(cfg.data.amplitude, cfg.data.phase));
      break;
    case InitialDataConfig::Type::gaussian: {
      std::vector<double> center = cfg.data.center;
      if (center.empty())
        center.assign(cfg.dimension, 0.5 * cfg.domain_length);
      setup.u0 = initial_data::gaussian_bump(setup.grid, center,
                                             cfg.data.width,
                                             cfg.data.amplitude);
      break;
    }
    case InitialDataConfig::Type::random_sobolev:
      setup.u0 = initial_data::random_sobolev(
          setup.grid, cfg.data.sobolev_s, cfg.data.amplitude,
          cfg.data.data_seed);
      break;
  }
  setup.solver = cfg.solver;
  setup.seed = resolve_seed(cfg, cli_seed);
  return setup;
}

PathForcing sample_convolution_path(const GridPtr& grid,
                                    const MultiplierOperator& op,
                                    NoiseStream stream, double t0,
                                    double half_dt, std::int64_t half_steps) {
  ConvolutionState state(grid, op, stream);
  std::vector<GridField> samples;
  samples.reserve(half_steps + 1);
  samples.push_back(GridField(grid));
  for (std::int64_t j = 0; j < half_steps; ++j) {
    state.advance(half_dt);
    samples.push_back(state.field());
  }
  return PathForcing(std::move(samples), t0, half_dt);
}

namespace {

Verdict run_deterministic_conservation(const ExperimentConfig& cfg,
                                       const ExperimentSetup& setup,
                                       const std::filesystem::path& out) {
  Verdict v;
  const TrajectoryRecord rec =
      solve_deterministic(setup.u0, setup.spec, setup.solver,
                          SolveOptions{.store_fields = false});
  const double m0 = rec.mass_series.front();
  double mass_drift = 0.0;
  for (double m : rec.mass_series)
    mass_drift = std::max(mass_drift, std::abs(m - m0) / m0);
  v.metrics["mass_drift"] = mass_drift;
  v.tolerances["mass_drift_max"] = 1e-10;
  bool pass = mass_drift <= 1e-10;

  if (setup.grid->dimension() >= 3) {
    auto drift_of = [&](double dt, int stride) {
      SolverConfig c = setup.solver;
      c.dt = dt;
      c.snapshot_stride = stride;
      const TrajectoryRecord r = solve_deterministic(
          setup.u0, setup.spec, c, SolveOptions{.store_fields = false});
      const double e0 = r.energy_series.front();
      double drift = 0.0;
      for (double e : r.energy_series)
        drift = std::max(drift, std::abs(e - e0) / std::abs(e0));
      return drift;
    };
    const double d1 = drift_of(setup.solver.dt, setup.solver.snapshot_stride);
    const double d2 =
        drift_of(0.5 * setup.solver.dt, 2 * setup.solver.snapshot_stride);
    const double ratio = d2 > 0.0 ? d1 / d2 : 0.0;
    v.metrics["energy_drift"] = d1;
    v.metrics["energy_drift_half_dt"] = d2;
    v.metrics["energy_ratio"] = ratio;
    v.tolerances["energy_ratio_low"] = 3.5;
    v.tolerances["energy_ratio_high"] = 4.5;
    pass = pass && ratio >= 3.5 && ratio <= 4.5;
  }

  std::ostringstream csv;
  csv << "t,mass,energy,monitor\n";
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    csv << io::format_double(rec.times[i]) << ','
        << io::format_double(rec.mass_series[i]) << ','
        << io::format_double(i < rec.energy_series.size()
                                 ? rec.energy_series[i]
                                 : std::nan(""))
        << ',' << io::format_double(rec.monitor_value(i)) << '\n';
  }
  io::atomic_write(out / "trajectory.csv", csv.str());
  v.pass = pass;
  return v;
}

Verdict run_balance(const ExperimentConfig& cfg, const ExperimentSetup& setup,
                    const std::filesystem::path& out, bool noise_only) {
  Verdict v;
  ExperimentConfig run_cfg = cfg;
  ExperimentSetup run_setup = setup;
  if (noise_only) run_setup.solver.disable_nonlinearity = true;

  ensemble::EnsembleConfig ec = ensemble_config_for(run_cfg, run_setup);
  ec.solver = run_setup.solver;
  const ensemble::EnsembleStats stats =
      ensemble::run_ensemble(ec, run_setup.u0, run_setup.op);

  const double hs0 = hs_norm(run_setup.op, 0.0);
  const double budget =
      noise_only ? 0.0 : mass_discretization_budget(run_cfg, run_setup, stats);
  const ensemble::BalanceReport report =
      ensemble::mass_balance_test(stats, hs0 * hs0, budget);

  io::atomic_write(out / "stats.csv",
                   stats_csv(stats, report.predicted, {}));
  io::atomic_write(out / "trajectories.csv", trajectories_csv(stats));

  v.metrics["max_abs_deviation"] = report.max_abs_deviation;
  v.metrics["worst_margin"] = report.worst_margin;
  v.metrics["hs0_squared"] = hs0 * hs0;
  v.metrics["diverged_fraction"] =
      static_cast<double>(stats.diverged_count) / cfg.trajectories;
  v.tolerances["budget"] = budget;
  v.tolerances["se_multiplier"] = 4.0;
  v.tolerances["max_divergence_fraction"] = 0.01;
  v.pass = report.pass &&
           v.metrics["diverged_fraction"] <= 0.01;
  return v;
}

Verdict run_energy_balance(const ExperimentConfig& cfg,
                           const ExperimentSetup& setup,
                           const std::filesystem::path& out) {
  Verdict v;
  if (setup.spec.criticality != 1)
    throw ConfigError("energy-balance: requires energy criticality");

  ensemble::EnsembleConfig ec = ensemble_config_for(cfg, setup);
  const ensemble::EnsembleStats stats =
      ensemble::run_ensemble(ec, setup.u0, setup.op);

  const double hs1h = hs_norm(setup.op, 1.0, /*homogeneous=*/true);

  // Control run at dt/2 for the discretization budget on the statistic.
  ensemble::EnsembleConfig control = ec;
  control.solver.dt *= 0.5;
  control.solver.snapshot_stride *= 2;
  const ensemble::EnsembleStats half =
      ensemble::run_ensemble(control, setup.u0, setup.op);
  const ensemble::EnergyBalanceReport full_report =
      ensemble::energy_balance_test(stats, hs1h * hs1h, 0.0);
  const ensemble::EnergyBalanceReport half_report =
      ensemble::energy_balance_test(half, hs1h * hs1h, 0.0);
  const double budget =
      2.0 * std::abs(full_report.statistic_mean - half_report.statistic_mean);
  const ensemble::EnergyBalanceReport report =
      ensemble::energy_balance_test(stats, hs1h * hs1h, budget);

  std::vector<double> predicted_mass(stats.times.size());
  const double hs0 = hs_norm(setup.op, 0.0);
  for (std::size_t i = 0; i < stats.times.size(); ++i)
    predicted_mass[i] = stats.initial_mass + 2.0 * stats.times[i] * hs0 * hs0;
  io::atomic_write(out / "stats.csv",
                   stats_csv(stats, predicted_mass, report.predicted_rhs));
  io::atomic_write(out / "trajectories.csv", trajectories_csv(stats));

  v.metrics["statistic_mean"] = report.statistic_mean;
  v.metrics["statistic_se"] = report.statistic_se;
  v.metrics["predicted"] = report.predicted;
  v.metrics["deviation"] =
      std::abs(report.statistic_mean - report.predicted);
  v.metrics["hs1_hom_squared"] = hs1h * hs1h;
  v.metrics["diverged_fraction"] =
      static_cast<double>(stats.diverged_count) / cfg.trajectories;
  v.tolerances["budget"] = budget;
  v.tolerances["se_multiplier"] = 4.0;
  v.pass = report.pass && v.metrics["diverged_fraction"] <= 0.01;
  return v;
}

Verdict run_lwp_threshold(const ExperimentConfig& cfg,
                          const ExperimentSetup& setup,
                          const std::filesystem::path& out) {
  Verdict v;
  SolverConfig window_cfg = setup.solver;
  window_cfg.t_final = cfg.params.window_t;
  const std::int64_t steps =
      static_cast<std::int64_t>(std::llround(window_cfg.t_final /
                                             window_cfg.dt));
  PathForcing psi = sample_convolution_path(
      setup.grid, setup.op, NoiseStream(setup.seed, 0), 0.0,
      0.5 * window_cfg.dt, 2 * steps);
  const picard::ThresholdReport report = picard::lwp_threshold_check(
      setup.u0, psi, setup.spec, window_cfg, cfg.params.eta);

  v.metrics["free_norm"] = report.free_norm;
  v.metrics["forcing_norm"] = report.forcing_norm;
  v.metrics["lhs"] = report.lhs;
  v.metrics["solution_norm"] = report.solution_norm;
  v.metrics["bound"] = report.bound;
  v.tolerances["eta"] = cfg.params.eta;
  v.tolerances["solution_slack"] = 0.05;
  v.pass = report.passes_threshold && report.within_bound;

  std::ostringstream csv;
  csv << "free_norm,forcing_norm,lhs,eta,solution_norm,bound,pass\n"
      << io::format_double(report.free_norm) << ','
      << io::format_double(report.forcing_norm) << ','
      << io::format_double(report.lhs) << ','
      << io::format_double(report.eta) << ','
      << io::format_double(report.solution_norm) << ','
      << io::format_double(report.bound) << ',' << (v.pass ? 1 : 0) << '\n';
  io::atomic_write(out / "threshold.csv", csv.str());
  return v;
}

Verdict run_picard_contraction(const ExperimentConfig& cfg,
                               const ExperimentSetup& setup,
                               const std::filesystem::path& out) {
  Verdict v;
  SolverConfig window_cfg = setup.solver;
  window_cfg.t_final = cfg.params.window_t;
  const std::int64_t steps = static_cast<std::int64_t>(
      std::llround(window_cfg.t_final / window_cfg.dt));
  PathForcing psi = sample_convolution_path(
      setup.grid, setup.op, NoiseStream(setup.seed, 0), 0.0,
      0.5 * window_cfg.dt, 2 * steps);

  // Iterate nodes live on the snapshot lattice.
  const std::int64_t node_stride = 2 * window_cfg.snapshot_stride;
  std::vector<double> times;
  std::vector<GridField> f_series;
  for (std::int64_t j = 0; j <= 2 * steps; j += node_stride) {
    times.push_back(j * psi.half_dt());
    f_series.push_back(psi.at(j));
  }

  const picard::IterateTrace trace =
      picard::picard_iterates(setup.u0, times, f_series, setup.spec,
                              cfg.params.picard_iterations,
                              window_cfg.dealias);
  double max_ratio = 0.0;
  const int needed = 5;
  bool enough = static_cast<int>(trace.ratios.size()) >= needed;
  for (int i = 0; enough && i < needed; ++i)
    max_ratio = std::max(max_ratio, trace.ratios[i]);

  const picard::FixedPointResult fp = picard::picard_fixed_point(
      setup.u0, times, f_series, setup.spec, cfg.params.picard_tol, 64,
      window_cfg.dealias);

  PathForcing run_forcing = psi.window(0, 1.0);
  const TrajectoryRecord solver_rec =
      solve_perturbed_v(setup.u0, run_forcing, setup.spec, window_cfg);
  const double fp_distance = picard::contraction_distance(
      times, fp.solution, solver_rec.u, setup.spec);

  v.metrics["max_ratio_first5"] = max_ratio;
  v.metrics["fixed_point_distance"] = fp_distance;
  v.metrics["iterations"] = fp.iterations;
  v.tolerances["ratio_max"] = 0.5;
  v.tolerances["distance_max"] = 10.0 * cfg.params.picard_tol;
  v.pass = enough && max_ratio <= 0.5 && fp.converged &&
           fp_distance <= 10.0 * cfg.params.picard_tol;

  std::ostringstream csv;
  csv << "iterate,distance,ratio\n";
  for (std::size_t j = 0; j < trace.distances.size(); ++j) {
    csv << (j + 1) << ',' << io::format_double(trace.distances[j]) << ','
        << io::format_double(j < trace.ratios.size() ? trace.ratios[j]
                                                     : std::nan(""))
        << '\n';
  }
  io::atomic_write(out / "iterates.csv", csv.str());
  return v;
}

Verdict run_perturbation_sweep(const ExperimentConfig& cfg,
                               const ExperimentSetup& setup,
                               const std::filesystem::path& out) {
  Verdict v;
  std::vector<double> amplitudes = cfg.params.amplitudes;
  if (amplitudes.empty()) {
    amplitudes = {cfg.params.epsilon, cfg.params.epsilon / 2,
                  cfg.params.epsilon / 4, cfg.params.epsilon / 8};
  }
  const std::int64_t steps = static_cast<std::int64_t>(
      std::llround(setup.solver.t_final / setup.solver.dt));
  PathForcing psi = sample_convolution_path(
      setup.grid, setup.op, NoiseStream(setup.seed, 0), 0.0,
      0.5 * setup.solver.dt, 2 * steps);

  const TrajectoryRecord w =
      solve_deterministic(setup.u0, setup.spec, setup.solver);
  std::vector<double> log_amp, log_dist, dists;
  std::ostringstream csv;
  csv << "amplitude,sup_distance,spacetime_distance\n";
  for (double amp : amplitudes) {
    PathForcing forcing = psi.window(0, amp);
    const TrajectoryRecord vrec =
        solve_perturbed_v(setup.u0, forcing, setup.spec, setup.solver);
    const perturb::ReferenceComparison cmp =
        perturb::compare_to_reference(vrec, w, setup.spec);
    log_amp.push_back(std::log(amp));
    log_dist.push_back(std::log(std::max(cmp.sup_distance, 1e-300)));
    dists.push_back(cmp.sup_distance);
    csv << io::format_double(amp) << ','
        << io::format_double(cmp.sup_distance) << ','
        << io::format_double(cmp.spacetime_distance) << '\n';
  }
  io::atomic_write(out / "sweep.csv", csv.str());

  const double slope = least_squares_slope(log_amp, log_dist);
  v.metrics["slope"] = slope;
  v.metrics["largest_distance"] = dists.front();
  v.tolerances["slope_low"] = 0.9;
  v.tolerances["slope_high"] = 1.1;
  v.pass = slope >= 0.9 && slope <= 1.1;
  return v;
}

Verdict run_long_time_assembly(const ExperimentConfig& cfg,
                               const ExperimentSetup& setup,
                               const std::filesystem::path& out) {
  Verdict v;
  const double T = setup.solver.t_final;
  const std::int64_t steps =
      static_cast<std::int64_t>(std::llround(T / setup.solver.dt));
  PathForcing psi = sample_convolution_path(
      setup.grid, setup.op, NoiseStream(setup.seed, 0), 0.0,
      0.5 * setup.solver.dt, 2 * steps);
  const perturb::AssemblyReport report =
      perturb::long_time_assembly(setup.u0, psi, setup.spec, setup.solver, T,
                                  cfg.params.eta, cfg.params.epsilon);
  io::atomic_write(out / "ledger.csv", ledger_csv(report));

  v.metrics["final_time"] = report.final_time;
  v.metrics["intervals"] = static_cast<double>(report.rows.size());
  v.metrics["fitted_C1"] = report.fitted_C1;
  if (!report.rows.empty()) {
    double first_fail = -1.0;
    for (const auto& row : report.rows)
      if (!row.all_pass()) {
        first_fail = row.index;
        break;
      }
    v.metrics["first_failed_interval"] = first_fail;
  }
  v.tolerances["horizon"] = T;
  v.tolerances["eta"] = cfg.params.eta;
  v.tolerances["epsilon"] = cfg.params.epsilon;
  v.pass = report.all_pass;
  return v;
}

Verdict run_truncation_convergence(const ExperimentConfig& cfg,
                                   const ExperimentSetup& setup,
                                   const std::filesystem::path& out) {
  Verdict v;
  std::vector<double> modes = cfg.params.truncation_modes;
  const int M = setup.grid->modes_per_axis();
  if (modes.empty())
    modes = {M / 16.0, M / 8.0, M / 4.0, M / 2.0};
  const double xi_unit =
      2.0 * 3.14159265358979323846 / setup.grid->domain_length();
  std::vector<double> N_values;
  for (double m : modes) N_values.push_back(m * xi_unit);

  const ensemble::TruncationResult result =
      ensemble::truncation_convergence_test(setup.u0, setup.op, setup.spec,
                                            setup.solver, setup.seed,
                                            cfg.params.paths, N_values);
  bool pass = true;
  double worst_final = 0.0;
  std::ostringstream csv;
  csv << "path";
  for (double m : modes) csv << ",N_mode_" << io::format_double(m);
  csv << '\n';
  for (std::size_t p = 0; p < result.sup_distance.size(); ++p) {
    const std::vector<double>& row = result.sup_distance[p];
    csv << p;
    for (double d : row) csv << ',' << io::format_double(d);
    csv << '\n';
    for (std::size_t k = 0; k + 1 < row.size(); ++k) {
      if (row[k] > 1e-10 && row[k + 1] >= row[k]) pass = false;
    }
    worst_final = std::max(worst_final, row.back());
  }
  io::atomic_write(out / "truncation.csv", csv.str());
  pass = pass && worst_final <= 1e-10;

  v.metrics["worst_final_distance"] = worst_final;
  v.metrics["paths"] = static_cast<double>(result.sup_distance.size());
  v.tolerances["final_max"] = 1e-10;
  v.pass = pass;
  return v;
}

Verdict run_strichartz_spotcheck(const ExperimentConfig& cfg,
                                 const ExperimentSetup& setup,
                                 const std::filesystem::path& out) {
  Verdict v;
  const StrichartzPair pair = diagonal_pair(setup.grid->dimension());
  const int samples = cfg.params.spotcheck_samples;
  const int nodes = 64;
  std::vector<double> ratios;
  Propagator prop(setup.grid);
  std::ostringstream csv;
  csv << "sample,ratio\n";
  for (int k = 0; k < samples; ++k) {
    const GridField f = initial_data::random_sobolev(
        setup.grid, 0.0, 1.0, setup.seed + 1000 + k);
    const double l2 = lebesgue_norm(f, 2.0);
    if (l2 == 0.0) continue;
    SpaceTimeSample sample;
    sample.pair = pair;
    GridField state = f;
    sample.times.push_back(0.0);
    sample.snapshots.push_back(state);
    const double dt = 1.0 / nodes;
    for (int j = 1; j <= nodes; ++j) {
      state = prop.apply(state, dt);
      sample.times.push_back(j * dt);
      sample.snapshots.push_back(state);
    }
    const double ratio = strichartz_norm(sample) / l2;
    ratios.push_back(ratio);
    csv << k << ',' << io::format_double(ratio) << '\n';
  }
  io::atomic_write(out / "spotcheck.csv", csv.str());

  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  const double max_ratio = sorted.back();
  const double min_ratio = sorted.front();
  v.metrics["min_ratio"] = min_ratio;
  v.metrics["median_ratio"] = median;
  v.metrics["max_ratio"] = max_ratio;
  v.metrics["spread"] = max_ratio / min_ratio;
  v.tolerances["max_over_median"] = 10.0;
  v.pass = max_ratio <= 10.0 * median;
  return v;
}

Verdict run_moment_bounds(const ExperimentConfig& cfg,
                          const ExperimentSetup& setup,
                          const std::filesystem::path& out) {
  Verdict v;
  const double s = setup.spec.criticality == 1 ? 1.0 : 0.0;
  const double T = setup.solver.t_final;
  const int steps = static_cast<int>(
      std::llround(T / (setup.solver.dt * setup.solver.snapshot_stride)));
  const StrichartzPair pair = diagonal_pair(setup.grid->dimension());
  const ConvolutionPathStats psi_stats = convolution_path_stats(
      setup.grid, setup.op, setup.seed, std::max(cfg.params.paths, 16), T,
      std::max(steps, 8), s, cfg.params.moment_power, cfg.params.holder_q,
      pair.r.value());

  // E sup_t ||Psi||_{H^s}^2 >= E ||Psi(T)||^2 = 2 T ||phi||_{HS(L^2;H^s)}^2.
  const double hs_s = hs_norm(setup.op, s);
  const double endpoint = 2.0 * T * hs_s * hs_s;

  ensemble::EnsembleConfig ec = ensemble_config_for(cfg, setup);
  const ensemble::EnsembleStats stats =
      ensemble::run_ensemble(ec, setup.u0, setup.op);
  const ensemble::SupMomentEstimate sup_mass =
      ensemble::sup_moment_estimate(stats, cfg.params.moment_power);

  v.metrics["psi_sup_moment"] = psi_stats.sup_hs_moment;
  v.metrics["psi_sup_se"] = psi_stats.sup_hs_se;
  v.metrics["psi_mixed_moment"] = psi_stats.mixed_moment;
  v.metrics["psi_ratio_vs_hs"] = psi_stats.sup_ratio;
  v.metrics["endpoint_lower_bound"] = endpoint;
  v.metrics["mass_sup_moment"] = sup_mass.estimate;
  v.metrics["mass_sup_ci_low"] = sup_mass.ci_low;
  v.metrics["mass_sup_ci_high"] = sup_mass.ci_high;
  v.tolerances["se_multiplier"] = 4.0;

  const bool finite = std::isfinite(psi_stats.sup_hs_moment) &&
                      std::isfinite(psi_stats.mixed_moment) &&
                      std::isfinite(sup_mass.estimate);
  const bool endpoint_ok =
      cfg.params.moment_power != 2.0 ||
      psi_stats.sup_hs_moment + 4.0 * psi_stats.sup_hs_se >= endpoint;
  v.pass = finite && endpoint_ok;

  io::atomic_write(out / "trajectories.csv", trajectories_csv(stats));
  return v;
}

}  // namespace

namespace {

struct Preset {
  const char* name;
  const char* description;
  const char* text;
};

// clang-format off
const Preset kPresets[] = {
    {"deterministic-conservation",
     "d=3 quintic smooth data: mass drift <= 1e-10, 2nd-order energy drift",
     R"({
  "experiment": "deterministic-conservation",
  "physics": {"dimension": 3, "criticality": "energy", "grid_modes": 16,
              "domain_length": 12.566370614359172},
  "operator": {"type": "multiplier-decay", "amplitude": 0.0},
  "solver": {"dt": 2e-3, "t_final": 1.0, "snapshot_stride": 25,
             "dealias": false},
  "ensemble": {"trajectories": 2, "seed": 7},
  "initial_data": {"type": "gaussian", "amplitude": 0.4, "width": 1.2}
})"},
    {"noise-isometry",
     "nonlinearity off, u0 = 0: mean ||Psi(t)||^2 = 2 t ||phi||_HS^2",
     R"({
  "experiment": "noise-isometry",
  "physics": {"dimension": 1, "criticality": "mass", "grid_modes": 64,
              "domain_length": 25.132741228718345},
  "operator": {"type": "multiplier-decay", "amplitude": 0.1, "decay": 1.0},
  "solver": {"dt": 1e-3, "t_final": 1.0, "snapshot_stride": 50,
             "disable_nonlinearity": true},
  "ensemble": {"trajectories": 4096, "seed": 42},
  "initial_data": {"type": "zero"}
})"},
    {"mass-balance",
     "d=1 quintic SNLS: mean mass tracks M(u0) + 2 t ||phi||_HS^2",
     R"({
  "experiment": "mass-balance",
  "physics": {"dimension": 1, "criticality": "mass", "grid_modes": 64,
              "domain_length": 25.132741228718345},
  "operator": {"type": "multiplier-decay", "amplitude": 0.1, "decay": 1.0},
  "solver": {"dt": 1e-3, "t_final": 1.0, "snapshot_stride": 50},
  "ensemble": {"trajectories": 4096, "seed": 42},
  "initial_data": {"type": "gaussian", "amplitude": 0.5, "width": 2.0}
})"},
    {"energy-balance",
     "d=3 quintic small data: Ito energy identity self-consistency",
     R"({
  "experiment": "energy-balance",
  "physics": {"dimension": 3, "criticality": "energy", "grid_modes": 16,
              "domain_length": 12.566370614359172},
  "operator": {"type": "multiplier-decay", "amplitude": 0.05, "decay": 3.0},
  "solver": {"dt": 1e-3, "t_final": 0.1, "snapshot_stride": 10,
             "dealias": false},
  "ensemble": {"trajectories": 256, "seed": 42},
  "initial_data": {"type": "gaussian", "amplitude": 0.3, "width": 1.0}
})"},
    {"lwp-threshold",
     "local theory smallness: lhs <= eta forces solution norm <= 2 eta",
     R"({
  "experiment": "lwp-threshold",
  "physics": {"dimension": 1, "criticality": "mass", "grid_modes": 64,
              "domain_length": 25.132741228718345},
  "operator": {"type": "multiplier-decay", "amplitude": 0.02, "decay": 1.0},
  "solver": {"dt": 1e-3, "t_final": 0.25, "snapshot_stride": 10},
  "ensemble": {"trajectories": 2, "seed": 11},
  "initial_data": {"type": "gaussian", "amplitude": 0.05, "width": 2.0},
  "params": {"eta": 0.25, "window_t": 0.25}
})"},
    {"picard-contraction",
     "successive iterate ratios <= 1/2; fixed point matches the solver",
     R"({
  "experiment": "picard-contraction",
  "physics": {"dimension": 1, "criticality": "mass", "grid_modes": 64,
              "domain_length": 25.132741228718345},
  "operator": {"type": "multiplier-decay", "amplitude": 0.02, "decay": 1.0},
  "solver": {"dt": 1e-3, "t_final": 0.4, "snapshot_stride": 10},
  "ensemble": {"trajectories": 2, "seed": 11},
  "initial_data": {"type": "gaussian", "amplitude": 0.1, "width": 2.0},
  "params": {"window_t": 0.4, "picard_iterations": 7, "picard_tol": 2e-6}
})"},
    {"perturbation-sweep",
     "log-log slope of ||v - w|| vs forcing amplitude is ~1",
     R"({
  "experiment": "perturbation-sweep",
  "physics": {"dimension": 1, "criticality": "mass", "grid_modes": 64,
              "domain_length": 25.132741228718345},
  "operator": {"type": "multiplier-decay", "amplitude": 0.1, "decay": 1.0},
  "solver": {"dt": 1e-3, "t_final": 0.5, "snapshot_stride": 10},
  "ensemble": {"trajectories": 2, "seed": 13},
  "initial_data": {"type": "gaussian", "amplitude": 0.3, "width": 2.0},
  "params": {"epsilon": 0.2}
})"},
    {"long-time-assembly",
     "interval-by-interval existence ledger reaches the horizon",
     R"({
  "experiment": "long-time-assembly",
  "physics": {"dimension": 1, "criticality": "mass", "grid_modes": 64,
              "domain_length": 25.132741228718345},
  "operator": {"type": "multiplier-decay", "amplitude": 0.02, "decay": 1.0},
  "solver": {"dt": 1e-3, "t_final": 2.0, "snapshot_stride": 20},
  "ensemble": {"trajectories": 2, "seed": 1},
  "initial_data": {"type": "gaussian", "amplitude": 0.4, "width": 2.0},
  "params": {"eta": 0.35, "epsilon": 1.0}
})"},
    {"assembly-designed-failure",
     "designed failure: huge forcing breaks an early interval check",
     R"({
  "experiment": "long-time-assembly",
  "physics": {"dimension": 1, "criticality": "mass", "grid_modes": 64,
              "domain_length": 25.132741228718345},
  "operator": {"type": "multiplier-decay", "amplitude": 0.02, "decay": 1.0},
  "solver": {"dt": 1e-3, "t_final": 2.0, "snapshot_stride": 20},
  "ensemble": {"trajectories": 2, "seed": 1},
  "initial_data": {"type": "gaussian", "amplitude": 0.4, "width": 2.0},
  "params": {"eta": 0.35, "epsilon": 400.0}
})"},
    {"truncation-convergence",
     "coupled truncated runs approach the full solution as N grows",
     R"({
  "experiment": "truncation-convergence",
  "physics": {"dimension": 1, "criticality": "mass", "grid_modes": 64,
              "domain_length": 25.132741228718345},
  "operator": {"type": "multiplier-decay", "amplitude": 0.1, "decay": 1.0},
  "solver": {"dt": 1e-3, "t_final": 0.5, "snapshot_stride": 25},
  "ensemble": {"trajectories": 2, "seed": 5},
  "initial_data": {"type": "gaussian", "amplitude": 0.4, "width": 2.0},
  "params": {"paths": 10}
})"},
    {"strichartz-spotcheck",
     "||S(t)f|| / ||f||_{L^2} ratio spread over random data",
     R"({
  "experiment": "strichartz-spotcheck",
  "physics": {"dimension": 1, "criticality": "mass", "grid_modes": 64,
              "domain_length": 25.132741228718345},
  "ensemble": {"trajectories": 2, "seed": 3},
  "solver": {"dt": 1e-3, "t_final": 1.0, "snapshot_stride": 50},
  "initial_data": {"type": "zero"},
  "params": {"spotcheck_samples": 100}
})"},
    {"moment-bounds",
     "sup-moment estimates for Psi and the mass, with bootstrap CIs",
     R"({
  "experiment": "moment-bounds",
  "physics": {"dimension": 1, "criticality": "mass", "grid_modes": 64,
              "domain_length": 25.132741228718345},
  "operator": {"type": "multiplier-decay", "amplitude": 0.1, "decay": 1.0},
  "solver": {"dt": 1e-3, "t_final": 1.0, "snapshot_stride": 50},
  "ensemble": {"trajectories": 128, "seed": 9},
  "initial_data": {"type": "gaussian", "amplitude": 0.3, "width": 2.0},
  "params": {"paths": 256, "moment_power": 2.0, "holder_q": 8}
})"},
};
// clang-format on

}  // namespace

std::vector<std::pair<std::string, std::string>> preset_list() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Preset& p : kPresets) out.emplace_back(p.name, p.description);
  return out;
}

std::string preset_config_text(const std::string& name) {
  for (const Preset& p : kPresets)
    if (name == p.name) return std::string(p.text) + "\n";
  throw ConfigError("unknown preset '" + name + "'");
}

RunArtifacts run_experiment(const ExperimentConfig& config,
                            std::optional<std::uint64_t> cli_seed) {
  RunArtifacts artifacts;
  ExperimentConfig cfg = config;
  const ExperimentSetup setup = materialize(cfg, cli_seed);
  cfg.seed = setup.seed;

  const std::filesystem::path out =
      std::filesystem::path(cfg.output_dir) / to_string(cfg.kind);
  std::filesystem::create_directories(out);
  artifacts.out_dir = out;

  // Snapshot before any computation.
  const std::string snapshot = config_to_json(cfg);
  io::atomic_write(out / "config.json", snapshot);
  const std::string hash = io::git_blob_hash(snapshot);

  Verdict verdict;
  switch (cfg.kind) {
    case ExperimentKind::deterministic_conservation:
      verdict = run_deterministic_conservation(cfg, setup, out);
      break;
    case ExperimentKind::noise_isometry:
      verdict = run_balance(cfg, setup, out, /*noise_only=*/true);
      break;
    case ExperimentKind::mass_balance:
      verdict = run_balance(cfg, setup, out, /*noise_only=*/false);
      break;
    case ExperimentKind::energy_balance:
      verdict = run_energy_balance(cfg, setup, out);
      break;
    case ExperimentKind::lwp_threshold:
      verdict = run_lwp_threshold(cfg, setup, out);
      break;
    case ExperimentKind::picard_contraction:
      verdict = run_picard_contraction(cfg, setup, out);
      break;
    case ExperimentKind::perturbation_sweep:
      verdict = run_perturbation_sweep(cfg, setup, out);
      break;
    case ExperimentKind::long_time_assembly:
      verdict = run_long_time_assembly(cfg, setup, out);
      break;
    case ExperimentKind::truncation_convergence:
      verdict = run_truncation_convergence(cfg, setup, out);
      break;
    case ExperimentKind::strichartz_spotcheck:
      verdict = run_strichartz_spotcheck(cfg, setup, out);
      break;
    case ExperimentKind::moment_bounds:
      verdict = run_moment_bounds(cfg, setup, out);
      break;
  }
  verdict.experiment = to_string(cfg.kind);
  verdict.seed = setup.seed;
  verdict.config_hash = hash;
  io::atomic_write(out / ("verdict_" + verdict.experiment + ".json"),
                   verdict_to_json(verdict));
  artifacts.verdicts.push_back(verdict);
  artifacts.pass = verdict.pass;
  return artifacts;
}

}  // namespace snls
