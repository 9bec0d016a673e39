#pragma once

#include <cstdint>

#include "snls/dynamics.hpp"

namespace snls::ensemble {

/// Stopping rule: fixed horizon (the solver's t_final) plus an optional cap
/// on the running criticality norm, the discrete analogue of the paper's
/// stopping times T_1, T_2 = min(T, T_1).
struct StoppingRule {
  double r_max = std::numeric_limits<double>::infinity();
};

struct EnsembleConfig {
  int trajectories = 2;
  std::uint64_t seed = 0;
  NonlinearitySpec spec;
  SolverConfig solver;
  StoppingRule stopping;
  int threads = 1;
  double max_divergence_fraction = 0.01;
};

struct TrajectorySummary {
  std::uint64_t stream_id = 0;
  bool diverged = false;
  bool stopped = false;
  double sup_mass = 0.0;
  double final_mass = 0.0;
  double sup_energy = 0.0;
  double sup_monitor = 0.0;
};

/// Per-time Monte Carlo aggregates over the included (non-diverged)
/// trajectories, plus per-trajectory rows for moment statistics.
struct EnsembleStats {
  std::vector<double> times;
  std::vector<std::vector<double>> mass_rows;     // [trajectory][time]
  std::vector<std::vector<double>> energy_rows;   // empty when d < 3
  std::vector<std::vector<double>> quartic_rows;  // running Ito quartic term
  std::vector<TrajectorySummary> summaries;
  int diverged_count = 0;
  int stopped_count = 0;
  double initial_mass = 0.0;
  double initial_energy = 0.0;

  std::vector<double> mean_mass, se_mass;
  std::vector<double> mean_energy, se_energy;
  std::vector<double> mean_quartic;

  int included() const {
    return static_cast<int>(mass_rows.size()) - diverged_count;
  }
};

/// Runs `trajectories` independent SNLS paths with stream ids 0..n-1.
/// The aggregate is a deterministic function of (config, seed): trajectory
/// results land in indexed slots and are reduced sequentially, so the thread
/// count never changes the bytes.
EnsembleStats run_ensemble(const EnsembleConfig& config, const GridField& u0,
                           const MultiplierOperator& op);

struct BalanceReport {
  std::vector<double> times;
  std::vector<double> mean, se, predicted;
  double max_abs_deviation = 0.0;
  double worst_margin = 0.0;  // max over times of |dev| - allowance
  double budget = 0.0;
  bool pass = false;
};

/// Ito mass balance: mean M(u(t)) versus M(u0) + 2 t ||phi||_HS^2 within
/// 4 SE + discretization budget at every output time.
BalanceReport mass_balance_test(const EnsembleStats& stats, double hs0_squared,
                                double budget);

/// Ito energy balance at the horizon: mean of
///   E(u(T)) - d/(d-2) * int_0^T int |u|^{4/(d-2)} sum_n |phi e_n|^2
/// versus E(u0) + T ||phi||_{HS(L^2;Hdot^1)}^2, within 4 SE + budget.
/// Also reports the per-time right-hand side for the stats CSV.
struct EnergyBalanceReport {
  std::vector<double> times;
  std::vector<double> mean_energy, se_energy, predicted_rhs;
  double statistic_mean = 0.0;
  double statistic_se = 0.0;
  double predicted = 0.0;
  double budget = 0.0;
  bool pass = false;
};

EnergyBalanceReport energy_balance_test(const EnsembleStats& stats,
                                        double hs1_hom_squared, double budget);

struct SupMomentEstimate {
  double power = 1.0;
  double estimate = 0.0;
  double standard_error = 0.0;
  double ci_low = 0.0;   // bootstrap 95% interval
  double ci_high = 0.0;
};

/// E[ sup_t M(u(t))^{p/2} ] with a seeded bootstrap confidence interval.
SupMomentEstimate sup_moment_estimate(const EnsembleStats& stats, double p,
                                      std::uint64_t bootstrap_seed = 7);

struct TruncationResult {
  std::vector<double> N_values;
  std::vector<std::vector<double>> sup_distance;  // [path][N]
};

/// Coupled truncation convergence: per path, the full and truncated solvers
/// share a noise stream; reports sup_t ||u - u_N||_{L^2} per N.
TruncationResult truncation_convergence_test(
    const GridField& u0, const MultiplierOperator& op,
    const NonlinearitySpec& spec, const SolverConfig& solver,
    std::uint64_t seed, int paths, const std::vector<double>& N_values);

}  // namespace snls::ensemble
