#include "snls/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "snls/rng.hpp"

namespace snls::ensemble {

namespace {

// Reduction sink: scalar series only, no stored fields.
class RowSink : public SnapshotSink {
 public:
  RowSink(const NonlinearitySpec& spec, const MultiplierOperator& op,
          double r_max)
      : spec_(spec), r_max_(r_max) {
    const SpectralGrid& grid = *op.grid();
    track_energy_ = grid.dimension() >= 3;
    if (track_energy_) {
      // Diagonal phi makes sum_n |phi e_n(x)|^2 the constant
      // ||phi||_HS^2 / V. The d/(d-2) coefficient of the quartic Ito term
      // is folded in here, so quartic_row is the full drift contribution.
      const double hs0 = hs_norm(op, 0.0);
      const int d = grid.dimension();
      phi_sq_density_ =
          hs0 * hs0 / grid.volume() * static_cast<double>(d) / (d - 2.0);
      quartic_exponent_ = 4.0 / (d - 2.0);
    }
    pair_ = spec.contraction_pair();
    monitor_q_ = pair_.q.value();
  }

  bool on_snapshot(int, double t, const GridField& u, const GridField*,
                   const GridField*) override {
    times.push_back(t);
    mass_row.push_back(mass(u));
    if (track_energy_) {
      energy_row.push_back(energy(u));
      double s = 0.0;
      for (const Complex& z : u.values)
        s += std::pow(std::norm(z), 0.5 * quartic_exponent_);
      s *= u.grid->cell_volume() * phi_sq_density_;
      if (quartic_row.empty()) {
        quartic_row.push_back(0.0);
      } else {
        quartic_row.push_back(quartic_row.back() +
                              0.5 * (s + last_quartic_density_) *
                                  (t - times[times.size() - 2]));
      }
      last_quartic_density_ = s;
    }
    const double r = pair_.r.value();
    const double g = spec_.gradient_norms() ? w1r_norm(u, r)
                                            : lebesgue_norm(u, r);
    const double gq = std::pow(g, monitor_q_);
    if (monitor_integral_.empty()) {
      monitor_integral_.push_back(0.0);
    } else {
      monitor_integral_.push_back(monitor_integral_.back() +
                                  0.5 * (gq + last_gq_) *
                                      (t - times[times.size() - 2]));
    }
    last_gq_ = gq;
    const double monitor = std::pow(monitor_integral_.back(), 1.0 / monitor_q_);
    sup_monitor = std::max(sup_monitor, monitor);
    return monitor <= r_max_;
  }

  std::vector<double> times, mass_row, energy_row, quartic_row;
  double sup_monitor = 0.0;

 private:
  NonlinearitySpec spec_;
  StrichartzPair pair_;
  double monitor_q_ = 0.0;
  double r_max_;
  bool track_energy_ = false;
  double phi_sq_density_ = 0.0;
  double quartic_exponent_ = 0.0;
  double last_quartic_density_ = 0.0;
  std::vector<double> monitor_integral_;
  double last_gq_ = 0.0;
};

void fill_mean_se(const std::vector<std::vector<double>>& rows,
                  const std::vector<bool>& include, std::size_t n_times,
                  std::vector<double>& mean, std::vector<double>& se) {
  mean.assign(n_times, 0.0);
  se.assign(n_times, 0.0);
  for (std::size_t t = 0; t < n_times; ++t) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!include[i] || t >= rows[i].size()) continue;
      sum += rows[i][t];
      ++count;
    }
    if (count == 0) continue;
    const double m = sum / count;
    mean[t] = m;
    if (count > 1) {
      double ss = 0.0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!include[i] || t >= rows[i].size()) continue;
        const double d = rows[i][t] - m;
        ss += d * d;
      }
      se[t] = std::sqrt(ss / (count - 1.0) / count);
    }
  }
}

}  // namespace

EnsembleStats run_ensemble(const EnsembleConfig& config, const GridField& u0,
                           const MultiplierOperator& op) {
  if (config.trajectories < 2)
    throw std::invalid_argument("ensemble: need at least 2 trajectories");
  const int n = config.trajectories;
  std::vector<RowSink> sinks;
  sinks.reserve(n);
  for (int i = 0; i < n; ++i)
    sinks.emplace_back(config.spec, op, config.stopping.r_max);
  std::vector<TrajectorySummary> summaries(n);

  std::atomic<int> next{0};
  std::atomic<int> diverged{0};
  auto worker = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      SolveOptions opts;
      opts.store_fields = false;
      opts.sink = &sinks[i];
      const TrajectoryRecord rec =
          solve_snls(u0, op, NoiseStream(config.seed, i), config.spec,
                     config.solver, opts);
      TrajectorySummary& s = summaries[i];
      s.stream_id = i;
      s.diverged = rec.diverged;
      s.stopped = rec.stopped;
      if (rec.diverged) diverged.fetch_add(1);
      const RowSink& sink = sinks[i];
      for (double m : sink.mass_row) s.sup_mass = std::max(s.sup_mass, m);
      if (!sink.mass_row.empty()) s.final_mass = sink.mass_row.back();
      for (double e : sink.energy_row) s.sup_energy = std::max(s.sup_energy, e);
      s.sup_monitor = sink.sup_monitor;
    }
  };

  const int threads = std::max(1, config.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  EnsembleStats stats;
  stats.summaries = std::move(summaries);
  stats.diverged_count = diverged.load();
  if (stats.diverged_count == n)
    throw std::runtime_error("ensemble: all trajectories diverged");

  // The densest surviving time grid (stopped paths are shorter).
  std::size_t n_times = 0;
  int reference = -1;
  for (int i = 0; i < n; ++i) {
    if (stats.summaries[i].diverged) continue;
    if (sinks[i].times.size() > n_times) {
      n_times = sinks[i].times.size();
      reference = i;
    }
  }
  stats.times = sinks[reference].times;

  std::vector<bool> include(n);
  for (int i = 0; i < n; ++i) {
    include[i] = !stats.summaries[i].diverged;
    if (stats.summaries[i].stopped) ++stats.stopped_count;
    stats.mass_rows.push_back(std::move(sinks[i].mass_row));
    if (!sinks[i].energy_row.empty()) {
      stats.energy_rows.push_back(std::move(sinks[i].energy_row));
      stats.quartic_rows.push_back(std::move(sinks[i].quartic_row));
    }
  }

  fill_mean_se(stats.mass_rows, include, n_times, stats.mean_mass,
               stats.se_mass);
  if (!stats.energy_rows.empty()) {
    fill_mean_se(stats.energy_rows, include, n_times, stats.mean_energy,
                 stats.se_energy);
    std::vector<double> dummy;
    fill_mean_se(stats.quartic_rows, include, n_times, stats.mean_quartic,
                 dummy);
  }
  stats.initial_mass = stats.mean_mass.empty() ? 0.0 : stats.mean_mass.front();
  stats.initial_energy =
      stats.mean_energy.empty() ? 0.0 : stats.mean_energy.front();
  return stats;
}

BalanceReport mass_balance_test(const EnsembleStats& stats, double hs0_squared,
                                double budget) {
  BalanceReport report;
  report.times = stats.times;
  report.mean = stats.mean_mass;
  report.se = stats.se_mass;
  report.budget = budget;
  report.predicted.resize(stats.times.size());
  report.worst_margin = -std::numeric_limits<double>::infinity();
  bool pass = true;
  // Mass-exactness floor of the splitting scheme; dominant only for phi = 0,
  // where the SE is identically zero.
  const double floor = 1e-10 * std::max(stats.initial_mass, 1e-30);
  for (std::size_t t = 0; t < stats.times.size(); ++t) {
    const double elapsed = stats.times[t] - stats.times.front();
    report.predicted[t] = stats.initial_mass + 2.0 * elapsed * hs0_squared;
    const double dev = std::abs(report.mean[t] - report.predicted[t]);
    const double allowance = 4.0 * report.se[t] + budget + floor;
    report.max_abs_deviation = std::max(report.max_abs_deviation, dev);
    report.worst_margin = std::max(report.worst_margin, dev - allowance);
    if (dev > allowance) pass = false;
  }
  report.pass = pass;
  return report;
}

EnergyBalanceReport energy_balance_test(const EnsembleStats& stats,
                                        double hs1_hom_squared, double budget) {
  if (stats.energy_rows.empty())
    throw std::invalid_argument(
        "energy_balance_test: requires an energy-tracking run (d >= 3)");
  EnergyBalanceReport report;
  report.times = stats.times;
  report.mean_energy = stats.mean_energy;
  report.se_energy = stats.se_energy;
  report.budget = budget;

  report.predicted_rhs.resize(stats.times.size());
  for (std::size_t t = 0; t < stats.times.size(); ++t) {
    const double elapsed = stats.times[t] - stats.times.front();
    report.predicted_rhs[t] = stats.initial_energy +
                              stats.mean_quartic[t] +
                              elapsed * hs1_hom_squared;
  }

  // Per-trajectory statistic at the horizon: X = E(T) - quartic(T); its mean
  // must match E(0) + T * ||phi||^2_{HS(L^2;Hdot^1)}.
  std::vector<double> x;
  const std::size_t last = stats.times.size() - 1;
  for (std::size_t i = 0; i < stats.energy_rows.size(); ++i) {
    if (stats.energy_rows[i].size() != stats.times.size()) continue;
    x.push_back(stats.energy_rows[i][last] - stats.quartic_rows[i][last]);
  }
  if (x.size() < 2)
    throw std::runtime_error("energy_balance_test: too few complete paths");
  double sum = 0.0;
  for (double v : x) sum += v;
  const double mean = sum / x.size();
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  report.statistic_mean = mean;
  report.statistic_se = std::sqrt(ss / (x.size() - 1.0) / x.size());
  const double horizon = stats.times.back() - stats.times.front();
  report.predicted = stats.initial_energy + horizon * hs1_hom_squared;
  report.pass = std::abs(mean - report.predicted) <=
                4.0 * report.statistic_se + budget;
  return report;
}

SupMomentEstimate sup_moment_estimate(const EnsembleStats& stats, double p,
                                      std::uint64_t bootstrap_seed) {
  SupMomentEstimate out;
  out.power = p;
  std::vector<double> values;
  for (std::size_t i = 0; i < stats.summaries.size(); ++i) {
    if (stats.summaries[i].diverged) continue;
    values.push_back(std::pow(stats.summaries[i].sup_mass, 0.5 * p));
  }
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  out.estimate = sum / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.estimate) * (v - out.estimate);
    out.standard_error = std::sqrt(ss / (n - 1.0) / n);
  }

  constexpr int kResamples = 200;
  std::vector<double> resampled(kResamples);
  for (int b = 0; b < kResamples; ++b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto block = Philox::block(bootstrap_seed, 0xB007, b, i);
      const std::size_t pick = block[0] % values.size();
      acc += values[pick];
    }
    resampled[b] = acc / n;
  }
  std::sort(resampled.begin(), resampled.end());
  out.ci_low = resampled[static_cast<int>(0.025 * kResamples)];
  out.ci_high = resampled[static_cast<int>(0.975 * kResamples) - 1];
  return out;
}

TruncationResult truncation_convergence_test(
    const GridField& u0, const MultiplierOperator& op,
    const NonlinearitySpec& spec, const SolverConfig& solver,
    std::uint64_t seed, int paths, const std::vector<double>& N_values) {
  TruncationResult result;
  result.N_values = N_values;
  for (int path = 0; path < paths; ++path) {
    const TrajectoryRecord full =
        solve_snls(u0, op, NoiseStream(seed, path), spec, solver);
    std::vector<double> row;
    for (double N : N_values) {
      const TrajectoryRecord trunc = solve_truncated(
          u0, op, NoiseStream(seed, path), N, spec, solver);
      if (full.times.size() != trunc.times.size())
        throw std::runtime_error("truncation test: node mismatch");
      double sup = 0.0;
      for (std::size_t i = 0; i < full.u.size(); ++i)
        sup = std::max(sup, lebesgue_norm(full.u[i] - trunc.u[i], 2.0));
      row.push_back(sup);
    }
    result.sup_distance.push_back(std::move(row));
  }
  return result;
}

}  // namespace snls::ensemble
