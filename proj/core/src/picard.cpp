#include "snls/picard.hpp"

#include <cmath>
#include <stdexcept>

namespace snls::picard {

namespace {

void check_series(const std::vector<double>& times, std::size_t count) {
  if (times.size() < 2)
    throw std::invalid_argument("picard: need at least two time nodes");
  if (times.size() != count)
    throw std::invalid_argument("picard: series length mismatch");
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    if (!(times[i] < times[i + 1]))
      throw std::invalid_argument("picard: times must be strictly increasing");
}

}  // namespace

double contraction_norm(const std::vector<double>& times,
                        const std::vector<GridField>& series,
                        const NonlinearitySpec& spec) {
  const StrichartzPair pair = spec.contraction_pair();
  if (spec.gradient_norms()) return strichartz_w1r_norm(times, series, pair);
  SpaceTimeSample sample{times, series, pair};
  return strichartz_norm(sample);
}

double contraction_distance(const std::vector<double>& times,
                            const std::vector<GridField>& a,
                            const std::vector<GridField>& b,
                            const NonlinearitySpec& spec) {
  if (a.size() != b.size())
    throw std::invalid_argument("contraction_distance: length mismatch");
  std::vector<GridField> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  return contraction_norm(times, diff, spec);
}

std::vector<GridField> free_evolution_series(
    const GridField& u0, const std::vector<double>& times) {
  Propagator prop(u0.grid);
  std::vector<GridField> out;
  out.reserve(times.size());
  out.push_back(prop.apply(u0, times.front() - times.front()));
  for (std::size_t k = 1; k < times.size(); ++k)
    out.push_back(prop.apply(out.back(), times[k] - times[k - 1]));
  return out;
}

std::vector<GridField> gamma_map(const std::vector<double>& times,
                                 const std::vector<GridField>& v,
                                 const GridField& u0,
                                 const std::vector<GridField>& f,
                                 const NonlinearitySpec& spec, bool dealias) {
  check_series(times, v.size());
  check_series(times, f.size());
  Propagator prop(u0.grid);
  const Complex minus_i(0.0, -1.0);

  std::vector<GridField> out;
  out.reserve(times.size());
  GridField free_part = u0;
  GridField duhamel(u0.grid);
  GridField g_prev = minus_i * nonlinearity_dealiased(v[0] + f[0], spec, dealias);
  out.push_back(free_part);
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double dt = times[k] - times[k - 1];
    free_part = prop.apply(free_part, dt);
    const GridField g_k =
        minus_i * nonlinearity_dealiased(v[k] + f[k], spec, dealias);
    duhamel = prop.apply(duhamel, dt);
    const GridField g_prev_moved = prop.apply(g_prev, dt);
    for (std::size_t i = 0; i < duhamel.values.size(); ++i)
      duhamel.values[i] +=
          0.5 * dt * (g_prev_moved.values[i] + g_k.values[i]);
    out.push_back(free_part + duhamel);
    g_prev = g_k;
  }
  return out;
}

IterateTrace picard_iterates(const GridField& u0,
                             const std::vector<double>& times,
                             const std::vector<GridField>& f,
                             const NonlinearitySpec& spec, int J,
                             bool dealias) {
  if (J < 2) throw std::invalid_argument("picard_iterates: J must be >= 2");
  IterateTrace trace;
  trace.times = times;
  trace.iterates.push_back(free_evolution_series(u0, times));
  for (int j = 1; j < J; ++j)
    trace.iterates.push_back(
        gamma_map(times, trace.iterates.back(), u0, f, spec, dealias));
  for (std::size_t j = 0; j + 1 < trace.iterates.size(); ++j)
    trace.distances.push_back(contraction_distance(
        times, trace.iterates[j + 1], trace.iterates[j], spec));
  for (std::size_t j = 0; j + 1 < trace.distances.size(); ++j)
    trace.ratios.push_back(trace.distances[j] > 0.0
                               ? trace.distances[j + 1] / trace.distances[j]
                               : 0.0);
  return trace;
}

FixedPointResult picard_fixed_point(const GridField& u0,
                                    const std::vector<double>& times,
                                    const std::vector<GridField>& f,
                                    const NonlinearitySpec& spec, double tol,
                                    int max_iterations, bool dealias) {
  FixedPointResult result;
  result.times = times;
  std::vector<GridField> current = free_evolution_series(u0, times);
  for (int j = 0; j < max_iterations; ++j) {
    std::vector<GridField> next = gamma_map(times, current, u0, f, spec, dealias);
    result.final_distance = contraction_distance(times, next, current, spec);
    current = std::move(next);
    result.iterations = j + 1;
    if (result.final_distance < tol) {
      result.converged = true;
      break;
    }
  }
  result.solution = std::move(current);
  return result;
}

ThresholdReport lwp_threshold_check(const GridField& u0, PathForcing& forcing,
                                    const NonlinearitySpec& spec,
                                    const SolverConfig& config, double eta,
                                    double tolerance) {
  if (!(eta > 0.0))
    throw std::invalid_argument("lwp_threshold_check: eta must be positive");
  ThresholdReport report;
  report.eta = eta;
  report.bound = 2.0 * eta;

  const std::int64_t steps =
      static_cast<std::int64_t>(std::llround(config.t_final / config.dt));
  const std::int64_t node_stride = 2 * config.snapshot_stride;

  std::vector<double> times;
  for (std::int64_t j = 0; j <= 2 * steps; j += node_stride)
    times.push_back(forcing.t0() + j * forcing.half_dt());
  if (times.back() < forcing.t0() + config.t_final - 1e-12)
    times.push_back(forcing.t0() + config.t_final);

  const std::vector<GridField> free_series = free_evolution_series(u0, times);
  report.free_norm = picard::contraction_norm(times, free_series, spec);

  std::vector<GridField> f_series;
  f_series.reserve(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const std::int64_t j =
        static_cast<std::int64_t>(std::llround((times[k] - forcing.t0()) /
                                               forcing.half_dt()));
    f_series.push_back(forcing.at(j));
  }
  report.forcing_norm = picard::contraction_norm(times, f_series, spec);
  report.lhs = report.free_norm + report.forcing_norm;
  report.passes_threshold = report.lhs <= eta;
  if (!report.passes_threshold) return report;

  PathForcing run_forcing = forcing.window(0, forcing.amplitude());
  TrajectoryRecord record = solve_perturbed_v(u0, run_forcing, spec, config,
                                              SolveOptions{.store_fields = false});
  report.ran_solver = true;
  report.solution_norm =
      record.monitor_value(record.monitor_integral.size() - 1);
  report.within_bound =
      !record.diverged &&
      report.solution_norm <= report.bound * (1.0 + tolerance);
  return report;
}

}  // namespace snls::picard
