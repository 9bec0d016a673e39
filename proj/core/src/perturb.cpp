#include "snls/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace snls::perturb {

namespace {

// Prefix trapezoid of ||u||^q at the record's snapshot nodes.
std::vector<double> prefix_integral(const TrajectoryRecord& w,
                                    const StrichartzPair& pair,
                                    bool gradient) {
  if (w.u.empty())
    throw std::invalid_argument("partition: record must store fields");
  const double q = pair.q.value();
  const double r = pair.r.value();
  std::vector<double> g(w.u.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double spatial =
        gradient ? w1r_norm(w.u[i], r) : lebesgue_norm(w.u[i], r);
    g[i] = std::pow(spatial, q);
  }
  std::vector<double> prefix(g.size(), 0.0);
  for (std::size_t i = 1; i < g.size(); ++i)
    prefix[i] = prefix[i - 1] +
                0.5 * (g[i] + g[i - 1]) * (w.times[i] - w.times[i - 1]);
  return prefix;
}

}  // namespace

IntervalPartition partition_by_smallness(const TrajectoryRecord& w, double eta,
                                         const StrichartzPair& pair) {
  if (!(eta > 0.0))
    throw std::invalid_argument("partition: eta must be positive");
  if (w.times.size() < 2)
    throw std::invalid_argument("partition: record too short");
  const double q = pair.q.value();
  const std::vector<double> prefix = prefix_integral(w, pair, false);
  const double cap = std::pow(eta, q) * (1.0 + 1e-12);

  IntervalPartition out;
  out.breakpoints.push_back(w.times.front());
  out.snapshot_index.push_back(0);
  std::size_t lo = 0;
  while (lo + 1 < w.times.size()) {
    std::size_t hi = lo + 1;
    if (prefix[hi] - prefix[lo] > cap)
      throw std::runtime_error(
          "partition: eta too small for time resolution");
    while (hi + 1 < w.times.size() && prefix[hi + 1] - prefix[lo] <= cap)
      ++hi;
    out.breakpoints.push_back(w.times[hi]);
    out.snapshot_index.push_back(hi);
    out.interval_norms.push_back(std::pow(prefix[hi] - prefix[lo], 1.0 / q));
    lo = hi;
  }
  return out;
}

std::vector<LinearSmallnessRow> linear_smallness_check(
    const TrajectoryRecord& w, const IntervalPartition& partition, double eta,
    double tolerance) {
  if (w.u.empty())
    throw std::invalid_argument("linear_smallness: record must store fields");
  const StrichartzPair pair = diagonal_pair(w.u.front().grid->dimension());
  std::vector<LinearSmallnessRow> rows;
  for (std::size_t j = 0; j + 1 < partition.snapshot_index.size(); ++j) {
    const std::size_t lo = partition.snapshot_index[j];
    const std::size_t hi = partition.snapshot_index[j + 1];
    std::vector<double> times(w.times.begin() + lo, w.times.begin() + hi + 1);
    const std::vector<GridField> free_series =
        picard::free_evolution_series(w.u[lo], times);
    SpaceTimeSample sample{times, free_series, pair};
    LinearSmallnessRow row;
    row.interval = static_cast<int>(j);
    row.value = strichartz_norm(sample);
    row.bound = 2.0 * eta * (1.0 + tolerance);
    row.pass = row.value <= row.bound;
    rows.push_back(row);
  }
  return rows;
}

std::vector<GridField> error_term(const std::vector<GridField>& v,
                                  const std::vector<GridField>& f,
                                  const NonlinearitySpec& spec, bool dealias) {
  if (v.size() != f.size())
    throw std::invalid_argument("error_term: series length mismatch");
  std::vector<GridField> e;
  e.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    e.push_back(nonlinearity_dealiased(v[i] + f[i], spec, dealias) -
                nonlinearity_dealiased(v[i], spec, dealias));
  return e;
}

double dual_norm_of_error(const std::vector<double>& times,
                          const std::vector<GridField>& e,
                          const NonlinearitySpec& spec) {
  if (e.empty()) throw std::invalid_argument("dual_norm_of_error: empty");
  if (spec.gradient_norms()) {
    const StrichartzPair pair = energy_pair(spec.dimension);
    const StrichartzPair dual{pair.q.conjugate(), pair.r.conjugate()};
    return strichartz_w1r_norm(times, e, dual);
  }
  SpaceTimeSample sample{times, e, diagonal_dual_pair(spec.dimension)};
  return strichartz_norm(sample);
}

ReferenceComparison compare_to_reference(const TrajectoryRecord& v,
                                         const TrajectoryRecord& w,
                                         const NonlinearitySpec& spec) {
  if (v.times.size() != w.times.size())
    throw std::invalid_argument("compare_to_reference: mismatched nodes");
  for (std::size_t i = 0; i < v.times.size(); ++i)
    if (std::abs(v.times[i] - w.times[i]) > 1e-12)
      throw std::invalid_argument("compare_to_reference: mismatched nodes");
  ReferenceComparison out;
  std::vector<GridField> diff(v.u.size());
  for (std::size_t i = 0; i < v.u.size(); ++i) {
    diff[i] = v.u[i] - w.u[i];
    const double d = spec.gradient_norms() ? sobolev_norm(diff[i], 1.0)
                                           : lebesgue_norm(diff[i], 2.0);
    out.sup_distance = std::max(out.sup_distance, d);
  }
  out.spacetime_distance =
      picard::contraction_distance(v.times, v.u, w.u, spec);
  return out;
}

std::vector<double> cj_recursion(double C1, int J) {
  if (!(C1 > 0.0) || J < 1)
    throw std::invalid_argument("cj_recursion: need C1 > 0 and J >= 1");
  std::vector<double> cj(J);
  cj[0] = C1;
  for (int j = 1; j < J; ++j) cj[j] = C1 * (cj[j - 1] + 1.0);
  return cj;
}

std::vector<CjRequirement> cj_requirements(double C1, int J, double C0,
                                           double eta, double eps0) {
  const std::vector<double> cj = cj_recursion(C1, J);
  std::vector<CjRequirement> out(cj.size());
  for (std::size_t j = 0; j < cj.size(); ++j) {
    out[j].j = static_cast<int>(j) + 1;
    out[j].Cj = cj[j];
    out[j].eps_cap_eta = eta / (C0 * cj[j]);
    out[j].eps_cap_eps0 = eps0 / (cj[j] + 1.0);
  }
  return out;
}

HolderCheck holder_smallness_check(const std::vector<double>& times,
                                   const std::vector<GridField>& path,
                                   double q, const StrichartzPair& pair,
                                   int max_depth) {
  if (times.size() != path.size() || times.size() < 3)
    throw std::invalid_argument("holder_smallness_check: bad sample");
  const double q_pair = pair.q.value();
  if (!(q > q_pair))
    throw std::invalid_argument(
        "holder_smallness_check: q must exceed the pair's time exponent");
  const double r = pair.r.value();

  std::vector<double> g(path.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = lebesgue_norm(path[i], r);

  HolderCheck check;
  check.bound.C = time_lq_norm(times, g, q);
  check.bound.theta = 1.0 / q_pair - 1.0 / q;
  check.bound.q = q;

  const std::size_t segments_max = times.size() - 1;
  for (int depth = 0; depth <= max_depth; ++depth) {
    const std::size_t pieces = std::size_t{1} << depth;
    if (segments_max % pieces != 0) break;
    const std::size_t span = segments_max / pieces;
    if (span < 1) break;
    for (std::size_t k = 0; k < pieces; ++k) {
      const std::size_t lo = k * span;
      const std::size_t hi = lo + span;
      std::vector<double> t_slice(times.begin() + lo, times.begin() + hi + 1);
      std::vector<double> g_slice(g.begin() + lo, g.begin() + hi + 1);
      HolderRow row;
      row.t_lo = times[lo];
      row.t_hi = times[hi];
      row.norm = time_lq_norm(t_slice, g_slice, q_pair);
      row.cap =
          check.bound.C * std::pow(row.t_hi - row.t_lo, check.bound.theta);
      row.ratio = row.cap > 0.0 ? row.norm / row.cap : 0.0;
      check.worst_ratio = std::max(check.worst_ratio, row.ratio);
      check.rows.push_back(row);
    }
  }
  return check;
}

AssemblyReport long_time_assembly(const GridField& u0,
                                  const PathForcing& forcing_unit,
                                  const NonlinearitySpec& spec,
                                  const SolverConfig& config, double T,
                                  double eta, double epsilon,
                                  double tolerance) {
  AssemblyReport report;
  report.eta = eta;
  report.epsilon = epsilon;

  SolverConfig total_cfg = config;
  total_cfg.t_final = T;
  const std::int64_t steps =
      static_cast<std::int64_t>(std::llround(T / config.dt));
  if (steps % config.snapshot_stride != 0)
    throw std::invalid_argument(
        "long_time_assembly: horizon must be a whole number of snapshot "
        "strides");

  // Reference from v(t0) = u0 defines the eta-partition.
  const TrajectoryRecord w_global =
      solve_deterministic(u0, spec, total_cfg, SolveOptions{});
  const StrichartzPair pair = diagonal_pair(spec.dimension);
  const IntervalPartition partition =
      partition_by_smallness(w_global, eta, pair);
  const std::vector<LinearSmallnessRow> linear_rows =
      linear_smallness_check(w_global, partition, eta, tolerance);

  GridField v_state = w_global.u.front();  // sanitized u0
  report.final_time = partition.breakpoints.front();
  bool failed = false;
  for (std::size_t j = 0; j + 1 < partition.breakpoints.size(); ++j) {
    AssemblyRow row;
    row.index = static_cast<int>(j);
    row.t_lo = partition.breakpoints[j];
    row.t_hi = partition.breakpoints[j + 1];
    row.w_norm = partition.interval_norms[j];
    row.linear_norm = linear_rows[j].value;
    row.pass_linear = linear_rows[j].pass;

    SolverConfig cfg_j = config;
    cfg_j.t_final = row.t_hi - row.t_lo;

    const std::int64_t half_offset = static_cast<std::int64_t>(
        std::llround((row.t_lo - forcing_unit.t0()) / forcing_unit.half_dt()));
    PathForcing f_eps = forcing_unit.window(half_offset, epsilon);

    const std::int64_t steps_j =
        static_cast<std::int64_t>(std::llround(cfg_j.t_final / cfg_j.dt));
    const std::int64_t node_stride = 2 * cfg_j.snapshot_stride;
    const SpaceTimeSample f_sample =
        f_eps.sample_range(0, 2 * steps_j, node_stride, pair);
    row.forcing_norm = picard::contraction_norm(f_sample.times,
                                                f_sample.snapshots, spec);
    row.pass_forcing = row.forcing_norm <= eta * (1.0 + tolerance);

    const std::vector<GridField> free_series =
        picard::free_evolution_series(v_state, f_sample.times);
    const double free_norm =
        picard::contraction_norm(f_sample.times, free_series, spec);
    row.lwp_lhs = free_norm + row.forcing_norm;

    TrajectoryRecord v_rec =
        solve_perturbed_v(v_state, f_eps, spec, cfg_j, SolveOptions{});
    row.solution_norm = v_rec.monitor_value(v_rec.monitor_integral.size() - 1);
    row.solution_bound = 2.0 * row.lwp_lhs * (1.0 + tolerance);
    row.pass_lwp = !v_rec.diverged &&
                   row.lwp_lhs <= 4.0 * eta * (1.0 + tolerance) &&
                   row.solution_norm <= row.solution_bound;

    if (!v_rec.diverged) {
      // Reference re-based at the breakpoint state, per the proof's
      // per-interval application of the perturbation lemma.
      const TrajectoryRecord w_j =
          solve_deterministic(v_state, spec, cfg_j, SolveOptions{});
      const ReferenceComparison cmp = compare_to_reference(v_rec, w_j, spec);
      row.sup_distance = cmp.sup_distance;
      row.spacetime_distance = cmp.spacetime_distance;

      std::vector<GridField> f_fields = f_sample.snapshots;
      const std::vector<GridField> e =
          error_term(v_rec.u, f_fields, spec, cfg_j.dealias);
      row.error_dual_norm = dual_norm_of_error(v_rec.times, e, spec);
      const double shape_constant =
          spec.gradient_norms() ? 4.0 * spec.p : spec.p;
      row.error_bound = shape_constant *
                        std::pow(row.solution_norm + row.forcing_norm,
                                 spec.p - 1.0) *
                        row.forcing_norm * (1.0 + tolerance);
      row.pass_error = row.error_dual_norm <= row.error_bound;
      v_state = v_rec.u.back();
    }

    report.rows.push_back(row);
    if (!row.all_pass()) {
      failed = true;
      break;
    }
    report.final_time = row.t_hi;
  }

  report.reached_horizon =
      !failed && std::abs(report.final_time - T) <= 1e-9 * std::max(1.0, T);
  report.all_pass = report.reached_horizon;

  double c1 = 0.0;
  for (const AssemblyRow& row : report.rows)
    if (row.error_dual_norm > 0.0)
      c1 = std::max(c1, row.sup_distance / row.error_dual_norm);
  report.fitted_C1 = c1;
  if (!report.rows.empty())
    report.cj = cj_recursion(std::max(c1, 1.0),
                             static_cast<int>(report.rows.size()));
  return report;
}

}  // namespace snls::perturb
