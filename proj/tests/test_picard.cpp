#include <doctest.h>

#include <cmath>

#include "snls/experiments.hpp"
#include "snls/picard.hpp"

using namespace snls;

namespace {

constexpr double kPi = 3.14159265358979323846264338328;

struct Fixture {
  GridPtr grid = SpectralGrid::make(1, 64, 8.0 * kPi);
  NonlinearitySpec spec = NonlinearitySpec::mass_critical(1);
  MultiplierOperator op = MultiplierOperator::decay(grid, 0.02, 1.0);
  SolverConfig cfg;

  Fixture() {
    cfg.dt = 1e-3;
    cfg.t_final = 0.4;
    cfg.snapshot_stride = 10;
  }

  std::int64_t steps() const {
    return static_cast<std::int64_t>(std::llround(cfg.t_final / cfg.dt));
  }

  PathForcing psi_path(std::uint64_t seed) const {
    return sample_convolution_path(grid, op, NoiseStream(seed, 0), 0.0,
                                   0.5 * cfg.dt, 2 * steps());
  }

  // Node lattice shared by Picard iterates and solver snapshots.
  std::pair<std::vector<double>, std::vector<GridField>> nodes(
      PathForcing& path) const {
    std::vector<double> times;
    std::vector<GridField> f;
    const std::int64_t stride = 2 * cfg.snapshot_stride;
    for (std::int64_t j = 0; j <= 2 * steps(); j += stride) {
      times.push_back(j * path.half_dt());
      f.push_back(path.at(j));
    }
    return {times, f};
  }
};

double max_diff(const GridField& a, const GridField& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  return worst;
}

}  // namespace

TEST_CASE("gamma_map: v = -f makes the integrand vanish") {
  Fixture fx;
  PathForcing path = fx.psi_path(21);
  auto [times, f] = fx.nodes(path);
  const GridField u0 =
      initial_data::gaussian_bump(fx.grid, {4.0 * kPi}, 2.0, 0.2);

  std::vector<GridField> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = Complex(-1.0, 0.0) * f[i];
  const std::vector<GridField> gamma =
      picard::gamma_map(times, v, u0, f, fx.spec);
  const std::vector<GridField> free_series =
      picard::free_evolution_series(u0, times);
  for (std::size_t i = 0; i < gamma.size(); ++i)
    CHECK(max_diff(gamma[i], free_series[i]) < 1e-13);
}

TEST_CASE("gamma_map: all-zero input is the zero fixed point") {
  Fixture fx;
  std::vector<double> times{0.0, 0.1, 0.2};
  std::vector<GridField> zero(3, GridField(fx.grid));
  const std::vector<GridField> gamma =
      picard::gamma_map(times, zero, GridField(fx.grid), zero, fx.spec);
  for (const GridField& g : gamma) CHECK(lebesgue_norm(g, 2.0) == 0.0);
}

TEST_CASE("picard_iterates: first iterate is exactly the free evolution") {
  Fixture fx;
  PathForcing path = fx.psi_path(3);
  auto [times, f] = fx.nodes(path);
  const GridField u0 =
      initial_data::gaussian_bump(fx.grid, {4.0 * kPi}, 2.0, 0.1);
  const picard::IterateTrace trace =
      picard::picard_iterates(u0, times, f, fx.spec, 3);
  const std::vector<GridField> free_series =
      picard::free_evolution_series(u0, times);
  REQUIRE(trace.iterates.size() == 3);
  for (std::size_t i = 0; i < times.size(); ++i)
    CHECK(max_diff(trace.iterates[0][i], free_series[i]) == 0.0);
  CHECK_THROWS(picard::picard_iterates(u0, times, f, fx.spec, 1));
}

TEST_CASE("picard_iterates: small data contracts with ratio <= 1/2") {
  Fixture fx;
  PathForcing path = fx.psi_path(5);
  auto [times, f] = fx.nodes(path);
  const GridField u0 =
      initial_data::gaussian_bump(fx.grid, {4.0 * kPi}, 2.0, 0.1);
  const picard::IterateTrace trace =
      picard::picard_iterates(u0, times, f, fx.spec, 7);
  REQUIRE(trace.ratios.size() >= 5);
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(trace.ratios[j] <= 0.5);
    CHECK(trace.distances[j + 1] <= trace.distances[j]);
  }
}

TEST_CASE("picard_iterates: large data reports ratios above 1, no throw") {
  Fixture fx;
  fx.cfg.t_final = 1.0;
  PathForcing path = fx.psi_path(6);
  auto [times, f] = fx.nodes(path);
  const GridField u0 =
      initial_data::gaussian_bump(fx.grid, {4.0 * kPi}, 1.0, 2.5);
  const picard::IterateTrace trace =
      picard::picard_iterates(u0, times, f, fx.spec, 5);
  double max_ratio = 0.0;
  for (double r : trace.ratios) max_ratio = std::max(max_ratio, r);
  CHECK(max_ratio > 1.0);
}

TEST_CASE("causality: iterates depend only on the forcing prefix") {
  Fixture fx;
  PathForcing path = fx.psi_path(9);
  auto [times, f] = fx.nodes(path);
  const GridField u0 =
      initial_data::gaussian_bump(fx.grid, {4.0 * kPi}, 2.0, 0.15);

  // Zero the forcing beyond node k; the iterates on [t0, t_k] are unchanged.
  const std::size_t k = times.size() / 2;
  std::vector<GridField> truncated = f;
  for (std::size_t i = k + 1; i < truncated.size(); ++i)
    truncated[i] = GridField(fx.grid);

  const picard::IterateTrace full =
      picard::picard_iterates(u0, times, f, fx.spec, 4);
  const picard::IterateTrace cut =
      picard::picard_iterates(u0, times, truncated, fx.spec, 4);
  for (std::size_t j = 0; j < full.iterates.size(); ++j)
    for (std::size_t i = 0; i <= k; ++i)
      CHECK(max_diff(full.iterates[j][i], cut.iterates[j][i]) == 0.0);
}

TEST_CASE("fixed point agrees with solve_perturbed_v") {
  Fixture fx;
  PathForcing path = fx.psi_path(5);
  auto [times, f] = fx.nodes(path);
  const GridField u0 =
      initial_data::gaussian_bump(fx.grid, {4.0 * kPi}, 2.0, 0.1);
  const double tol = 2e-6;
  const picard::FixedPointResult fp =
      picard::picard_fixed_point(u0, times, f, fx.spec, tol, 64);
  REQUIRE(fp.converged);

  PathForcing run = path.window(0, 1.0);
  const TrajectoryRecord rec = solve_perturbed_v(u0, run, fx.spec, fx.cfg);
  REQUIRE_FALSE(rec.diverged);
  REQUIRE(rec.u.size() == fp.solution.size());
  const double distance =
      picard::contraction_distance(times, fp.solution, rec.u, fx.spec);
  CHECK(distance <= 10.0 * tol);
}

TEST_CASE("lwp_threshold_check: zero data, linear scaling, smallness") {
  Fixture fx;
  fx.cfg.t_final = 0.25;
  PathForcing zero_path(
      std::vector<GridField>(2 * fx.steps() + 1, GridField(fx.grid)), 0.0,
      0.5 * fx.cfg.dt);
  const picard::ThresholdReport zero_report = picard::lwp_threshold_check(
      GridField(fx.grid), zero_path, fx.spec, fx.cfg, 0.1);
  CHECK(zero_report.lhs == 0.0);
  CHECK(zero_report.passes_threshold);
  CHECK(zero_report.solution_norm == 0.0);
  CHECK(zero_report.within_bound);

  // The free part of the lhs is exactly linear in the data scale.
  PathForcing path = fx.psi_path(31);
  const GridField u0 =
      initial_data::gaussian_bump(fx.grid, {4.0 * kPi}, 2.0, 0.05);
  const picard::ThresholdReport r1 =
      picard::lwp_threshold_check(u0, path, fx.spec, fx.cfg, 1e9);
  const picard::ThresholdReport r2 = picard::lwp_threshold_check(
      Complex(2.0, 0.0) * u0, path, fx.spec, fx.cfg, 1e9);
  CHECK(r2.free_norm == doctest::Approx(2.0 * r1.free_norm).epsilon(1e-12));

  // Threshold-passing configuration obeys the 2*eta conclusion.
  const double eta = 0.25;
  const picard::ThresholdReport small =
      picard::lwp_threshold_check(u0, path, fx.spec, fx.cfg, eta);
  REQUIRE(small.passes_threshold);
  CHECK(small.ran_solver);
  CHECK(small.within_bound);
  CHECK(small.solution_norm <= 2.0 * eta * 1.05);
}

TEST_CASE("contraction norm: energy-critical variant uses gradients") {
  auto grid3 = SpectralGrid::make(3, 8, 2.0 * kPi);
  const auto spec3 = NonlinearitySpec::energy_critical(3);
  std::vector<double> times{0.0, 0.5, 1.0};
  std::vector<GridField> series(
      3, initial_data::plane_wave(grid3, {1, 0, 0}, Complex(1.0, 0.0)));
  const double norm = picard::contraction_norm(times, series, spec3);
  // Time-constant series: value = ||f||_{W^{1,r_d}} * T^{1/q_d}.
  const double spatial = w1r_norm(series[0], energy_pair(3).r.value());
  CHECK(norm ==
        doctest::Approx(spatial * std::pow(1.0, 1.0 / 6.0)).epsilon(1e-12));
}
