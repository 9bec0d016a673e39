#include <doctest.h>

#include <cmath>
#include <functional>

#include "snls/dynamics.hpp"

using namespace snls;

namespace {

constexpr double kPi = 3.14159265358979323846264338328;

double max_diff(const GridField& a, const GridField& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  return worst;
}

GridField constant_field(GridPtr grid, Complex c) {
  GridField f(std::move(grid));
  for (auto& z : f.values) z = c;
  return f;
}

// Scalar RK4 reference for i v' = N(v + f(t)), spatially constant data.
Complex ode_reference(Complex v0, double p,
                      const std::function<Complex(double)>& f, double T,
                      int steps) {
  const Complex minus_i(0.0, -1.0);
  auto rhs = [&](double t, Complex v) {
    const Complex w = v + f(t);
    return minus_i * std::pow(std::abs(w), p - 1.0) * w;
  };
  Complex v = v0;
  const double h = T / steps;
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    const Complex k1 = rhs(t, v);
    const Complex k2 = rhs(t + 0.5 * h, v + 0.5 * h * k1);
    const Complex k3 = rhs(t + 0.5 * h, v + 0.5 * h * k2);
    const Complex k4 = rhs(t + h, v + h * k3);
    v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return v;
}

}  // namespace

TEST_CASE("nonlinearity_eval: pointwise powers") {
  auto g1 = SpectralGrid::make(1, 8, 1.0);
  CHECK(lebesgue_norm(nonlinearity_eval(GridField(g1),
                                        NonlinearitySpec::mass_critical(1)),
                      2.0) == 0.0);

  const GridField ones = constant_field(g1, Complex(1.0, 0.0));
  const GridField n1 =
      nonlinearity_eval(ones, NonlinearitySpec::mass_critical(1));
  CHECK(std::abs(n1.values[0] - Complex(1.0, 0.0)) < 1e-15);

  auto g3 = SpectralGrid::make(3, 8, 1.0);
  const GridField two_i = constant_field(g3, Complex(0.0, 2.0));
  const GridField n3 =
      nonlinearity_eval(two_i, NonlinearitySpec::energy_critical(3));
  CHECK(std::abs(n3.values[0] - Complex(0.0, 32.0)) < 1e-13);

  // Non-integer exponent path: d=3 mass-critical has p = 1 + 4/3.
  const GridField half = constant_field(g3, Complex(0.5, 0.0));
  const GridField nm =
      nonlinearity_eval(half, NonlinearitySpec::mass_critical(3));
  CHECK(std::abs(nm.values[0].real() - std::pow(0.5, 4.0 / 3.0) * 0.5) <
        1e-14);
}

TEST_CASE("nonlinearity spec invariants") {
  CHECK(NonlinearitySpec::mass_critical(1).p == doctest::Approx(5.0));
  CHECK(NonlinearitySpec::mass_critical(2).p == doctest::Approx(3.0));
  CHECK(NonlinearitySpec::energy_critical(3).p == doctest::Approx(5.0));
  CHECK(NonlinearitySpec::energy_critical(4).p == doctest::Approx(3.0));
  CHECK_THROWS(NonlinearitySpec::energy_critical(2));
  CHECK_THROWS(NonlinearitySpec::explicit_power(1, 1.0));
}

TEST_CASE("mass: constants, plane waves, refinement oracle") {
  auto grid = SpectralGrid::make(1, 64, 8.0 * kPi);
  const double V = grid->volume();
  CHECK(mass(constant_field(grid, Complex(0.3, 0.4))) ==
        doctest::Approx(0.25 * V));
  CHECK(mass(initial_data::plane_wave(grid, {4}, Complex(1.2, 0.0))) ==
        doctest::Approx(1.44 * V).epsilon(1e-12));

  auto fine = SpectralGrid::make(1, 256, 8.0 * kPi);
  const GridField gc = initial_data::gaussian_bump(grid, {4.0 * kPi}, 1.0, 0.7);
  const GridField gf = initial_data::gaussian_bump(fine, {4.0 * kPi}, 1.0, 0.7);
  CHECK(mass(gc) == doctest::Approx(mass(gf)).epsilon(1e-8));
}

TEST_CASE("energy: zero, d=4 plane-wave closed form, refinement oracle") {
  auto g4 = SpectralGrid::make(4, 8, 2.0 * kPi);
  CHECK(energy(GridField(g4)) == 0.0);

  // d=4: E = 1/2 |A|^2 |k|^2 V + 1/4 |A|^4 V with 2d/(d-2) = 4.
  const double A = 0.9;
  const GridField wave =
      initial_data::plane_wave(g4, {1, 1, 0, 0}, Complex(A, 0.0));
  const double V = g4->volume();
  const double expected = 0.5 * A * A * 2.0 * V + 0.25 * std::pow(A, 4.0) * V;
  CHECK(energy(wave) == doctest::Approx(expected).epsilon(1e-12));

  auto g1 = SpectralGrid::make(1, 8, 1.0);
  CHECK_THROWS(energy(GridField(g1)));

  // Smooth field: both grids resolve the bump (and |u|^6) far below
  // quadrature tolerance, so coarse and 4x-refined evaluations agree.
  auto g3 = SpectralGrid::make(3, 16, 4.0 * kPi);
  auto g3fine = SpectralGrid::make(3, 64, 4.0 * kPi);
  const std::vector<double> center(3, 2.0 * kPi);
  const GridField coarse = initial_data::gaussian_bump(g3, center, 2.0, 0.7);
  const GridField fine = initial_data::gaussian_bump(g3fine, center, 2.0, 0.7);
  CHECK(energy(coarse) == doctest::Approx(energy(fine)).epsilon(1e-8));
}

TEST_CASE("step_deterministic: constant data follows the exact phase ODE") {
  auto grid = SpectralGrid::make(1, 64, 8.0 * kPi);
  const auto spec = NonlinearitySpec::mass_critical(1);
  const Complex c(0.7, -0.2);
  GridField u = constant_field(grid, c);
  const double dt = 1e-2;
  const int steps = 100;
  for (int k = 0; k < steps; ++k) u = step_deterministic(u, spec, dt);
  const double omega = std::pow(std::abs(c), 4.0);
  const Complex expected = c * std::polar(1.0, -omega * dt * steps);
  CHECK(max_diff(u, constant_field(grid, expected)) < 1e-10);
}

TEST_CASE("step_deterministic: plane-wave dispersion relation is exact") {
  struct Case {
    int d, mode;
    double p;
  };
  for (const Case c : {Case{1, 3, 5.0}, Case{2, 2, 3.0}}) {
    auto grid = SpectralGrid::make(c.d, 16, 2.0 * kPi);
    const auto spec = NonlinearitySpec::explicit_power(c.d, c.p);
    const double A = 0.5;
    std::vector<int> mode(c.d, 0);
    mode[0] = c.mode;
    GridField u = initial_data::plane_wave(grid, mode, Complex(A, 0.0));
    const GridField u0 = u;
    const double dt = 1e-3;
    const int steps = 200;
    for (int k = 0; k < steps; ++k) u = step_deterministic(u, spec, dt);
    const double omega = c.mode * c.mode + std::pow(A, c.p - 1.0);
    const Complex factor = std::polar(1.0, -omega * dt * steps);
    double worst = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      worst = std::max(worst, std::abs(u.values[i] - factor * u0.values[i]));
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("solve_deterministic: mass exactness over a long horizon") {
  auto grid = SpectralGrid::make(1, 64, 8.0 * kPi);
  const auto spec = NonlinearitySpec::mass_critical(1);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_final = 10.0;
  cfg.snapshot_stride = 500;
  const GridField u0 = initial_data::random_sobolev(grid, 1.0, 0.6, 12);
  const TrajectoryRecord rec =
      solve_deterministic(u0, spec, cfg, SolveOptions{.store_fields = false});
  REQUIRE_FALSE(rec.diverged);
  const double m0 = rec.mass_series.front();
  double drift = 0.0;
  for (double m : rec.mass_series)
    drift = std::max(drift, std::abs(m - m0) / m0);
  CHECK(drift <= 1e-10);

  for (std::size_t i = 1; i < rec.monitor_integral.size(); ++i)
    CHECK(rec.monitor_integral[i] >= rec.monitor_integral[i - 1]);
}

TEST_CASE("solve_deterministic: d=3 energy drift is second order in dt") {
  auto grid = SpectralGrid::make(3, 16, 4.0 * kPi);
  const auto spec = NonlinearitySpec::energy_critical(3);
  const GridField u0 =
      initial_data::gaussian_bump(grid, {2 * kPi, 2 * kPi, 2 * kPi}, 1.2, 0.4);
  auto drift_at = [&](double dt) {
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.t_final = 0.5;
    cfg.snapshot_stride = std::max(1, static_cast<int>(0.05 / dt));
    // Dealiasing perturbs the Hamiltonian structure at O(1) in dt; the
    // conservation-order measurement needs the pure splitting scheme.
    cfg.dealias = false;
    const TrajectoryRecord rec = solve_deterministic(
        u0, spec, cfg, SolveOptions{.store_fields = false});
    REQUIRE_FALSE(rec.diverged);
    const double e0 = rec.energy_series.front();
    double drift = 0.0;
    for (double e : rec.energy_series)
      drift = std::max(drift, std::abs(e - e0) / std::abs(e0));
    return drift;
  };
  const double ratio = drift_at(2e-3) / drift_at(1e-3);
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("solve_perturbed_v: zero forcing takes the deterministic path") {
  auto grid = SpectralGrid::make(1, 64, 8.0 * kPi);
  const auto spec = NonlinearitySpec::mass_critical(1);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_final = 0.5;
  cfg.snapshot_stride = 50;
  const GridField u0 = initial_data::gaussian_bump(grid, {4 * kPi}, 2.0, 0.4);

  ZeroForcing zero(grid);
  const TrajectoryRecord a = solve_perturbed_v(u0, zero, spec, cfg);
  const TrajectoryRecord b = solve_deterministic(u0, spec, cfg);
  REQUIRE(a.times.size() == b.times.size());
  for (std::size_t i = 0; i < a.u.size(); ++i)
    CHECK(max_diff(a.u[i], b.u[i]) <= 1e-12);
}

TEST_CASE("solve_perturbed_v: spatially constant case against an ODE oracle") {
  auto grid = SpectralGrid::make(1, 16, 2.0 * kPi);
  const auto spec = NonlinearitySpec::mass_critical(1);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_final = 0.5;
  cfg.snapshot_stride = 100;
  cfg.dealias = false;  // constant fields are unaffected; keep it pure

  const Complex v0(0.2, 0.05);
  auto f_scalar = [](double t) { return Complex(0.1 * std::cos(t), 0.0); };

  const std::int64_t half_steps =
      2 * static_cast<std::int64_t>(std::llround(cfg.t_final / cfg.dt));
  std::vector<GridField> samples;
  for (std::int64_t j = 0; j <= half_steps; ++j)
    samples.push_back(constant_field(grid, f_scalar(j * 0.5 * cfg.dt)));
  PathForcing forcing(samples, 0.0, 0.5 * cfg.dt);

  const TrajectoryRecord rec =
      solve_perturbed_v(constant_field(grid, v0), forcing, spec, cfg);
  REQUIRE_FALSE(rec.diverged);
  const Complex ref = ode_reference(v0, spec.p, f_scalar, cfg.t_final, 200000);
  CHECK(std::abs(rec.u.back().values[0] - ref) < 1e-8);
}

TEST_CASE("solve_snls: zero noise reduces to the deterministic run") {
  auto grid = SpectralGrid::make(1, 64, 8.0 * kPi);
  const auto spec = NonlinearitySpec::mass_critical(1);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_final = 0.25;
  cfg.snapshot_stride = 50;
  const GridField u0 = initial_data::gaussian_bump(grid, {4 * kPi}, 2.0, 0.5);

  const TrajectoryRecord stoch = solve_snls(
      u0, MultiplierOperator::zero(grid), NoiseStream(1, 0), spec, cfg);
  const TrajectoryRecord det = solve_deterministic(u0, spec, cfg);
  REQUIRE(stoch.u.size() == det.u.size());
  for (std::size_t i = 0; i < det.u.size(); ++i)
    CHECK(max_diff(stoch.u[i], det.u[i]) <= 1e-12);
}

TEST_CASE("solve_snls: nonlinearity off gives u = Psi exactly") {
  auto grid = SpectralGrid::make(1, 64, 8.0 * kPi);
  const auto spec = NonlinearitySpec::mass_critical(1);
  const MultiplierOperator op = MultiplierOperator::decay(grid, 0.2, 1.0);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_final = 0.2;
  cfg.snapshot_stride = 40;
  cfg.disable_nonlinearity = true;

  SolveOptions opts;
  opts.store_components = true;
  const TrajectoryRecord rec = solve_snls(initial_data::zero(grid), op,
                                          NoiseStream(3, 0), spec, cfg, opts);
  REQUIRE(rec.psi.size() == rec.u.size());
  for (std::size_t i = 0; i < rec.u.size(); ++i)
    CHECK(max_diff(rec.u[i], rec.psi[i]) == 0.0);
}

TEST_CASE("solve_snls: decomposition u = v + Psi holds bitwise") {
  auto grid = SpectralGrid::make(1, 64, 8.0 * kPi);
  const auto spec = NonlinearitySpec::mass_critical(1);
  const MultiplierOperator op = MultiplierOperator::decay(grid, 0.15, 1.0);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_final = 0.2;
  cfg.snapshot_stride = 40;
  SolveOptions opts;
  opts.store_components = true;
  const GridField u0 = initial_data::gaussian_bump(grid, {4 * kPi}, 2.0, 0.4);
  const TrajectoryRecord rec =
      solve_snls(u0, op, NoiseStream(8, 1), spec, cfg, opts);
  REQUIRE_FALSE(rec.diverged);
  REQUIRE(rec.v.size() == rec.u.size());
  for (std::size_t i = 0; i < rec.u.size(); ++i) {
    const GridField sum = rec.v[i] + rec.psi[i];
    CHECK(max_diff(rec.u[i], sum) == 0.0);
  }
}

TEST_CASE("solve_truncated: full-band truncation matches solve_snls") {
  auto grid = SpectralGrid::make(1, 64, 8.0 * kPi);
  const auto spec = NonlinearitySpec::mass_critical(1);
  const MultiplierOperator op = MultiplierOperator::decay(grid, 0.15, 1.0);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_final = 0.2;
  cfg.snapshot_stride = 40;
  const GridField u0 = initial_data::gaussian_bump(grid, {4 * kPi}, 2.0, 0.4);

  const double nyquist = 2.0 * kPi / grid->domain_length() * 32.0;
  const TrajectoryRecord full =
      solve_snls(u0, op, NoiseStream(4, 2), spec, cfg);
  const TrajectoryRecord trunc =
      solve_truncated(u0, op, NoiseStream(4, 2), nyquist, spec, cfg);
  REQUIRE(full.u.size() == trunc.u.size());
  for (std::size_t i = 0; i < full.u.size(); ++i)
    CHECK(lebesgue_norm(full.u[i] - trunc.u[i], 2.0) <= 1e-10);
}

TEST_CASE("solve_truncated: energy-critical variant stays inside 3N band") {
  auto grid = SpectralGrid::make(3, 16, 4.0 * kPi);
  const auto spec = NonlinearitySpec::energy_critical(3);
  const MultiplierOperator op = MultiplierOperator::decay(grid, 0.05, 3.0);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_final = 0.05;
  cfg.snapshot_stride = 10;
  const GridField u0 =
      initial_data::gaussian_bump(grid, {2 * kPi, 2 * kPi, 2 * kPi}, 1.0, 0.3);
  const double N = 2.0 * kPi / grid->domain_length() * 2.0;  // mode index 2
  const TrajectoryRecord rec =
      solve_truncated(u0, op, NoiseStream(6, 0), N, spec, cfg);
  REQUIRE_FALSE(rec.diverged);
  CHECK(rec.max_tail_fraction <= 1e-10);
}

TEST_CASE("solve_truncated: coupled distance shrinks as N doubles") {
  auto grid = SpectralGrid::make(1, 64, 8.0 * kPi);
  const auto spec = NonlinearitySpec::mass_critical(1);
  const MultiplierOperator op = MultiplierOperator::decay(grid, 0.15, 1.0);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_final = 0.2;
  cfg.snapshot_stride = 40;
  const GridField u0 = initial_data::gaussian_bump(grid, {4 * kPi}, 2.0, 0.5);
  const TrajectoryRecord full =
      solve_snls(u0, op, NoiseStream(9, 0), spec, cfg);
  const double unit = 2.0 * kPi / grid->domain_length();
  double previous = std::numeric_limits<double>::infinity();
  for (double mode : {4.0, 8.0, 16.0}) {
    const TrajectoryRecord trunc =
        solve_truncated(u0, op, NoiseStream(9, 0), mode * unit, spec, cfg);
    double sup = 0.0;
    for (std::size_t i = 0; i < full.u.size(); ++i)
      sup = std::max(sup, lebesgue_norm(full.u[i] - trunc.u[i], 2.0));
    CHECK(sup < previous);
    previous = sup;
  }
}

TEST_CASE("divergence is flagged, never silent") {
  auto grid = SpectralGrid::make(1, 64, 8.0 * kPi);
  const auto spec = NonlinearitySpec::mass_critical(1);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_final = 0.1;
  cfg.snapshot_stride = 10;
  const GridField huge = constant_field(grid, Complex(1e80, 0.0));
  const TrajectoryRecord rec = solve_deterministic(huge, spec, cfg);
  CHECK(rec.diverged);
  CHECK(std::isfinite(rec.diverged_time));
}

TEST_CASE("blowup_monitor: zero solution, refinement stability, cap") {
  auto grid = SpectralGrid::make(1, 64, 8.0 * kPi);
  const auto spec = NonlinearitySpec::mass_critical(1);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_final = 0.2;
  cfg.snapshot_stride = 20;

  const TrajectoryRecord zero_rec =
      solve_deterministic(initial_data::zero(grid), spec, cfg);
  const BlowupMonitorReport zero_report = blowup_monitor(zero_rec);
  for (double v : zero_report.values) CHECK(v == 0.0);

  cfg.disable_nonlinearity = true;
  const GridField u0 = initial_data::gaussian_bump(grid, {4 * kPi}, 2.0, 0.7);
  const TrajectoryRecord a = solve_deterministic(u0, spec, cfg);
  SolverConfig cfg2 = cfg;
  cfg2.dt = 5e-4;
  cfg2.snapshot_stride = 40;
  const TrajectoryRecord b = solve_deterministic(u0, spec, cfg2);
  const double va = blowup_monitor(a).values.back();
  const double vb = blowup_monitor(b).values.back();
  CHECK(std::abs(va - vb) / vb < 1e-4);

  const BlowupMonitorReport capped = blowup_monitor(a, 0.5 * va);
  CHECK(capped.crossed);
  CHECK(capped.crossing_time > 0.0);
}
