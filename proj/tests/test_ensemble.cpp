#include <doctest.h>

#include <cmath>

#include "snls/ensemble.hpp"

using namespace snls;

namespace {

constexpr double kPi = 3.14159265358979323846264338328;

struct Fixture {
  GridPtr grid = SpectralGrid::make(1, 32, 8.0 * kPi);
  NonlinearitySpec spec = NonlinearitySpec::mass_critical(1);
  MultiplierOperator op = MultiplierOperator::decay(grid, 0.1, 1.0);
  GridField u0 = initial_data::gaussian_bump(grid, {4.0 * kPi}, 2.0, 0.4);

  ensemble::EnsembleConfig config(int n, std::uint64_t seed) const {
    ensemble::EnsembleConfig ec;
    ec.trajectories = n;
    ec.seed = seed;
    ec.spec = spec;
    ec.solver.dt = 1e-3;
    ec.solver.t_final = 0.2;
    ec.solver.snapshot_stride = 20;
    return ec;
  }
};

}  // namespace

TEST_CASE("run_ensemble: zero noise duplicates the deterministic run") {
  Fixture fx;
  ensemble::EnsembleConfig ec = fx.config(2, 1);
  const ensemble::EnsembleStats stats =
      ensemble::run_ensemble(ec, fx.u0, MultiplierOperator::zero(fx.grid));
  REQUIRE(stats.mass_rows.size() == 2);
  for (std::size_t t = 0; t < stats.times.size(); ++t) {
    CHECK(stats.mass_rows[0][t] == stats.mass_rows[1][t]);
    CHECK(stats.se_mass[t] == 0.0);
  }
  const TrajectoryRecord det = solve_deterministic(
      fx.u0, fx.spec, ec.solver, SolveOptions{.store_fields = false});
  for (std::size_t t = 0; t < stats.times.size(); ++t)
    CHECK(stats.mass_rows[0][t] ==
          doctest::Approx(det.mass_series[t]).epsilon(1e-12));
}

TEST_CASE("run_ensemble: identical (config, seed) is bit-identical") {
  Fixture fx;
  const ensemble::EnsembleStats a =
      ensemble::run_ensemble(fx.config(8, 42), fx.u0, fx.op);
  const ensemble::EnsembleStats b =
      ensemble::run_ensemble(fx.config(8, 42), fx.u0, fx.op);
  REQUIRE(a.times.size() == b.times.size());
  for (std::size_t i = 0; i < a.mass_rows.size(); ++i)
    for (std::size_t t = 0; t < a.times.size(); ++t)
      CHECK(a.mass_rows[i][t] == b.mass_rows[i][t]);
  for (std::size_t t = 0; t < a.times.size(); ++t) {
    CHECK(a.mean_mass[t] == b.mean_mass[t]);
    CHECK(a.se_mass[t] == b.se_mass[t]);
  }
}

TEST_CASE("run_ensemble: thread count never changes the bytes") {
  Fixture fx;
  ensemble::EnsembleConfig serial = fx.config(8, 11);
  ensemble::EnsembleConfig threaded = fx.config(8, 11);
  threaded.threads = 4;
  const ensemble::EnsembleStats a =
      ensemble::run_ensemble(serial, fx.u0, fx.op);
  const ensemble::EnsembleStats b =
      ensemble::run_ensemble(threaded, fx.u0, fx.op);
  for (std::size_t t = 0; t < a.times.size(); ++t) {
    CHECK(a.mean_mass[t] == b.mean_mass[t]);
    CHECK(a.se_mass[t] == b.se_mass[t]);
  }
}

TEST_CASE("run_ensemble: doubling n shrinks the standard error like sqrt(2)") {
  Fixture fx;
  const ensemble::EnsembleStats small =
      ensemble::run_ensemble(fx.config(256, 5), fx.u0, fx.op);
  const ensemble::EnsembleStats big =
      ensemble::run_ensemble(fx.config(512, 991), fx.u0, fx.op);
  const double ratio = small.se_mass.back() / big.se_mass.back();
  CHECK(ratio > 1.1);
  CHECK(ratio < 1.8);
}

TEST_CASE("run_ensemble: all-diverged ensembles raise an error") {
  Fixture fx;
  GridField huge(fx.grid);
  for (auto& z : huge.values) z = Complex(1e80, 0.0);
  CHECK_THROWS(ensemble::run_ensemble(fx.config(2, 1), huge, fx.op));
}

TEST_CASE("mass_balance_test: zero noise reduces to exact conservation") {
  Fixture fx;
  const ensemble::EnsembleStats stats =
      ensemble::run_ensemble(fx.config(2, 1), fx.u0,
                             MultiplierOperator::zero(fx.grid));
  const ensemble::BalanceReport report =
      ensemble::mass_balance_test(stats, 0.0, 0.0);
  CHECK(report.pass);
  CHECK(report.max_abs_deviation <= 1e-10 * stats.initial_mass);
}

TEST_CASE("mass_balance_test: noise-only Ito isometry within 4 SE") {
  Fixture fx;
  ensemble::EnsembleConfig ec = fx.config(512, 7);
  ec.solver.disable_nonlinearity = true;
  ec.solver.t_final = 0.5;
  ec.solver.snapshot_stride = 50;
  const ensemble::EnsembleStats stats =
      ensemble::run_ensemble(ec, initial_data::zero(fx.grid), fx.op);
  const double hs0 = hs_norm(fx.op, 0.0);
  const ensemble::BalanceReport report =
      ensemble::mass_balance_test(stats, hs0 * hs0, 0.0);
  CHECK(report.pass);
}

TEST_CASE("variance scales exactly like ||phi||^4 under amplitude doubling") {
  Fixture fx;
  ensemble::EnsembleConfig ec = fx.config(64, 3);
  ec.solver.disable_nonlinearity = true;
  const MultiplierOperator doubled = fx.op + fx.op;
  const ensemble::EnsembleStats base =
      ensemble::run_ensemble(ec, initial_data::zero(fx.grid), fx.op);
  const ensemble::EnsembleStats twice =
      ensemble::run_ensemble(ec, initial_data::zero(fx.grid), doubled);
  // Shared streams: Psi doubles pathwise, mass rows quadruple exactly.
  for (std::size_t i = 0; i < base.mass_rows.size(); ++i)
    for (std::size_t t = 1; t < base.times.size(); ++t)
      CHECK(twice.mass_rows[i][t] ==
            doctest::Approx(4.0 * base.mass_rows[i][t]).epsilon(1e-12));
  // Hence SE (and variance) scale by 4 (16).
  CHECK(twice.se_mass.back() ==
        doctest::Approx(4.0 * base.se_mass.back()).epsilon(1e-10));
}

TEST_CASE("energy_balance_test: small d=3 run is self-consistent") {
  auto grid = SpectralGrid::make(3, 8, 4.0 * kPi);
  const auto spec = NonlinearitySpec::energy_critical(3);
  const MultiplierOperator op = MultiplierOperator::decay(grid, 0.05, 3.0);
  const GridField u0 = initial_data::gaussian_bump(
      grid, {2.0 * kPi, 2.0 * kPi, 2.0 * kPi}, 1.2, 0.2);

  ensemble::EnsembleConfig ec;
  ec.trajectories = 96;
  ec.seed = 21;
  ec.spec = spec;
  ec.solver.dt = 1e-3;
  ec.solver.t_final = 0.05;
  ec.solver.snapshot_stride = 10;
  ec.solver.dealias = false;
  const ensemble::EnsembleStats stats = ensemble::run_ensemble(ec, u0, op);

  ensemble::EnsembleConfig half = ec;
  half.solver.dt *= 0.5;
  half.solver.snapshot_stride *= 2;
  const ensemble::EnsembleStats stats_half =
      ensemble::run_ensemble(half, u0, op);

  const double hs1h = hs_norm(op, 1.0, true);
  const auto full_report =
      ensemble::energy_balance_test(stats, hs1h * hs1h, 0.0);
  const auto half_report =
      ensemble::energy_balance_test(stats_half, hs1h * hs1h, 0.0);
  const double budget =
      2.0 * std::abs(full_report.statistic_mean - half_report.statistic_mean);
  const auto report = ensemble::energy_balance_test(stats, hs1h * hs1h, budget);
  CHECK(report.pass);

  // Zero noise: the identity reduces to deterministic energy conservation.
  const ensemble::EnsembleStats det = ensemble::run_ensemble(
      ec, u0, MultiplierOperator::zero(grid));
  const auto det_report = ensemble::energy_balance_test(det, 0.0, 1e-8);
  CHECK(det_report.pass);
}

TEST_CASE("stopping rule truncates trajectories and flags them") {
  Fixture fx;
  ensemble::EnsembleConfig ec = fx.config(4, 2);
  ec.solver.t_final = 0.5;
  ec.stopping.r_max = 1e-6;  // certain to trip immediately
  const ensemble::EnsembleStats stats =
      ensemble::run_ensemble(ec, fx.u0, fx.op);
  CHECK(stats.stopped_count == 4);

  ensemble::EnsembleConfig open = fx.config(4, 2);
  open.solver.t_final = 0.5;
  const ensemble::EnsembleStats free_run =
      ensemble::run_ensemble(open, fx.u0, fx.op);
  CHECK(free_run.stopped_count == 0);
  CHECK(free_run.times.size() > stats.times.size());
}

TEST_CASE("sup_moment_estimate: deterministic case and noise lower bound") {
  Fixture fx;
  const ensemble::EnsembleStats det = ensemble::run_ensemble(
      fx.config(2, 1), fx.u0, MultiplierOperator::zero(fx.grid));
  const ensemble::SupMomentEstimate m =
      ensemble::sup_moment_estimate(det, 2.0);
  CHECK(m.estimate == doctest::Approx(mass(fx.u0)).epsilon(1e-9));

  ensemble::EnsembleConfig ec = fx.config(256, 17);
  ec.solver.disable_nonlinearity = true;
  ec.solver.t_final = 1.0;
  ec.solver.snapshot_stride = 100;
  const ensemble::EnsembleStats noise =
      ensemble::run_ensemble(ec, initial_data::zero(fx.grid), fx.op);
  const ensemble::SupMomentEstimate sup =
      ensemble::sup_moment_estimate(noise, 2.0);
  const double hs0 = hs_norm(fx.op, 0.0);
  CHECK(sup.estimate + 4.0 * sup.standard_error >= 2.0 * hs0 * hs0);
  CHECK(sup.ci_low <= sup.estimate);
  CHECK(sup.ci_high >= sup.estimate);

  const ensemble::EnsembleStats noise_big = [&] {
    ensemble::EnsembleConfig big = ec;
    big.trajectories = 512;
    return ensemble::run_ensemble(big, initial_data::zero(fx.grid), fx.op);
  }();
  const ensemble::SupMomentEstimate sup_big =
      ensemble::sup_moment_estimate(noise_big, 2.0);
  CHECK(sup_big.ci_high - sup_big.ci_low < sup.ci_high - sup.ci_low);
}

TEST_CASE("truncation coupling: largest N reproduces the full run") {
  Fixture fx;
  SolverConfig solver;
  solver.dt = 1e-3;
  solver.t_final = 0.2;
  solver.snapshot_stride = 20;
  const double unit = 2.0 * kPi / fx.grid->domain_length();
  const std::vector<double> N_values{4.0 * unit, 8.0 * unit, 16.0 * unit};
  const ensemble::TruncationResult result =
      ensemble::truncation_convergence_test(fx.u0, fx.op, fx.spec, solver, 1,
                                            3, N_values);
  REQUIRE(result.sup_distance.size() == 3);
  for (const auto& row : result.sup_distance) {
    REQUIRE(row.size() == 3);
    CHECK(row[0] > row[1]);
    CHECK(row[1] > row[2]);
    CHECK(row[2] <= 1e-10);
  }
}
