#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>

#include "snls/noise.hpp"
#include "snls/norms.hpp"
#include "snls/propagator.hpp"

namespace snls {

/// Defocusing power nonlinearity |u|^{p-1} u. k = 0 is the mass-critical
/// exponent p = 1 + 4/d, k = 1 the energy-critical exponent p = 1 + 4/(d-2)
/// (3 <= d <= 6); explicit p > 1 is allowed for off-critical runs.
struct NonlinearitySpec {
  int dimension = 1;
  int criticality = 0;  // 0, 1, or -1 for explicit p
  double p = 5.0;

  static NonlinearitySpec mass_critical(int dimension);
  static NonlinearitySpec energy_critical(int dimension);
  static NonlinearitySpec explicit_power(int dimension, double p);

  /// Measuring pair of the local theory: the diagonal mass-critical pair for
  /// k = 0 (and explicit p), (q_d, r_d) for k = 1.
  StrichartzPair contraction_pair() const;

  /// True when solution-size norms carry the W^{1,r} gradient part (k = 1).
  bool gradient_norms() const { return criticality == 1; }
};

enum class SplitScheme { strang };

struct SolverConfig {
  double dt = 1e-3;
  double t_final = 1.0;
  SplitScheme scheme = SplitScheme::strang;
  int snapshot_stride = 1;
  bool dealias = true;
  std::optional<double> truncation_N;  // Appendix-A solver band limit
  bool disable_nonlinearity = false;   // test hook: u = Psi exactly
  double divergence_mass_factor = 1e6;
};

/// Pointwise |u|^{p-1} u on the physical grid.
GridField nonlinearity_eval(const GridField& field,
                            const NonlinearitySpec& spec);

/// 2/3-rule truncation: zeroes per-axis modes with |m| > M/3.
GridField dealias_two_thirds(const GridField& field);

/// Solver-consistent nonlinearity evaluation (optional 2/3 input truncation).
GridField nonlinearity_dealiased(const GridField& field,
                                 const NonlinearitySpec& spec, bool dealias);

/// M(u) = int |u|^2 dx by quadrature.
double mass(const GridField& field);

/// E(u) = 1/2 int |grad u|^2 + (d-2)/(2d) int |u|^{2d/(d-2)}, d >= 3.
double energy(const GridField& field);

/// Forcing seen by the v-equation, sampled on the solver's half-step lattice
/// t0 + j * dt/2. Queried with strictly increasing j.
class Forcing {
 public:
  virtual ~Forcing() = default;
  virtual bool is_zero() const { return false; }
  virtual const GridField& at(std::int64_t half_step) = 0;
};

class ZeroForcing : public Forcing {
 public:
  explicit ZeroForcing(GridPtr grid) : zero_(std::move(grid)) {}
  bool is_zero() const override { return true; }
  const GridField& at(std::int64_t) override { return zero_; }

 private:
  GridField zero_;
};

/// Deterministic forcing stored as dense half-step samples, with an overall
/// amplitude factor and an optional start offset into the stored path.
class PathForcing : public Forcing {
 public:
  PathForcing(std::vector<GridField> samples, double t0, double half_dt,
              double amplitude = 1.0, std::int64_t offset = 0);

  bool is_zero() const override { return amplitude_ == 0.0; }
  const GridField& at(std::int64_t half_step) override;

  double amplitude() const { return amplitude_; }
  double t0() const { return t0_; }
  double half_dt() const { return half_dt_; }
  std::size_t sample_count() const { return samples_->size(); }
  const GridField& raw_sample(std::size_t i) const { return (*samples_)[i]; }

  /// Forcing view starting at half-step `offset` of this path.
  PathForcing window(std::int64_t offset, double amplitude) const;

  /// Snapshot view (times and scaled fields) over half-steps
  /// [first, last] with the given stride, for norm computations.
  SpaceTimeSample sample_range(std::int64_t first, std::int64_t last,
                               std::int64_t stride,
                               const StrichartzPair& pair) const;

 private:
  std::shared_ptr<const std::vector<GridField>> samples_;
  double t0_;
  double half_dt_;
  double amplitude_;
  std::int64_t offset_;
  GridField scratch_;
};

/// Exact-in-law stochastic convolution advanced on the half-step lattice.
class ConvolutionForcing : public Forcing {
 public:
  ConvolutionForcing(GridPtr grid, const MultiplierOperator& op,
                     NoiseStream stream, double half_dt);

  bool is_zero() const override { return zero_operator_; }
  const GridField& at(std::int64_t half_step) override;

  const ConvolutionState& state() const { return state_; }

 private:
  ConvolutionState state_;
  double half_dt_;
  bool zero_operator_;
  std::int64_t current_ = 0;
  GridField field_;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<GridField> u;
  std::vector<GridField> v;    // filled by solve_snls / solve_truncated
  std::vector<GridField> psi;  // filled by solve_snls / solve_truncated
  std::vector<double> mass_series;
  std::vector<double> energy_series;      // empty when dimension < 3
  std::vector<double> monitor_integral;   // running int ||u||^q dt
  double monitor_q = 0.0;
  bool diverged = false;
  double diverged_time = std::numeric_limits<double>::quiet_NaN();
  bool stopped = false;  // truncated by a stopping rule, not by instability
  double stopped_time = std::numeric_limits<double>::quiet_NaN();
  double max_tail_fraction = 0.0;  // spectral mass above 3N (truncated runs)

  /// Blowup-alternative monitor value on [0, t_i].
  double monitor_value(std::size_t i) const;
};

/// Per-snapshot hook for ensemble reductions that do not store fields.
/// Returning false truncates the trajectory there (stopping rule).
class SnapshotSink {
 public:
  virtual ~SnapshotSink() = default;
  virtual bool on_snapshot(int index, double t, const GridField& u,
                           const GridField* v, const GridField* psi) = 0;
};

struct SolveOptions {
  bool store_fields = true;
  bool store_components = false;
  double t0 = 0.0;
  SnapshotSink* sink = nullptr;
};

/// One Strang step: half nonlinear phase rotation, exact linear step, half
/// nonlinear phase rotation. Mass-exact by construction.
GridField step_deterministic(const GridField& field,
                             const NonlinearitySpec& spec, double dt,
                             bool dealias = true);

/// Strang-split deterministic NLS: i u_t + Lap u = |u|^{p-1} u.
TrajectoryRecord solve_deterministic(const GridField& u0,
                                     const NonlinearitySpec& spec,
                                     const SolverConfig& config,
                                     const SolveOptions& options = {});

/// Perturbed equation i v_t + Lap v = N(v + f) for a given forcing source.
/// With a zero forcing this takes the same code path as solve_deterministic.
TrajectoryRecord solve_perturbed_v(const GridField& u0, Forcing& forcing,
                                   const NonlinearitySpec& spec,
                                   const SolverConfig& config,
                                   const SolveOptions& options = {});

/// SNLS via u = v + Psi: co-evolves the exact-in-law convolution and the
/// v-equation with f = Psi. Snapshots carry u, v, and Psi.
TrajectoryRecord solve_snls(const GridField& u0, const MultiplierOperator& op,
                            const NoiseStream& stream,
                            const NonlinearitySpec& spec,
                            const SolverConfig& config,
                            const SolveOptions& options = {});

/// Truncated SNLS of the appendix: data P_N u0 and operator P_N phi; the
/// energy-critical variant also projects the nonlinearity with P_N.
TrajectoryRecord solve_truncated(const GridField& u0,
                                 const MultiplierOperator& op,
                                 const NoiseStream& stream, double N,
                                 const NonlinearitySpec& spec,
                                 const SolverConfig& config,
                                 const SolveOptions& options = {});

struct BlowupMonitorReport {
  std::vector<double> times;
  std::vector<double> values;  // running criticality norm on [0, t]
  double cap = std::numeric_limits<double>::infinity();
  bool crossed = false;
  double crossing_time = std::numeric_limits<double>::quiet_NaN();
};

BlowupMonitorReport blowup_monitor(
    const TrajectoryRecord& record,
    double cap = std::numeric_limits<double>::infinity());

namespace initial_data {

GridField zero(GridPtr grid);
GridField plane_wave(GridPtr grid, const std::vector<int>& mode,
                     Complex amplitude);
GridField gaussian_bump(GridPtr grid, const std::vector<double>& center,
                        double width, Complex amplitude);
GridField random_sobolev(GridPtr grid, double s, double amplitude,
                         std::uint64_t seed);

}  // namespace initial_data

}  // namespace snls
