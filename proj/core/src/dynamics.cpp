#include "snls/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace snls {

NonlinearitySpec NonlinearitySpec::mass_critical(int dimension) {
  if (dimension < 1)
    throw std::invalid_argument("nonlinearity: dimension must be >= 1");
  NonlinearitySpec s;
  s.dimension = dimension;
  s.criticality = 0;
  s.p = 1.0 + 4.0 / dimension;
  return s;
}

NonlinearitySpec NonlinearitySpec::energy_critical(int dimension) {
  if (dimension < 3 || dimension > 6)
    throw std::invalid_argument("energy-critical requires 3 <= d <= 6");
  NonlinearitySpec s;
  s.dimension = dimension;
  s.criticality = 1;
  s.p = 1.0 + 4.0 / (dimension - 2);
  return s;
}

NonlinearitySpec NonlinearitySpec::explicit_power(int dimension, double p) {
  if (p <= 1.0) throw std::invalid_argument("nonlinearity: requires p > 1");
  NonlinearitySpec s;
  s.dimension = dimension;
  s.criticality = -1;
  s.p = p;
  return s;
}

StrichartzPair NonlinearitySpec::contraction_pair() const {
  if (criticality == 1) return energy_pair(dimension);
  return diagonal_pair(dimension);
}

namespace {

// |w|^{p-1} from |w|^2; non-integer exponents via pow with 0 -> 0.
inline double amplitude_power(double norm_sq, double p_minus_1) {
  if (p_minus_1 == 4.0) return norm_sq * norm_sq;
  if (p_minus_1 == 2.0) return norm_sq;
  if (norm_sq == 0.0) return 0.0;
  return std::pow(norm_sq, 0.5 * p_minus_1);
}

}  // namespace

GridField nonlinearity_eval(const GridField& field,
                            const NonlinearitySpec& spec) {
  GridField out = field;
  const double pm1 = spec.p - 1.0;
  for (Complex& z : out.values) z *= amplitude_power(std::norm(z), pm1);
  return out;
}

GridField dealias_two_thirds(const GridField& field) {
  const SpectralGrid& grid = *field.grid;
  std::vector<Complex> hat = spectrum(field);
  const int cut = grid.modes_per_axis() / 3;
  for (std::size_t i = 0; i < hat.size(); ++i) {
    std::size_t rem = i;
    for (int a = 0; a < grid.dimension(); ++a) {
      const int idx = static_cast<int>(rem % grid.modes_per_axis());
      rem /= grid.modes_per_axis();
      const int m = grid.axis_mode(idx);
      if (m > cut || m < -cut) {
        hat[i] = 0.0;
        break;
      }
    }
  }
  return from_spectrum(field.grid, hat);
}

GridField nonlinearity_dealiased(const GridField& field,
                                 const NonlinearitySpec& spec, bool dealias) {
  return nonlinearity_eval(dealias ? dealias_two_thirds(field) : field, spec);
}

double mass(const GridField& field) {
  double acc = 0.0;
  for (const Complex& z : field.values) acc += std::norm(z);
  return acc * field.grid->cell_volume();
}

double energy(const GridField& field) {
  const SpectralGrid& grid = *field.grid;
  const int d = grid.dimension();
  if (d < 3)
    throw std::invalid_argument("energy: functional requires d >= 3");
  const std::vector<Complex> hat = spectrum(field);
  const double scale = fft::coefficient_scale(grid);
  double grad = 0.0;
  for (std::size_t i = 0; i < hat.size(); ++i)
    grad += grid.xi_squared(i) * std::norm(hat[i]);
  grad *= scale * scale;

  const double exponent = 2.0 * d / (d - 2.0);
  double pot = 0.0;
  for (const Complex& z : field.values)
    pot += std::pow(std::norm(z), 0.5 * exponent);
  pot *= grid.cell_volume();
  return 0.5 * grad + (d - 2.0) / (2.0 * d) * pot;
}

PathForcing::PathForcing(std::vector<GridField> samples, double t0,
                         double half_dt, double amplitude, std::int64_t offset)
    : samples_(std::make_shared<const std::vector<GridField>>(
          std::move(samples))),
      t0_(t0),
      half_dt_(half_dt),
      amplitude_(amplitude),
      offset_(offset) {
  if (samples_->empty())
    throw std::invalid_argument("path forcing: needs at least one sample");
  scratch_ = GridField(samples_->front().grid);
}

const GridField& PathForcing::at(std::int64_t half_step) {
  const std::int64_t index = half_step + offset_;
  if (index < 0 || static_cast<std::size_t>(index) >= samples_->size())
    throw std::out_of_range("path forcing: sample index out of range");
  const GridField& raw = (*samples_)[static_cast<std::size_t>(index)];
  if (amplitude_ == 1.0) return raw;
  scratch_.values = raw.values;
  for (Complex& z : scratch_.values) z *= amplitude_;
  return scratch_;
}

PathForcing PathForcing::window(std::int64_t offset, double amplitude) const {
  PathForcing out = *this;
  out.offset_ = offset_ + offset;
  out.t0_ = t0_ + offset * half_dt_;
  out.amplitude_ = amplitude;
  return out;
}

SpaceTimeSample PathForcing::sample_range(std::int64_t first,
                                          std::int64_t last,
                                          std::int64_t stride,
                                          const StrichartzPair& pair) const {
  SpaceTimeSample out;
  out.pair = pair;
  for (std::int64_t j = first; j <= last; j += stride) {
    const std::int64_t index = j + offset_;
    if (index < 0 || static_cast<std::size_t>(index) >= samples_->size())
      throw std::out_of_range("path forcing: sample range out of range");
    out.times.push_back(t0_ + j * half_dt_);
    GridField f = (*samples_)[static_cast<std::size_t>(index)];
    if (amplitude_ != 1.0)
      for (Complex& z : f.values) z *= amplitude_;
    out.snapshots.push_back(std::move(f));
  }
  return out;
}

ConvolutionForcing::ConvolutionForcing(GridPtr grid,
                                       const MultiplierOperator& op,
                                       NoiseStream stream, double half_dt)
    : state_(grid, op, stream),
      half_dt_(half_dt),
      zero_operator_(op.is_zero()),
      field_(std::move(grid)) {}

const GridField& ConvolutionForcing::at(std::int64_t half_step) {
  if (zero_operator_) return field_;
  if (half_step < current_)
    throw std::logic_error("convolution forcing: queries must be increasing");
  if (half_step > current_) {
    while (current_ < half_step) {
      state_.advance(half_dt_);
      ++current_;
    }
    field_ = state_.field();
  }
  return field_;
}

double TrajectoryRecord::monitor_value(std::size_t i) const {
  if (monitor_q <= 0.0 || i >= monitor_integral.size()) return 0.0;
  return std::pow(monitor_integral[i], 1.0 / monitor_q);
}

namespace {

// Shared Strang-splitting loop for all solver entry points.
class StrangRunner {
 public:
  StrangRunner(const GridField& u0, Forcing& forcing,
               const NonlinearitySpec& spec, const SolverConfig& cfg,
               const SolveOptions& opt, bool combine_psi)
      : grid_(u0.grid),
        forcing_(forcing),
        spec_(spec),
        cfg_(cfg),
        opt_(opt),
        combine_psi_(combine_psi) {
    if (!(cfg_.dt > 0.0) || !(cfg_.t_final > 0.0) || cfg_.dt > cfg_.t_final)
      throw std::invalid_argument("solver: need 0 < dt <= t_final");
    if (cfg_.snapshot_stride < 1)
      throw std::invalid_argument("solver: snapshot stride must be >= 1");
    steps_ = static_cast<std::int64_t>(std::llround(cfg_.t_final / cfg_.dt));
    if (steps_ < 1 || std::abs(steps_ * cfg_.dt - cfg_.t_final) >
                          1e-9 * std::max(1.0, cfg_.t_final))
      throw std::invalid_argument("solver: t_final must be a multiple of dt");

    project_nl_ = cfg_.truncation_N.has_value() && spec_.criticality == 1;
    if (cfg_.truncation_N) {
      trunc_mask_.resize(grid_->total_points());
      for (std::size_t i = 0; i < trunc_mask_.size(); ++i)
        trunc_mask_[i] = projection_cutoff(std::sqrt(grid_->xi_squared(i)) /
                                           *cfg_.truncation_N);
    }
    if (cfg_.dealias) {
      dealias_keep_.resize(grid_->total_points(), true);
      const int cut = grid_->modes_per_axis() / 3;
      for (std::size_t i = 0; i < dealias_keep_.size(); ++i) {
        std::size_t rem = i;
        for (int a = 0; a < grid_->dimension(); ++a) {
          const int idx = static_cast<int>(rem % grid_->modes_per_axis());
          rem /= grid_->modes_per_axis();
          const int m = grid_->axis_mode(idx);
          if (m > cut || m < -cut) {
            dealias_keep_[i] = false;
            break;
          }
        }
      }
    }
    linear_phase_.resize(grid_->total_points());
    for (std::size_t i = 0; i < linear_phase_.size(); ++i)
      linear_phase_[i] = std::polar(1.0, -cfg_.dt * grid_->xi_squared(i));

    v_ = sanitize(u0);
    initial_mass_ = mass(v_);
    monitor_pair_ = spec_.contraction_pair();
    record_.monitor_q = monitor_pair_.q.value();
  }

  TrajectoryRecord run() {
    const GridField* psi0 = nullptr;
    GridField f_prev(grid_);
    const bool need_forcing = !forcing_.is_zero();
    if (need_forcing || combine_psi_) {
      f_prev = forcing_.at(0);
      psi0 = &f_prev;
    }
    take_snapshot(0, opt_.t0, psi0);

    GridField f_half(grid_), f_next(grid_);
    for (std::int64_t i = 0; i < steps_; ++i) {
      const double t = opt_.t0 + i * cfg_.dt;
      if (need_forcing) f_half = forcing_.at(2 * i + 1);
      nonlinear_substep(f_prev, f_half, need_forcing);
      linear_step();
      if (need_forcing || combine_psi_) f_next = forcing_.at(2 * i + 2);
      nonlinear_substep(f_half, f_next, need_forcing);
      f_prev = f_next;

      if (!v_.finite()) {
        record_.diverged = true;
        record_.diverged_time = t + cfg_.dt;
        break;
      }
      if ((i + 1) % cfg_.snapshot_stride == 0 || i + 1 == steps_) {
        const GridField* psi =
            (need_forcing || combine_psi_) ? &f_prev : nullptr;
        if (!take_snapshot(static_cast<int>(record_.times.size()),
                           t + cfg_.dt, psi))
          break;
      }
    }
    return std::move(record_);
  }

 private:
  GridField sanitize(const GridField& u0) const {
    std::vector<Complex> hat = spectrum(u0);
    for (std::size_t i = 0; i < hat.size(); ++i) {
      if (grid_->is_nyquist(i)) hat[i] = 0.0;
      if (cfg_.truncation_N) hat[i] *= trunc_mask_[i];
    }
    return from_spectrum(u0.grid, hat);
  }

  GridField dealias(const GridField& w) const {
    std::vector<Complex> hat = spectrum(w);
    for (std::size_t i = 0; i < hat.size(); ++i)
      if (!dealias_keep_[i]) hat[i] = 0.0;
    return from_spectrum(w.grid, hat);
  }

  GridField eval_nonlinearity(const GridField& w) const {
    GridField base = cfg_.dealias ? dealias(w) : w;
    const double pm1 = spec_.p - 1.0;
    for (Complex& z : base.values) z *= amplitude_power(std::norm(z), pm1);
    if (project_nl_) {
      std::vector<Complex> hat = spectrum(base);
      for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= trunc_mask_[i];
      base = from_spectrum(base.grid, hat);
    }
    return base;
  }

  void nonlinear_substep(const GridField& f_left, const GridField& f_right,
                         bool need_forcing) {
    if (cfg_.disable_nonlinearity) return;
    const double h = 0.5 * cfg_.dt;
    if (!need_forcing && !project_nl_) {
      // Exact phase rotation: |v| is pointwise invariant, so the substep is
      // mass-exact. The phase modulus may be dealiased; the rotation is not.
      const GridField source = cfg_.dealias ? dealias(v_) : v_;
      const double pm1 = spec_.p - 1.0;
      for (std::size_t i = 0; i < v_.values.size(); ++i) {
        const double theta =
            h * amplitude_power(std::norm(source.values[i]), pm1);
        v_.values[i] *= std::polar(1.0, -theta);
      }
      return;
    }
    // Heun's rule on i v_t = N(v + f); f sampled at substep endpoints.
    const Complex minus_i(0.0, -1.0);
    GridField k1 = eval_nonlinearity(v_ + f_left);
    for (Complex& z : k1.values) z *= minus_i;
    GridField vmid = v_;
    for (std::size_t i = 0; i < vmid.values.size(); ++i)
      vmid.values[i] += h * k1.values[i];
    GridField k2 = eval_nonlinearity(vmid + f_right);
    for (Complex& z : k2.values) z *= minus_i;
    for (std::size_t i = 0; i < v_.values.size(); ++i)
      v_.values[i] += 0.5 * h * (k1.values[i] + k2.values[i]);
  }

  void linear_step() {
    std::vector<Complex> hat = spectrum(v_);
    for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= linear_phase_[i];
    v_ = from_spectrum(v_.grid, hat);
  }

  // Returns false when the trajectory is flagged as diverged.
  bool take_snapshot(int index, double t, const GridField* psi) {
    GridField u = combine_psi_ && psi ? v_ + *psi : v_;
    const double m = mass(u);
    if (!std::isfinite(m) ||
        m > cfg_.divergence_mass_factor * (initial_mass_ + 1.0)) {
      record_.diverged = true;
      record_.diverged_time = t;
      return false;
    }
    record_.times.push_back(t);
    record_.mass_series.push_back(m);
    if (grid_->dimension() >= 3) record_.energy_series.push_back(energy(u));

    const double r = monitor_pair_.r.value();
    const double g = spec_.gradient_norms() ? w1r_norm(u, r)
                                            : lebesgue_norm(u, r);
    const double gq = std::pow(g, record_.monitor_q);
    if (record_.times.size() == 1) {
      record_.monitor_integral.push_back(0.0);
    } else {
      const std::size_t k = record_.times.size() - 1;
      const double dt_span = record_.times[k] - record_.times[k - 1];
      record_.monitor_integral.push_back(record_.monitor_integral[k - 1] +
                                         0.5 * (gq + last_gq_) * dt_span);
    }
    last_gq_ = gq;

    if (cfg_.truncation_N && spec_.criticality == 1) {
      const std::vector<Complex> hat = spectrum(u);
      double total = 0.0, tail = 0.0;
      const double band = 3.0 * *cfg_.truncation_N;
      for (std::size_t i = 0; i < hat.size(); ++i) {
        const double w = std::norm(hat[i]);
        total += w;
        if (std::sqrt(grid_->xi_squared(i)) > band) tail += w;
      }
      if (total > 0.0)
        record_.max_tail_fraction =
            std::max(record_.max_tail_fraction, tail / total);
    }

    if (opt_.store_fields) record_.u.push_back(u);
    if (opt_.store_components && combine_psi_ && psi) {
      record_.v.push_back(v_);
      record_.psi.push_back(*psi);
    }
    if (opt_.sink &&
        !opt_.sink->on_snapshot(index, t, u, combine_psi_ ? &v_ : nullptr,
                                psi)) {
      record_.stopped = true;
      record_.stopped_time = t;
      return false;
    }
    return true;
  }

  GridPtr grid_;
  Forcing& forcing_;
  NonlinearitySpec spec_;
  SolverConfig cfg_;
  SolveOptions opt_;
  bool combine_psi_;
  std::int64_t steps_ = 0;
  bool project_nl_ = false;
  std::vector<double> trunc_mask_;
  std::vector<bool> dealias_keep_;
  std::vector<Complex> linear_phase_;
  GridField v_;
  double initial_mass_ = 0.0;
  double last_gq_ = 0.0;
  StrichartzPair monitor_pair_;
  TrajectoryRecord record_;
};

}  // namespace

TrajectoryRecord solve_deterministic(const GridField& u0,
                                     const NonlinearitySpec& spec,
                                     const SolverConfig& config,
                                     const SolveOptions& options) {
  ZeroForcing zero(u0.grid);
  return StrangRunner(u0, zero, spec, config, options, false).run();
}

TrajectoryRecord solve_perturbed_v(const GridField& u0, Forcing& forcing,
                                   const NonlinearitySpec& spec,
                                   const SolverConfig& config,
                                   const SolveOptions& options) {
  return StrangRunner(u0, forcing, spec, config, options, false).run();
}

TrajectoryRecord solve_snls(const GridField& u0, const MultiplierOperator& op,
                            const NoiseStream& stream,
                            const NonlinearitySpec& spec,
                            const SolverConfig& config,
                            const SolveOptions& options) {
  ConvolutionForcing psi(u0.grid, op, stream, 0.5 * config.dt);
  return StrangRunner(u0, psi, spec, config, options, true).run();
}

TrajectoryRecord solve_truncated(const GridField& u0,
                                 const MultiplierOperator& op,
                                 const NoiseStream& stream, double N,
                                 const NonlinearitySpec& spec,
                                 const SolverConfig& config,
                                 const SolveOptions& options) {
  if (!(N > 0.0))
    throw std::invalid_argument("solve_truncated: N must be positive");
  SolverConfig cfg = config;
  cfg.truncation_N = N;
  const MultiplierOperator op_N = op.truncated(N);
  ConvolutionForcing psi(u0.grid, op_N, stream, 0.5 * cfg.dt);
  return StrangRunner(u0, psi, spec, cfg, options, true).run();
}

GridField step_deterministic(const GridField& field,
                             const NonlinearitySpec& spec, double dt,
                             bool dealias) {
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.t_final = dt;
  cfg.dealias = dealias;
  cfg.snapshot_stride = 1;
  TrajectoryRecord rec = solve_deterministic(field, spec, cfg);
  if (rec.diverged || rec.u.size() < 2)
    throw std::runtime_error("step_deterministic: step diverged");
  return rec.u.back();
}

BlowupMonitorReport blowup_monitor(const TrajectoryRecord& record, double cap) {
  BlowupMonitorReport report;
  report.cap = cap;
  report.times = record.times;
  report.values.resize(record.monitor_integral.size());
  for (std::size_t i = 0; i < report.values.size(); ++i) {
    report.values[i] = record.monitor_value(i);
    if (!report.crossed && report.values[i] > cap) {
      report.crossed = true;
      report.crossing_time = record.times[i];
    }
  }
  return report;
}

namespace initial_data {

GridField zero(GridPtr grid) { return GridField(std::move(grid)); }

GridField plane_wave(GridPtr grid, const std::vector<int>& mode,
                     Complex amplitude) {
  if (static_cast<int>(mode.size()) != grid->dimension())
    throw std::invalid_argument("plane_wave: mode size must match dimension");
  GridField out(grid);
  const double two_pi_over_l =
      6.283185307179586476925286766559 / grid->domain_length();
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const auto x = grid->coordinates(i);
    double phase = 0.0;
    for (int a = 0; a < grid->dimension(); ++a)
      phase += two_pi_over_l * mode[a] * x[a];
    out.values[i] = amplitude * std::polar(1.0, phase);
  }
  return out;
}

GridField gaussian_bump(GridPtr grid, const std::vector<double>& center,
                        double width, Complex amplitude) {
  if (static_cast<int>(center.size()) != grid->dimension())
    throw std::invalid_argument("gaussian_bump: center size must match d");
  if (!(width > 0.0))
    throw std::invalid_argument("gaussian_bump: width must be positive");
  GridField out(grid);
  const double L = grid->domain_length();
  const int d = grid->dimension();
  // Periodized profile: summing neighbour images keeps the function smooth
  // across the torus seam (a minimum-image Gaussian has a kink there).
  const double inv_two_w_sq = 1.0 / (2.0 * width * width);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const auto x = grid->coordinates(i);
    double value = 0.0;
    std::array<int, 4> image{0, 0, 0, 0};
    const int images = 3;
    int count = 1;
    for (int a = 0; a < d; ++a) count *= images;
    for (int k = 0; k < count; ++k) {
      int rem = k;
      double dist_sq = 0.0;
      for (int a = 0; a < d; ++a) {
        image[a] = rem % images - 1;
        rem /= images;
        const double dx = x[a] - center[a] + image[a] * L;
        dist_sq += dx * dx;
      }
      value += std::exp(-dist_sq * inv_two_w_sq);
    }
    out.values[i] = amplitude * value;
  }
  return out;
}

GridField random_sobolev(GridPtr grid, double s, double amplitude,
                         std::uint64_t seed) {
  // Coefficient decay a = s + d/2 + 1/2 keeps the draw in H^s on the
  // continuum scaling; one normal pair per mode, keyed like noise draws.
  const double a = s + 0.5 * grid->dimension() + 0.5;
  const double inv_scale = 1.0 / fft::coefficient_scale(*grid);
  std::vector<Complex> hat(grid->total_points());
  constexpr std::uint64_t kDataStream = 0x5EEDDA7Au;
  for (std::size_t m = 0; m < hat.size(); ++m) {
    if (grid->is_nyquist(m)) continue;
    const auto [g1, g2] = normal_pair(seed, kDataStream, 0, m);
    const double decay = std::pow(1.0 + grid->xi_squared(m), -0.5 * a);
    hat[m] = amplitude * decay * Complex(g1, g2) * (inv_scale / std::sqrt(2.0));
  }
  return from_spectrum(std::move(grid), hat);
}

}  // namespace initial_data

}  // namespace snls
