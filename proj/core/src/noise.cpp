#include "snls/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace snls {

MultiplierOperator::MultiplierOperator(GridPtr grid,
                                       std::vector<double> weights)
    : grid_(std::move(grid)), weights_(std::move(weights)) {
  if (weights_.size() != grid_->total_points())
    throw std::invalid_argument("operator: weight count does not match grid");
  for (double w : weights_)
    if (!(w >= 0.0))
      throw std::invalid_argument("operator: weights must be nonnegative");
  for (std::size_t i = 0; i < weights_.size(); ++i)
    if (grid_->is_nyquist(i)) weights_[i] = 0.0;
}

MultiplierOperator MultiplierOperator::decay(GridPtr grid, double amplitude,
                                             double decay) {
  std::vector<double> w(grid->total_points());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = amplitude * std::pow(1.0 + grid->xi_squared(i), -0.5 * decay);
  return MultiplierOperator(std::move(grid), std::move(w));
}

MultiplierOperator MultiplierOperator::zero(GridPtr grid) {
  std::vector<double> w(grid->total_points(), 0.0);
  return MultiplierOperator(std::move(grid), std::move(w));
}

bool MultiplierOperator::is_zero() const {
  for (double w : weights_)
    if (w != 0.0) return false;
  return true;
}

MultiplierOperator MultiplierOperator::truncated(double N) const {
  std::vector<double> w = weights_;
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] *= projection_cutoff(std::sqrt(grid_->xi_squared(i)) / N);
  return MultiplierOperator(grid_, std::move(w));
}

MultiplierOperator operator+(const MultiplierOperator& a,
                             const MultiplierOperator& b) {
  std::vector<double> w = a.weights_;
  for (std::size_t i = 0; i < w.size(); ++i) w[i] += b.weights_[i];
  return MultiplierOperator(a.grid_, std::move(w));
}

double hs_norm(const MultiplierOperator& op, double s, bool homogeneous) {
  const SpectralGrid& grid = *op.grid();
  double acc = 0.0;
  const std::vector<double>& w = op.weights();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0.0) continue;
    const double xi2 = grid.xi_squared(i);
    const double weight =
        homogeneous ? (xi2 == 0.0 ? 0.0 : std::pow(xi2, s))
                    : std::pow(1.0 + xi2, s);
    acc += weight * w[i] * w[i];
  }
  return std::sqrt(acc);
}

std::vector<Complex> NoiseStream::sample_increment(const SpectralGrid& grid,
                                                   double delta) {
  if (!(delta > 0.0))
    throw std::invalid_argument("sample_increment: delta must be positive");
  const double root = std::sqrt(delta);
  std::vector<Complex> dW(grid.total_points());
  for (std::size_t m = 0; m < dW.size(); ++m) {
    const auto [g1, g2] = normal_pair(seed_, stream_id_, step_, m);
    dW[m] = Complex(g1 * root, g2 * root);
  }
  ++step_;
  return dW;
}

ConvolutionState::ConvolutionState(GridPtr grid, const MultiplierOperator& op,
                                   NoiseStream stream)
    : grid_(std::move(grid)),
      op_(op),
      stream_(stream),
      coeff_(grid_->total_points(), Complex(0.0, 0.0)) {
  if (op.grid().get() != grid_.get())
    throw std::invalid_argument("convolution: operator grid mismatch");
}

void ConvolutionState::advance(double delta) {
  if (!(delta > 0.0))
    throw std::invalid_argument("advance_convolution: delta must be positive");
  const std::vector<Complex> dW = stream_.sample_increment(*grid_, delta);
  const std::vector<double>& sigma = op_.weights();
  const Complex minus_i(0.0, -1.0);
  for (std::size_t m = 0; m < coeff_.size(); ++m) {
    coeff_[m] += minus_i * sigma[m] * dW[m];
    coeff_[m] *= std::polar(1.0, -delta * grid_->xi_squared(m));
  }
  time_ += delta;
}

GridField ConvolutionState::field() const {
  // a_m are orthonormal-basis coefficients; raw DFT coefficients are
  // a_m / coefficient_scale.
  const double inv_scale = 1.0 / fft::coefficient_scale(*grid_);
  std::vector<Complex> hat(coeff_.size());
  for (std::size_t m = 0; m < hat.size(); ++m) hat[m] = coeff_[m] * inv_scale;
  return from_spectrum(grid_, hat);
}

double ConvolutionState::l2_norm_squared() const {
  double acc = 0.0;
  for (const Complex& z : coeff_) acc += std::norm(z);
  return acc;
}

namespace {

double sobolev_weight(const SpectralGrid& grid, std::size_t m, double s) {
  return std::pow(1.0 + grid.xi_squared(m), 0.5 * s);
}

}  // namespace

ConvolutionPathStats convolution_path_stats(
    const GridPtr& grid, const MultiplierOperator& op, std::uint64_t seed,
    int paths, double T, int steps, double s, double p, double q, double r) {
  if (paths < 1)
    throw std::invalid_argument("convolution_path_stats: empty ensemble");
  if (grid->dimension() >= 3) {
    const double rmax = 2.0 * grid->dimension() / (grid->dimension() - 2.0);
    if (r > rmax + 1e-12)
      throw std::invalid_argument(
          "convolution_path_stats: r exceeds 2d/(d-2)");
  }
  const double dt = T / steps;
  double sup_sum = 0.0, sup_sq = 0.0;
  double mix_sum = 0.0, mix_sq = 0.0;
  for (int path = 0; path < paths; ++path) {
    ConvolutionState state(grid, op, NoiseStream(seed, path));
    std::vector<double> times{0.0};
    std::vector<double> wsr{0.0};
    double sup_hs = 0.0;
    for (int k = 0; k < steps; ++k) {
      state.advance(dt);
      double hs_sq = 0.0;
      const std::vector<Complex>& a = state.coefficients();
      for (std::size_t m = 0; m < a.size(); ++m) {
        const double w = sobolev_weight(*grid, m, s);
        hs_sq += w * w * std::norm(a[m]);
      }
      sup_hs = std::max(sup_hs, std::sqrt(hs_sq));
      times.push_back(state.time());
      wsr.push_back(bessel_norm(state.field(), s, r));
    }
    const double sup_p = std::pow(sup_hs, p);
    const double mix_p = std::pow(time_lq_norm(times, wsr, q), p);
    sup_sum += sup_p;
    sup_sq += sup_p * sup_p;
    mix_sum += mix_p;
    mix_sq += mix_p * mix_p;
  }
  ConvolutionPathStats out;
  const double n = paths;
  out.sup_hs_moment = sup_sum / n;
  out.mixed_moment = mix_sum / n;
  if (paths > 1) {
    out.sup_hs_se = std::sqrt(
        std::max(0.0, (sup_sq / n - out.sup_hs_moment * out.sup_hs_moment) /
                          (n - 1.0)));
    out.mixed_se = std::sqrt(
        std::max(0.0,
                 (mix_sq / n - out.mixed_moment * out.mixed_moment) / (n - 1.0)));
  }
  out.hs_operator_power = std::pow(hs_norm(op, s), p);
  out.sup_ratio = out.hs_operator_power > 0.0
                      ? out.sup_hs_moment / out.hs_operator_power
                      : 0.0;
  return out;
}

}  // namespace snls
