#include "snls/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace snls {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;

double trapezoid(const std::vector<double>& times,
                 const std::vector<double>& g) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    acc += 0.5 * (g[i] + g[i + 1]) * (times[i + 1] - times[i]);
  return acc;
}

}  // namespace

double lebesgue_norm(const GridField& field, double r) {
  if (!(r >= 1.0)) throw std::invalid_argument("lebesgue_norm: r must be >= 1");
  if (std::isinf(r)) {
    double m = 0.0;
    for (const Complex& z : field.values) m = std::max(m, std::abs(z));
    return m;
  }
  double acc = 0.0;
  if (r == 2.0) {
    for (const Complex& z : field.values) acc += std::norm(z);
  } else {
    const double half = 0.5 * r;
    for (const Complex& z : field.values) acc += std::pow(std::norm(z), half);
  }
  acc *= field.grid->cell_volume();
  return std::pow(acc, 1.0 / r);
}

double sobolev_norm(const GridField& field, double s, bool homogeneous) {
  const SpectralGrid& grid = *field.grid;
  const std::vector<Complex> hat = spectrum(field);
  const double scale = fft::coefficient_scale(grid);

  if (homogeneous && s < 0.0) {
    const double zero_mode = std::abs(hat[0]) * scale;
    const double l2 = lebesgue_norm(field, 2.0);
    if (zero_mode > 1e-12 * std::max(1.0, l2))
      throw std::invalid_argument(
          "sobolev_norm: homogeneous norm with s < 0 requires zero mean");
  }

  double acc = 0.0;
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const double xi2 = grid.xi_squared(i);
    double weight;
    if (homogeneous) {
      if (xi2 == 0.0) continue;
      weight = std::pow(xi2, s);
    } else {
      weight = std::pow(1.0 + xi2, s);
    }
    acc += weight * std::norm(hat[i]);
  }
  return scale * std::sqrt(acc);
}

namespace {

// Physical-space gradient magnitude via spectral differentiation.
std::vector<double> gradient_magnitude(const GridField& field) {
  const SpectralGrid& grid = *field.grid;
  const std::vector<Complex> hat = spectrum(field);
  std::vector<double> mag_sq(field.size(), 0.0);
  std::vector<Complex> dhat(hat.size());
  for (int axis = 0; axis < grid.dimension(); ++axis) {
    for (std::size_t i = 0; i < hat.size(); ++i)
      dhat[i] = Complex(0.0, grid.xi_component(i, axis)) * hat[i];
    const std::vector<Complex> d = fft::backward(grid, dhat);
    for (std::size_t i = 0; i < d.size(); ++i) mag_sq[i] += std::norm(d[i]);
  }
  for (double& v : mag_sq) v = std::sqrt(v);
  return mag_sq;
}

double lr_of_scalars(const SpectralGrid& grid, const std::vector<double>& g,
                     double r) {
  if (std::isinf(r)) {
    double m = 0.0;
    for (double v : g) m = std::max(m, v);
    return m;
  }
  double acc = 0.0;
  for (double v : g) acc += std::pow(v, r);
  return std::pow(acc * grid.cell_volume(), 1.0 / r);
}

}  // namespace

double w1r_norm(const GridField& field, double r) {
  const double base = lebesgue_norm(field, r);
  const std::vector<double> grad = gradient_magnitude(field);
  const double gnorm = lr_of_scalars(*field.grid, grad, r);
  if (std::isinf(r)) return std::max(base, gnorm);
  return std::pow(std::pow(base, r) + std::pow(gnorm, r), 1.0 / r);
}

double bessel_norm(const GridField& field, double s, double r) {
  const SpectralGrid& grid = *field.grid;
  std::vector<Complex> hat = spectrum(field);
  for (std::size_t i = 0; i < hat.size(); ++i)
    hat[i] *= std::pow(1.0 + grid.xi_squared(i), 0.5 * s);
  return lebesgue_norm(from_spectrum(field.grid, hat), r);
}

void validate_sample(const SpaceTimeSample& sample) {
  if (sample.times.empty() || sample.times.size() != sample.snapshots.size())
    throw std::invalid_argument("space-time sample: empty or mismatched");
  for (std::size_t i = 0; i + 1 < sample.times.size(); ++i)
    if (!(sample.times[i] < sample.times[i + 1]))
      throw std::invalid_argument(
          "space-time sample: times must be strictly increasing");
}

double time_lq_norm(const std::vector<double>& times,
                    const std::vector<double>& spatial_norms, double q) {
  if (times.empty()) throw std::invalid_argument("time_lq_norm: empty sample");
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : spatial_norms) m = std::max(m, v);
    return m;
  }
  std::vector<double> g(spatial_norms.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::pow(spatial_norms[i], q);
  if (times.size() == 1) return 0.0;
  return std::pow(trapezoid(times, g), 1.0 / q);
}

double strichartz_norm(const SpaceTimeSample& sample) {
  validate_sample(sample);
  const double r = sample.pair.r.value();
  std::vector<double> spatial(sample.snapshots.size());
  for (std::size_t i = 0; i < spatial.size(); ++i)
    spatial[i] = lebesgue_norm(sample.snapshots[i], r);
  return time_lq_norm(sample.times, spatial, sample.pair.q.value());
}

double strichartz_w1r_norm(const std::vector<double>& times,
                           const std::vector<GridField>& snapshots,
                           const StrichartzPair& pair) {
  if (times.empty() || times.size() != snapshots.size())
    throw std::invalid_argument("strichartz_w1r_norm: empty or mismatched");
  const double r = pair.r.value();
  std::vector<double> spatial(snapshots.size());
  for (std::size_t i = 0; i < spatial.size(); ++i)
    spatial[i] = w1r_norm(snapshots[i], r);
  return time_lq_norm(times, spatial, pair.q.value());
}

double projection_cutoff(double rho) {
  if (rho <= 1.0) return 1.0;
  if (rho >= 2.0) return 0.0;
  const double c = std::cos(0.5 * kPi * (rho - 1.0));
  return c * c;
}

GridField project_PN(const GridField& field, double N) {
  if (!(N > 0.0)) throw std::invalid_argument("project_PN: N must be positive");
  const SpectralGrid& grid = *field.grid;
  std::vector<Complex> hat = spectrum(field);
  for (std::size_t i = 0; i < hat.size(); ++i)
    hat[i] *= projection_cutoff(std::sqrt(grid.xi_squared(i)) / N);
  return from_spectrum(field.grid, hat);
}

GridField rescale_field(const GridField& field, double lambda, double p) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("rescale_field: lambda must be positive");
  const double a = std::round(lambda);
  const double b = lambda > 0 ? std::round(1.0 / lambda) : 0.0;
  const bool integer = a >= 1.0 && std::abs(lambda - a) < 1e-12;
  const bool reciprocal = b >= 1.0 && std::abs(1.0 / lambda - b) < 1e-12;
  if (!integer && !reciprocal)
    throw std::invalid_argument(
        "rescale_field: lambda must be an integer or reciprocal integer");
  const SpectralGrid& grid = *field.grid;
  GridPtr scaled = SpectralGrid::make(grid.dimension(), grid.modes_per_axis(),
                                      lambda * grid.domain_length());
  // Samples map index-to-index: x'_i = lambda * x_i on the dilated grid.
  GridField out(scaled, field.values);
  const double amp = std::pow(lambda, -2.0 / (p - 1.0));
  for (Complex& z : out.values) z *= amp;
  return out;
}

}  // namespace snls
