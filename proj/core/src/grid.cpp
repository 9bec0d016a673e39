#include "snls/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace snls {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

SpectralGrid::SpectralGrid(int dimension, int modes_per_axis,
                           double domain_length)
    : dim_(dimension), modes_(modes_per_axis), length_(domain_length) {
  total_ = 1;
  for (int a = 0; a < dim_; ++a) total_ *= static_cast<std::size_t>(modes_);
  const double h = length_ / modes_;
  cell_volume_ = std::pow(h, dim_);
  volume_ = std::pow(length_, dim_);

  xi_sq_.resize(total_);
  nyquist_.resize(total_);
  const double scale = kTwoPi / length_;
  for (std::size_t flat = 0; flat < total_; ++flat) {
    std::size_t rem = flat;
    double s = 0.0;
    bool nyq = false;
    for (int a = dim_ - 1; a >= 0; --a) {
      const int idx = static_cast<int>(rem % modes_);
      rem /= modes_;
      const int m = axis_mode(idx);
      if (m == -modes_ / 2) nyq = true;
      const double xi = scale * m;
      s += xi * xi;
    }
    xi_sq_[flat] = s;
    nyquist_[flat] = nyq;
  }
}

std::shared_ptr<const SpectralGrid> SpectralGrid::make(int dimension,
                                                       int modes_per_axis,
                                                       double domain_length) {
  if (dimension < 1 || dimension > 4)
    throw std::invalid_argument("grid: dimension must be in [1,4]");
  if (modes_per_axis < 8 || !power_of_two(modes_per_axis))
    throw std::invalid_argument(
        "grid: modes per axis must be a power of two >= 8");
  if (!(domain_length > 0.0))
    throw std::invalid_argument("grid: domain length must be positive");
  return std::shared_ptr<const SpectralGrid>(
      new SpectralGrid(dimension, modes_per_axis, domain_length));
}

std::array<double, 4> SpectralGrid::wavevector(std::size_t flat) const {
  std::array<double, 4> xi{0.0, 0.0, 0.0, 0.0};
  const double scale = kTwoPi / length_;
  std::size_t rem = flat;
  for (int a = dim_ - 1; a >= 0; --a) {
    const int idx = static_cast<int>(rem % modes_);
    rem /= modes_;
    xi[a] = scale * axis_mode(idx);
  }
  return xi;
}

double SpectralGrid::xi_component(std::size_t flat, int axis) const {
  return wavevector(flat)[axis];
}

std::array<double, 4> SpectralGrid::coordinates(std::size_t flat) const {
  std::array<double, 4> x{0.0, 0.0, 0.0, 0.0};
  const double h = length_ / modes_;
  std::size_t rem = flat;
  for (int a = dim_ - 1; a >= 0; --a) {
    const int idx = static_cast<int>(rem % modes_);
    rem /= modes_;
    x[a] = h * idx;
  }
  return x;
}

GridField::GridField(GridPtr g, std::vector<Complex> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid->total_points())
    throw std::invalid_argument("GridField: value count does not match grid");
}

bool GridField::finite() const {
  for (const Complex& z : values) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

GridField operator+(const GridField& a, const GridField& b) {
  GridField out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += b.values[i];
  return out;
}

GridField operator-(const GridField& a, const GridField& b) {
  GridField out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= b.values[i];
  return out;
}

GridField operator*(Complex scale, const GridField& f) {
  GridField out = f;
  for (Complex& z : out.values) z *= scale;
  return out;
}

namespace fft {

namespace {

struct PlanPair {
  fftw_plan forward;
  fftw_plan backward;
};

// Plan creation is not thread-safe in FFTW; executing a plan through the
// new-array interface is. Plans are cached per (dimension, M).
PlanPair& plans_for(const SpectralGrid& grid) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, PlanPair> cache;
  std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_pair(grid.dimension(), grid.modes_per_axis());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::vector<Complex> in(grid.total_points()), out(grid.total_points());
  std::vector<int> n(grid.dimension(), grid.modes_per_axis());
  auto* fin = reinterpret_cast<fftw_complex*>(in.data());
  auto* fout = reinterpret_cast<fftw_complex*>(out.data());
  PlanPair pair;
  pair.forward = fftw_plan_dft(grid.dimension(), n.data(), fin, fout,
                               FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  pair.backward = fftw_plan_dft(grid.dimension(), n.data(), fin, fout,
                                FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  return cache.emplace(key, pair).first->second;
}

}  // namespace

std::vector<Complex> forward(const SpectralGrid& grid,
                             const std::vector<Complex>& physical) {
  std::vector<Complex> out(grid.total_points());
  PlanPair& plans = plans_for(grid);
  fftw_execute_dft(
      plans.forward,
      reinterpret_cast<fftw_complex*>(const_cast<Complex*>(physical.data())),
      reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<Complex> backward(const SpectralGrid& grid,
                              const std::vector<Complex>& spectral) {
  std::vector<Complex> out(grid.total_points());
  PlanPair& plans = plans_for(grid);
  fftw_execute_dft(
      plans.backward,
      reinterpret_cast<fftw_complex*>(const_cast<Complex*>(spectral.data())),
      reinterpret_cast<fftw_complex*>(out.data()));
  const double inv = 1.0 / static_cast<double>(grid.total_points());
  for (Complex& z : out) z *= inv;
  return out;
}

double coefficient_scale(const SpectralGrid& grid) {
  return std::pow(grid.domain_length(), 0.5 * grid.dimension()) /
         static_cast<double>(grid.total_points());
}

}  // namespace fft

std::vector<Complex> spectrum(const GridField& field) {
  return fft::forward(*field.grid, field.values);
}

GridField from_spectrum(GridPtr grid, const std::vector<Complex>& spectral) {
  GridField out(grid);
  out.values = fft::backward(*grid, spectral);
  return out;
}

}  // namespace snls
