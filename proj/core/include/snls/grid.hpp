#pragma once

#include <array>
#include <complex>
#include <memory>
#include <vector>

namespace snls {

using Complex = std::complex<double>;

/// Uniform periodic grid on the torus [0,L)^d with M points per axis.
///
/// Fourier modes use the standard half-spectrum convention: per-axis integer
/// frequencies run over {-M/2, ..., M/2-1}, with the Nyquist index assigned
/// to the negative half. Physical wavenumbers are (2*pi/L) * m.
class SpectralGrid {
 public:
  static std::shared_ptr<const SpectralGrid> make(int dimension,
                                                  int modes_per_axis,
                                                  double domain_length);

  int dimension() const { return dim_; }
  int modes_per_axis() const { return modes_; }
  double domain_length() const { return length_; }
  std::size_t total_points() const { return total_; }
  double cell_volume() const { return cell_volume_; }
  double volume() const { return volume_; }

  /// Integer frequency of a per-axis index (FFT layout).
  int axis_mode(int index) const {
    return index < modes_ / 2 ? index : index - modes_;
  }

  /// Physical wavevector components of a flat spectral index.
  std::array<double, 4> wavevector(std::size_t flat) const;

  /// |xi|^2 lookup for a flat spectral index.
  double xi_squared(std::size_t flat) const { return xi_sq_[flat]; }

  /// Component of the physical wavevector along `axis`.
  double xi_component(std::size_t flat, int axis) const;

  /// True if any axis of the flat index sits on the Nyquist line |m| = M/2.
  bool is_nyquist(std::size_t flat) const { return nyquist_[flat]; }

  /// Physical coordinates of a flat grid index.
  std::array<double, 4> coordinates(std::size_t flat) const;

 private:
  SpectralGrid(int dimension, int modes_per_axis, double domain_length);

  int dim_;
  int modes_;
  double length_;
  std::size_t total_;
  double cell_volume_;
  double volume_;
  std::vector<double> xi_sq_;
  std::vector<bool> nyquist_;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

/// Complex field sampled on the physical grid.
struct GridField {
  GridPtr grid;
  std::vector<Complex> values;

  GridField() = default;
  explicit GridField(GridPtr g) : grid(std::move(g)), values(grid->total_points()) {}
  GridField(GridPtr g, std::vector<Complex> v);

  std::size_t size() const { return values.size(); }
  bool finite() const;
};

GridField operator+(const GridField& a, const GridField& b);
GridField operator-(const GridField& a, const GridField& b);
GridField operator*(Complex scale, const GridField& f);

namespace fft {

/// Unnormalized forward DFT (physical samples -> raw coefficients).
std::vector<Complex> forward(const SpectralGrid& grid,
                             const std::vector<Complex>& physical);

/// Inverse DFT including the 1/M^d normalization.
std::vector<Complex> backward(const SpectralGrid& grid,
                              const std::vector<Complex>& spectral);

/// Orthonormal-basis coefficient scale: a_m = coefficient_scale * uhat_m
/// makes {L^{-d/2} e^{i xi x}} an orthonormal expansion, so that
/// sum |a_m|^2 equals the quadrature L^2 norm squared (Parseval).
double coefficient_scale(const SpectralGrid& grid);

}  // namespace fft

/// Spectrum of a field (raw DFT coefficients).
std::vector<Complex> spectrum(const GridField& field);

/// Field with the given raw DFT coefficients.
GridField from_spectrum(GridPtr grid, const std::vector<Complex>& spectral);

}  // namespace snls
