#pragma once

#include <functional>
#include <map>
#include <mutex>

#include "snls/grid.hpp"

namespace snls {

/// Linear Schroedinger group S(t) = e^{it Laplacian}, applied exactly as the
/// Fourier multiplier e^{-it|xi|^2}. Phase tables are cached per step size;
/// the cache is guarded so instances may be shared between threads.
class Propagator {
 public:
  explicit Propagator(GridPtr grid) : grid_(std::move(grid)) {}

  GridField apply(const GridField& field, double t) const;

  /// In-place action on raw spectral coefficients.
  void apply_spectral(std::vector<Complex>& spectral, double t) const;

 private:
  const std::vector<Complex>& phases(double t) const;

  GridPtr grid_;
  mutable std::mutex mutex_;
  mutable std::map<double, std::vector<Complex>> cache_;
};

/// One-off application of S(t) without cache reuse.
GridField apply_S(const GridField& field, double t);

/// Trapezoidal quadrature of the Duhamel integral
/// -i * int_0^t S(t - t') F(t') dt' with S applied exactly.
GridField duhamel_integral(const std::function<GridField(double)>& source,
                           double t, int steps);

}  // namespace snls
