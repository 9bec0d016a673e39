#include "snls/propagator.hpp"

#include <cmath>
#include <stdexcept>

namespace snls {

const std::vector<Complex>& Propagator::phases(double t) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cache_.find(t);
  if (it != cache_.end()) return it->second;
  std::vector<Complex> table(grid_->total_points());
  for (std::size_t i = 0; i < table.size(); ++i)
    table[i] = std::polar(1.0, -t * grid_->xi_squared(i));
  return cache_.emplace(t, std::move(table)).first->second;
}

void Propagator::apply_spectral(std::vector<Complex>& spectral,
                                double t) const {
  if (t == 0.0) return;
  const std::vector<Complex>& table = phases(t);
  for (std::size_t i = 0; i < spectral.size(); ++i) spectral[i] *= table[i];
}

GridField Propagator::apply(const GridField& field, double t) const {
  if (t == 0.0) return field;
  std::vector<Complex> hat = spectrum(field);
  apply_spectral(hat, t);
  return from_spectrum(field.grid, hat);
}

GridField apply_S(const GridField& field, double t) {
  return Propagator(field.grid).apply(field, t);
}

GridField duhamel_integral(const std::function<GridField(double)>& source,
                           double t, int steps) {
  if (steps < 1)
    throw std::invalid_argument("duhamel_integral: steps must be >= 1");
  const double dt = t / steps;
  const Complex minus_i(0.0, -1.0);

  // Running trapezoid: D_k = S(dt) D_{k-1} + dt/2 (S(dt) G_{k-1} + G_k),
  // where G = -i F. Keeps one exact S application per node.
  GridField g_prev = minus_i * source(0.0);
  Propagator prop(g_prev.grid);
  GridField acc(g_prev.grid);
  for (int k = 1; k <= steps; ++k) {
    const GridField g_k = minus_i * source(k * dt);
    acc = prop.apply(acc, dt);
    const GridField g_prev_moved = prop.apply(g_prev, dt);
    for (std::size_t i = 0; i < acc.values.size(); ++i)
      acc.values[i] += 0.5 * dt * (g_prev_moved.values[i] + g_k.values[i]);
    g_prev = g_k;
  }
  return acc;
}

}  // namespace snls
