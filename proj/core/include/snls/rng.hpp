#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace snls {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Draws are pure functions of (seed, stream, step, element), so ensembles
/// reproduce bit-identically regardless of thread scheduling, and a stream
/// can be replayed from scratch to any prefix.
struct Philox {
  static std::array<std::uint32_t, 4> block(std::uint64_t seed,
                                            std::uint64_t stream,
                                            std::uint64_t step,
                                            std::uint64_t element);
};

/// Uniform double in (0, 1] from two 32-bit words.
double uniform_open_closed(std::uint32_t hi, std::uint32_t lo);

/// Pair of independent standard normals (Box-Muller) keyed by the counter.
std::pair<double, double> normal_pair(std::uint64_t seed, std::uint64_t stream,
                                      std::uint64_t step,
                                      std::uint64_t element);

}  // namespace snls
