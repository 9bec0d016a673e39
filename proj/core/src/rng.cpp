#include "snls/rng.hpp"

#include <cmath>

namespace snls {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::uint32_t& c0, std::uint32_t& c1, std::uint32_t& c2,
                       std::uint32_t& c3, std::uint32_t k0, std::uint32_t k1) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c0;
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c2;
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  c0 = hi1 ^ c1 ^ k0;
  c1 = lo1;
  c2 = hi0 ^ c3 ^ k1;
  c3 = lo0;
}

}  // namespace

std::array<std::uint32_t, 4> Philox::block(std::uint64_t seed,
                                           std::uint64_t stream,
                                           std::uint64_t step,
                                           std::uint64_t element) {
  // Counter layout: (stream lo, step lo, element lo, mixed high words).
  std::uint32_t c0 = static_cast<std::uint32_t>(stream);
  std::uint32_t c1 = static_cast<std::uint32_t>(step);
  std::uint32_t c2 = static_cast<std::uint32_t>(element);
  std::uint32_t c3 = static_cast<std::uint32_t>(stream >> 32) ^
                     static_cast<std::uint32_t>(step >> 32) * 0x85EBCA6Bu ^
                     static_cast<std::uint32_t>(element >> 32) * 0xC2B2AE35u;
  std::uint32_t k0 = static_cast<std::uint32_t>(seed);
  std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
  for (int r = 0; r < 10; ++r) {
    round_once(c0, c1, c2, c3, k0, k1);
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {c0, c1, c2, c3};
}

double uniform_open_closed(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits =
      (static_cast<std::uint64_t>(hi) << 32) | static_cast<std::uint64_t>(lo);
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

std::pair<double, double> normal_pair(std::uint64_t seed, std::uint64_t stream,
                                      std::uint64_t step,
                                      std::uint64_t element) {
  const auto block = Philox::block(seed, stream, step, element);
  const double u1 = uniform_open_closed(block[0], block[1]);
  const double u2 = uniform_open_closed(block[2], block[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 6.283185307179586476925286766559 * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace snls
