#include "rfclt/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rfclt {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  return mix64(base ^ mix64(salt));
}

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr,
                         const std::array<std::uint32_t, 2>& key) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    philox_round(ctr, key);
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

CellBits cell_bits(std::uint64_t seed, std::uint64_t stream, const Index& cell) {
  constexpr std::int64_t kBias = std::int64_t(1) << 31;
  std::array<std::uint32_t, 4> ctr{};
  for (int i = 0; i < cell.dim(); ++i) {
    const std::int64_t b = cell[i] + kBias;
    if (b < 0 || b > std::int64_t(0xFFFFFFFF)) {
      throw std::out_of_range("cell_bits: coordinate out of range at " + cell.str());
    }
    ctr[static_cast<size_t>(i)] = static_cast<std::uint32_t>(b);
  }
  // Tag unused counter words with the dimension so e.g. (a,b) and (a,b,0)
  // give unrelated draws.
  for (int i = cell.dim(); i < kMaxDim; ++i) {
    ctr[static_cast<size_t>(i)] = 0x5eed0000u + static_cast<std::uint32_t>(cell.dim());
  }
  const std::uint64_t k = derive_seed(seed, stream);
  const auto out = philox4x32(ctr, {static_cast<std::uint32_t>(k),
                                    static_cast<std::uint32_t>(k >> 32)});
  return CellBits{static_cast<std::uint64_t>(out[0]) | (static_cast<std::uint64_t>(out[1]) << 32),
                  static_cast<std::uint64_t>(out[2]) | (static_cast<std::uint64_t>(out[3]) << 32)};
}

double u01(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

double normal_from_bits(CellBits b) {
  const double u1 = u01(b.lo);
  const double u2 = u01(b.hi);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace rfclt
