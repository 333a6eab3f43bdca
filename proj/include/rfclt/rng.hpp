#pragma once
// Counter-based random numbers: every draw is a pure function of
// (seed, stream, cell index). Sub-windows therefore regenerate identically
// regardless of traversal order or thread count, and replications get
// independent streams by reseeding through a 64-bit mixer.

#include <array>
#include <cstdint>

#include "rfclt/lattice.hpp"

namespace rfclt {

// SplitMix64 finalizer; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

// Independent seed for a derived purpose (replication index, stream id).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt);

// Philox 4x32 with 10 rounds. Returns 128 random bits per counter/key pair.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

// 128 bits for one lattice cell. Coordinates are biased into 32-bit counter
// words, so each component must fit in [-2^31, 2^31). The stream id is mixed
// into the Philox key together with the seed.
struct CellBits {
  std::uint64_t lo;
  std::uint64_t hi;
};
CellBits cell_bits(std::uint64_t seed, std::uint64_t stream, const Index& cell);

// Uniform double in (0, 1], using the top 53 bits.
double u01(std::uint64_t bits);

// Standard normal via Box-Muller from one cell's 128 bits.
double normal_from_bits(CellBits b);

}  // namespace rfclt
