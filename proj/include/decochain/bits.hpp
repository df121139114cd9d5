#pragma once

#include <cstdint>

namespace decochain {

// spread the low bits of x to even positions: bit s -> bit 2s
// (u layer lives on even path parity, l layer on odd)
inline uint64_t spread_even_bits(uint64_t x) {
  uint64_t out = 0;
  for (int s = 0; x >> s; ++s) out |= ((x >> s) & 1u) << (2 * s);
  return out;
}

}  // namespace decochain
