#pragma once

// Per-sample random streams: sample k of a run with master seed s always sees
// the same engine, whichever thread draws it.

#include <cstdint>
#include <random>

namespace anderson {

inline std::mt19937_64 sample_engine(std::uint64_t master_seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace anderson
