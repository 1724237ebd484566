#pragma once

#include <cstdint>

namespace sheafdiff {

/// Independent RNG streams split off a master seed.
enum class Stream : std::uint64_t {
  kGraph = 1,
  kSheaf = 2,
  kSchedule = 3,
  kInit = 4,
  kPotential = 5,
};

/// Counter-based derivation (splitmix64 finalizer over master, stream and
/// index): changing the number of draws in one stream never shifts another.
std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0);

}  // namespace sheafdiff
