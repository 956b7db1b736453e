#pragma once

#include "bcp/machine.hpp"

namespace bcp {

/// Little-endian base-(n+1) digits of value, padded to width entries.
std::vector<std::uint32_t> base_digits(std::uint64_t value, std::uint64_t n, std::uint32_t width);

/// Rewrites a machine declared `poly c` into one declared `weak-n`. Every
/// counter becomes c digit counters in base n+1 plus two shared scratch
/// counters z0/zn, and an entry gadget measures the population total into zn
/// before the original program starts.
CounterMachine weaken(const CounterMachine& m);

/// Rewrites a machine declared `weak-n` into one declared `n`. Counters become
/// one token pool per subset of the original counters; the pools always sum to
/// exactly the population total. Limited to machines with at most 8 counters.
CounterMachine tighten(const CounterMachine& m);

/// Applies whichever of the two rewrites the declared bound still requires.
CounterMachine lower_to_n_bounded(const CounterMachine& m);

} // namespace bcp
