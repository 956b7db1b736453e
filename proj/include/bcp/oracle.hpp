#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace bcp {

/// Expected-value predicate over input vectors; returns 0 or 1.
using OracleFn = std::function<int(const std::vector<std::uint32_t>&)>;

struct Oracle {
    std::string name;
    std::size_t arity;
    OracleFn fn;

    int operator()(const std::vector<std::uint32_t>& input) const { return fn(input); }
};

/// Builtins: power2, majority, geq, lt, even, odd, div3, threshold:<k>.
Oracle builtin_oracle(const std::string& spec);

/// "2..9" (arity 1) or "(a,b)..(c,d)" (arity 2 rectangle, row-major order).
std::vector<std::vector<std::uint32_t>> parse_input_range(const std::string& spec);

/// All vectors of the given arity whose component sum lies in [lo, hi],
/// lexicographic order.
std::vector<std::vector<std::uint32_t>> inputs_with_sum(std::size_t arity, std::uint32_t lo,
                                                        std::uint32_t hi);

} // namespace bcp
