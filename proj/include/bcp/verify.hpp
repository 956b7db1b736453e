#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bcp/protocol.hpp"
#include "bcp/sim.hpp"

namespace bcp {

struct ReachGraph {
    std::vector<Config> configs;  // BFS discovery order; node 0 is the root
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> edges;  // (trans, node)
};

struct VerifyOptions {
    std::uint64_t node_budget = 5'000'000;
};

/// Exhaustive BFS of the configuration graph; deterministic node order.
/// Raises BudgetExceeded past the node budget.
ReachGraph build_graph(const Protocol& p, const Config& root, const VerifyOptions& options = {});

struct SccResult {
    std::vector<std::uint32_t> component;  // node -> component id
    std::uint32_t component_count = 0;
    std::vector<char> is_bottom;           // per component: no edge leaves it
};

SccResult bottom_sccs(const ReachGraph& g);

/// Shortest path from the root to `target`, lexicographically least by
/// transition id among the shortest ones. Steps replay under apply_transition.
std::vector<TraceStep> witness_path(const ReachGraph& g, std::uint32_t target);

struct CheckResult {
    bool ok = false;
    std::uint64_t nodes = 0;
    std::uint64_t bottom_count = 0;
    std::string reason;                        // set on failure
    std::optional<Config> witness_target;
    std::vector<TraceStep> witness;            // path from the root
};

/// Every fair execution stabilizes to `expected`: every bottom SCC is
/// entirely expected-consensus.
CheckResult check_computes(const Protocol& p, const std::vector<std::uint32_t>& input,
                           int expected, const VerifyOptions& options = {});

/// Additionally silent: every bottom SCC is a single terminal configuration
/// of the expected consensus.
CheckResult check_silently_computes(const Protocol& p, const std::vector<std::uint32_t>& input,
                                    int expected, const VerifyOptions& options = {});

/// expected = 1: every bottom SCC is a terminal 1-consensus singleton.
/// expected = 0: no terminal configuration is reachable at all.
CheckResult check_semi_computes(const Protocol& p, const std::vector<std::uint32_t>& input,
                                int expected, const VerifyOptions& options = {});

struct DecideResult {
    std::optional<int> value;  // nullopt = undetermined (ill-specified input)
    std::uint64_t nodes = 0;
    std::uint64_t bottom_count = 0;
};

/// b when every bottom SCC is entirely b-consensus; undetermined otherwise.
DecideResult decide(const Protocol& p, const std::vector<std::uint32_t>& input,
                    const VerifyOptions& options = {});

} // namespace bcp
