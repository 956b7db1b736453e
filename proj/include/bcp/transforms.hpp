#pragma once

#include <string>
#include <vector>

#include "bcp/protocol.hpp"
#include "bcp/verify.hpp"

namespace bcp {

/// Folds the leader multiset into the population. Input agents arrive in a
/// staging state; one agent carrying `symbol` (default: the first alphabet
/// symbol) elects itself, recruits the remaining leaders from its fellow
/// `symbol` agents, and releases everyone else. The result computes the
/// source predicate of the input shifted down by |L| agents of that symbol,
/// and needs at least |L| of them to get going.
Protocol to_leaderless(const Protocol& p, const std::string& symbol = "");

/// Funnels every broadcast through one extra leader agent: a sender hands its
/// pending broadcast to the leader, who performs it and returns. Only the
/// leader's states ever send broadcasts. Call with the source input vector;
/// the population grows by the one extra leader.
Protocol to_single_broadcaster(const Protocol& p);

/// Rebuilds the protocol so all broadcasts share one transfer, a freeze
/// signal; the effects of the original broadcasts happen via rendez-vous
/// with frozen agents, with an error-and-reset path for botched attempts.
/// Correct for protocols that silently compute their predicate; a small
/// probe warns when the source visibly is not silent.
Protocol to_single_signal(const Protocol& p, std::vector<std::string>* warnings = nullptr);

struct ResetViolation {
    std::vector<std::uint32_t> input;
    Config at;                    // reachable configuration the broadcast fired from
    std::uint32_t trans_id;       // offending broadcast, unified id space
    Config got;                   // where it landed instead of the initial configuration
    std::vector<TraceStep> path;  // replayable route from the initial configuration to `at`
};

struct ResetReport {
    bool ok = true;
    std::uint64_t nodes = 0;
    std::vector<ResetViolation> violations;  // at most one per failing input
};

/// Does every broadcast step from every reachable configuration land exactly
/// on the initial configuration? Vacuously true without broadcasts.
ResetReport check_reset_protocol(const Protocol& p,
                                 const std::vector<std::vector<std::uint32_t>>& inputs,
                                 const VerifyOptions& options = {});

} // namespace bcp
