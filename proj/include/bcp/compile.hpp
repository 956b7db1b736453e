#pragma once

#include "bcp/machine.hpp"
#include "bcp/protocol.hpp"

namespace bcp {

/// Compiles a machine declared n-bounded into a broadcast protocol: a single
/// leader walks the control states while every other agent carries one token
/// whose position names the counter holding it (or idle/err), plus the input
/// symbol it arrived as and an opinion bit.
Protocol cm_to_protocol(const CounterMachine& m);

/// Parallel composition of a protocol for a predicate with one for its
/// negation. Both halves run side by side; whenever a step of the active half
/// might have been missed, an agent can defect to a reset state, which forces
/// a restart of the other half. The result computes the predicate silently.
/// Requires identical alphabets and equally many leaders.
Protocol compose_silent(const Protocol& p_pos, const Protocol& p_neg);

/// Full chain: lower both machines to n-bounded form (skipping the stages
/// their declared bounds make unnecessary), compile each, and compose.
Protocol pipeline(const CounterMachine& pos, const CounterMachine& neg);

} // namespace bcp
