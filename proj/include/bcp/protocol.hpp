#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bcp/multiset.hpp"

namespace bcp {

/// Ordered interaction (p, q) -> (p2, q2). Enabledness only needs the pre
/// multiset {p, q}; the ordering fixes which participant lands where.
struct RendezVous {
    StateId p, q, p2, q2;
    bool operator==(const RendezVous&) const = default;
};

/// Broadcast (pre, post, transfer): the sender moves pre -> post, every other
/// agent moves through the total transfer map simultaneously.
struct Broadcast {
    StateId pre, post;
    std::uint32_t transfer;
    bool operator==(const Broadcast&) const = default;
};

class Protocol {
  public:
    std::string name;
    std::vector<std::string> states;
    std::vector<std::string> alphabet;
    std::vector<StateId> input_map;    // one target state per alphabet symbol
    Config leaders;
    std::vector<std::uint8_t> output;  // one bit per state
    std::vector<RendezVous> rendezvous;
    std::vector<Broadcast> broadcasts;
    std::vector<std::vector<StateId>> transfers;  // each has |states| images
    std::vector<std::string> notes;

    StateId state(const std::string& name) const;
    std::optional<StateId> find_state(const std::string& name) const;
    const std::string& state_name(StateId q) const { return states.at(q); }

    /// Adds a state (duplicates rejected). Output defaults to 0.
    StateId add_state(const std::string& name, bool output_bit = false);
    StateId ensure_state(const std::string& name, bool output_bit = false);

    /// Stores a transfer map, reusing an existing identical one.
    std::uint32_t intern_transfer(std::vector<StateId> images);

    std::size_t transition_count() const { return rendezvous.size() + broadcasts.size(); }

    /// Transition ids index rendez-vous first, then broadcasts.
    std::string transition_label(std::uint32_t trans_id) const;
    std::string transition_pretty(std::uint32_t trans_id) const;

  private:
    mutable std::unordered_map<std::string, StateId> index_;
    void reindex() const;
};

struct Step {
    std::uint32_t trans_id;
    Config successor;
};

struct Violation {
    bool warning;
    std::string message;
};

Config apply_rendezvous(const Protocol& p, const Config& c, std::uint32_t rv_index);
Config apply_broadcast(const Protocol& p, const Config& c, std::uint32_t bc_index);

/// Successor of transition `trans_id` in the unified id space; raises NotEnabled.
Config apply_transition(const Protocol& p, const Config& c, std::uint32_t trans_id);

bool transition_enabled(const Protocol& p, const Config& c, std::uint32_t trans_id);

/// All enabled steps, ordered by transition id. Each enabled transition
/// contributes exactly one successor.
std::vector<Step> enabled_steps(const Protocol& p, const Config& c);

bool is_terminal(const Protocol& p, const Config& c);

/// 0 or 1 when every present state agrees on its output, nullopt otherwise.
std::optional<int> classify_consensus(const Protocol& p, const Config& c);

Config initial_configuration(const Protocol& p, const std::vector<std::uint32_t>& input);

std::vector<Violation> validate(const Protocol& p);

/// "q1:2 q2:1" with entries sorted by state name (display and trace format).
std::string config_to_string(const Protocol& p, const Config& c);

/// Hash-indexed transition lookup so enabled-step enumeration touches only
/// transitions whose pre states are present. Same order as enabled_steps.
class StepIndex {
  public:
    explicit StepIndex(const Protocol& p);

    std::vector<Step> enabled(const Config& c) const;
    bool terminal(const Config& c) const;

    /// Enabled transition ids only (no successors), ordered.
    std::vector<std::uint32_t> enabled_ids(const Config& c) const;

  private:
    const Protocol& protocol_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> rv_by_pre_;
    std::unordered_map<StateId, std::vector<std::uint32_t>> bc_by_sender_;
};

} // namespace bcp
