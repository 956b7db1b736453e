#include "bcp/protocol.hpp"

#include <algorithm>
#include <sstream>

#include "bcp/error.hpp"

namespace bcp {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::UnknownName: return "UnknownName";
        case ErrorCode::DuplicateName: return "DuplicateName";
        case ErrorCode::PopulationTooSmall: return "PopulationTooSmall";
        case ErrorCode::EmptyConfiguration: return "EmptyConfiguration";
        case ErrorCode::NotEnabled: return "NotEnabled";
        case ErrorCode::ArityMismatch: return "ArityMismatch";
        case ErrorCode::AlphabetMismatch: return "AlphabetMismatch";
        case ErrorCode::LeaderMismatch: return "LeaderMismatch";
        case ErrorCode::MissingBoundDeclaration: return "MissingBoundDeclaration";
        case ErrorCode::NotNBounded: return "NotNBounded";
        case ErrorCode::CounterCountTooLarge: return "CounterCountTooLarge";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

void Protocol::reindex() const {
    index_.clear();
    index_.reserve(states.size());
    for (StateId i = 0; i < states.size(); ++i) index_.emplace(states[i], i);
}

StateId Protocol::state(const std::string& name) const {
    auto id = find_state(name);
    if (!id) raise(ErrorCode::UnknownName, "unknown state '" + name + "' in protocol '" + this->name + "'");
    return *id;
}

std::optional<StateId> Protocol::find_state(const std::string& name) const {
    if (index_.size() != states.size()) reindex();
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

StateId Protocol::add_state(const std::string& name, bool output_bit) {
    if (find_state(name)) raise(ErrorCode::DuplicateName, "duplicate state '" + name + "'");
    states.push_back(name);
    output.push_back(output_bit ? 1 : 0);
    StateId id = static_cast<StateId>(states.size() - 1);
    index_.emplace(name, id);
    return id;
}

StateId Protocol::ensure_state(const std::string& name, bool output_bit) {
    if (auto id = find_state(name)) return *id;
    return add_state(name, output_bit);
}

std::uint32_t Protocol::intern_transfer(std::vector<StateId> images) {
    for (std::uint32_t i = 0; i < transfers.size(); ++i) {
        if (transfers[i] == images) return i;
    }
    transfers.push_back(std::move(images));
    return static_cast<std::uint32_t>(transfers.size() - 1);
}

std::string Protocol::transition_label(std::uint32_t trans_id) const {
    if (trans_id < rendezvous.size()) return "r" + std::to_string(trans_id);
    return "b" + std::to_string(trans_id - rendezvous.size());
}

std::string Protocol::transition_pretty(std::uint32_t trans_id) const {
    std::ostringstream out;
    if (trans_id < rendezvous.size()) {
        const auto& t = rendezvous[trans_id];
        out << "rv: " << states[t.p] << " " << states[t.q] << " -> "
            << states[t.p2] << " " << states[t.q2];
        return out.str();
    }
    const auto& b = broadcasts[trans_id - rendezvous.size()];
    out << "bc: " << states[b.pre] << " -> " << states[b.post];
    const auto& f = transfers[b.transfer];
    bool first = true;
    for (StateId q = 0; q < f.size(); ++q) {
        if (f[q] == q) continue;
        out << (first ? " ; " : ", ") << states[q] << " -> " << states[f[q]];
        first = false;
    }
    return out.str();
}

Config apply_rendezvous(const Protocol& p, const Config& c, std::uint32_t rv_index) {
    const RendezVous& t = p.rendezvous.at(rv_index);
    bool enabled = (t.p == t.q) ? c.count(t.p) >= 2
                                : (c.count(t.p) >= 1 && c.count(t.q) >= 1);
    if (!enabled) {
        raise(ErrorCode::NotEnabled,
              "rendez-vous " + p.transition_pretty(rv_index) + " not enabled at " +
                  config_to_string(p, c));
    }
    return c.sub(t.p, 1).sub(t.q, 1).add(t.p2, 1).add(t.q2, 1);
}

Config apply_broadcast(const Protocol& p, const Config& c, std::uint32_t bc_index) {
    const Broadcast& b = p.broadcasts.at(bc_index);
    if (c.count(b.pre) == 0) {
        std::uint32_t id = static_cast<std::uint32_t>(p.rendezvous.size()) + bc_index;
        raise(ErrorCode::NotEnabled,
              "broadcast " + p.transition_pretty(id) + " not enabled at " +
                  config_to_string(p, c));
    }
    const auto& f = p.transfers[b.transfer];
    Config rest = c.sub(b.pre, 1);
    std::vector<Config::Entry> moved;
    moved.reserve(rest.support_size() + 1);
    for (const auto& [q, n] : rest.entries()) moved.push_back({f[q], n});
    moved.push_back({b.post, 1});
    return Config::from_entries(std::move(moved));
}

Config apply_transition(const Protocol& p, const Config& c, std::uint32_t trans_id) {
    if (trans_id < p.rendezvous.size()) return apply_rendezvous(p, c, trans_id);
    return apply_broadcast(p, c, trans_id - static_cast<std::uint32_t>(p.rendezvous.size()));
}

bool transition_enabled(const Protocol& p, const Config& c, std::uint32_t trans_id) {
    if (trans_id < p.rendezvous.size()) {
        const RendezVous& t = p.rendezvous[trans_id];
        return (t.p == t.q) ? c.count(t.p) >= 2
                            : (c.count(t.p) >= 1 && c.count(t.q) >= 1);
    }
    const Broadcast& b = p.broadcasts[trans_id - p.rendezvous.size()];
    return c.count(b.pre) >= 1;
}

std::vector<Step> enabled_steps(const Protocol& p, const Config& c) {
    std::vector<Step> steps;
    for (std::uint32_t i = 0; i < p.rendezvous.size(); ++i) {
        if (transition_enabled(p, c, i)) steps.push_back({i, apply_rendezvous(p, c, i)});
    }
    for (std::uint32_t j = 0; j < p.broadcasts.size(); ++j) {
        std::uint32_t id = static_cast<std::uint32_t>(p.rendezvous.size()) + j;
        if (c.count(p.broadcasts[j].pre) >= 1) steps.push_back({id, apply_broadcast(p, c, j)});
    }
    return steps;
}

bool is_terminal(const Protocol& p, const Config& c) {
    for (const Step& s : enabled_steps(p, c)) {
        if (!(s.successor == c)) return false;
    }
    return true;
}

std::optional<int> classify_consensus(const Protocol& p, const Config& c) {
    if (c.empty()) raise(ErrorCode::EmptyConfiguration, "cannot classify the empty configuration");
    int bit = p.output[c.entries().front().first];
    for (const auto& [q, n] : c.entries()) {
        if (p.output[q] != bit) return std::nullopt;
    }
    return bit;
}

Config initial_configuration(const Protocol& p, const std::vector<std::uint32_t>& input) {
    if (input.size() != p.alphabet.size()) {
        raise(ErrorCode::ArityMismatch,
              "input has " + std::to_string(input.size()) + " components, alphabet has " +
                  std::to_string(p.alphabet.size()));
    }
    std::vector<Config::Entry> entries(p.leaders.entries().begin(), p.leaders.entries().end());
    for (std::size_t i = 0; i < input.size(); ++i) {
        if (input[i] > 0) entries.push_back({p.input_map[i], input[i]});
    }
    Config c = Config::from_entries(std::move(entries));
    if (c.size() < 2) {
        raise(ErrorCode::PopulationTooSmall,
              "initial configuration has " + std::to_string(c.size()) +
                  " agents; populations need at least 2");
    }
    return c;
}

std::vector<Violation> validate(const Protocol& p) {
    std::vector<Violation> out;
    auto fail = [&](const std::string& m) { out.push_back({false, m}); };

    if (p.states.empty()) fail("protocol has no states");
    {
        std::unordered_map<std::string, int> seen;
        for (const auto& s : p.states) {
            if (++seen[s] == 2) fail("duplicate state '" + s + "'");
        }
    }
    {
        std::unordered_map<std::string, int> seen;
        for (const auto& a : p.alphabet) {
            if (++seen[a] == 2) fail("duplicate alphabet symbol '" + a + "'");
        }
    }
    auto known = [&](StateId q) { return q < p.states.size(); };

    if (p.input_map.size() != p.alphabet.size()) {
        fail("input map covers " + std::to_string(p.input_map.size()) + " of " +
             std::to_string(p.alphabet.size()) + " alphabet symbols");
    }
    for (std::size_t i = 0; i < p.input_map.size(); ++i) {
        if (!known(p.input_map[i])) fail("input map for symbol '" + p.alphabet[i] + "' names an unknown state");
    }
    if (p.output.size() != p.states.size()) {
        fail("output map covers " + std::to_string(p.output.size()) + " of " +
             std::to_string(p.states.size()) + " states");
    }
    for (const auto& [q, n] : p.leaders.entries()) {
        if (!known(q)) fail("leader multiset names an unknown state");
    }
    for (std::size_t i = 0; i < p.rendezvous.size(); ++i) {
        const auto& t = p.rendezvous[i];
        if (!known(t.p) || !known(t.q) || !known(t.p2) || !known(t.q2)) {
            fail("rendez-vous r" + std::to_string(i) + " names an unknown state");
        }
    }
    for (std::size_t j = 0; j < p.broadcasts.size(); ++j) {
        const auto& b = p.broadcasts[j];
        if (!known(b.pre) || !known(b.post)) {
            fail("broadcast b" + std::to_string(j) + " names an unknown state");
            continue;
        }
        if (b.transfer >= p.transfers.size()) {
            fail("broadcast b" + std::to_string(j) + " references a missing transfer map");
            continue;
        }
        const auto& f = p.transfers[b.transfer];
        if (f.size() != p.states.size()) {
            for (StateId q = 0; q < p.states.size(); ++q) {
                if (q >= f.size()) {
                    fail("transfer of broadcast b" + std::to_string(j) + " omits state '" +
                         p.states[q] + "'");
                }
            }
        }
        for (StateId q = 0; q < f.size() && q < p.states.size(); ++q) {
            if (!known(f[q])) {
                fail("transfer of broadcast b" + std::to_string(j) + " maps '" + p.states[q] +
                     "' to an unknown state");
            }
        }
    }
    return out;
}

std::string config_to_string(const Protocol& p, const Config& c) {
    std::vector<std::pair<std::string, std::uint32_t>> named;
    named.reserve(c.support_size());
    for (const auto& [q, n] : c.entries()) named.push_back({p.state_name(q), n});
    std::sort(named.begin(), named.end());
    std::string out;
    for (const auto& [name, n] : named) {
        if (!out.empty()) out += ' ';
        out += name + ":" + std::to_string(n);
    }
    return out;
}

StepIndex::StepIndex(const Protocol& p) : protocol_(p) {
    auto pre_key = [](StateId a, StateId b) {
        if (a > b) std::swap(a, b);
        return (std::uint64_t(a) << 32) | b;
    };
    for (std::uint32_t i = 0; i < p.rendezvous.size(); ++i) {
        rv_by_pre_[pre_key(p.rendezvous[i].p, p.rendezvous[i].q)].push_back(i);
    }
    for (std::uint32_t j = 0; j < p.broadcasts.size(); ++j) {
        bc_by_sender_[p.broadcasts[j].pre].push_back(
            static_cast<std::uint32_t>(p.rendezvous.size()) + j);
    }
}

std::vector<std::uint32_t> StepIndex::enabled_ids(const Config& c) const {
    std::vector<std::uint32_t> ids;
    const auto& entries = c.entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        for (std::size_t j = i; j < entries.size(); ++j) {
            std::uint64_t key = (std::uint64_t(entries[i].first) << 32) | entries[j].first;
            auto it = rv_by_pre_.find(key);
            if (it == rv_by_pre_.end()) continue;
            for (std::uint32_t id : it->second) {
                if (transition_enabled(protocol_, c, id)) ids.push_back(id);
            }
        }
        auto bt = bc_by_sender_.find(entries[i].first);
        if (bt != bc_by_sender_.end()) {
            ids.insert(ids.end(), bt->second.begin(), bt->second.end());
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<Step> StepIndex::enabled(const Config& c) const {
    std::vector<Step> steps;
    for (std::uint32_t id : enabled_ids(c)) {
        steps.push_back({id, apply_transition(protocol_, c, id)});
    }
    return steps;
}

bool StepIndex::terminal(const Config& c) const {
    for (std::uint32_t id : enabled_ids(c)) {
        if (!(apply_transition(protocol_, c, id) == c)) return false;
    }
    return true;
}

} // namespace bcp
