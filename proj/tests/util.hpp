#pragma once

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "bcp/machine.hpp"
#include "bcp/protocol.hpp"

namespace testutil {

/// Configuration literal by state name, e.g. cfg(p, {{"x", 4}}).
inline bcp::Config cfg(const bcp::Protocol& p,
                       std::initializer_list<std::pair<std::string, std::uint32_t>> entries) {
    std::vector<bcp::Config::Entry> es;
    for (const auto& [name, count] : entries) es.push_back({p.state(name), count});
    return bcp::Config::from_entries(std::move(es));
}

/// Field-by-field equality; the types have no operator== of their own.
inline bool same_protocol(const bcp::Protocol& a, const bcp::Protocol& b) {
    return a.name == b.name && a.states == b.states && a.alphabet == b.alphabet &&
           a.input_map == b.input_map && a.leaders == b.leaders && a.output == b.output &&
           a.rendezvous == b.rendezvous && a.broadcasts == b.broadcasts &&
           a.transfers == b.transfers && a.notes == b.notes;
}

inline bool same_machine(const bcp::CounterMachine& a, const bcp::CounterMachine& b) {
    return a.name == b.name && a.states == b.states && a.counters == b.counters &&
           a.input_arity == b.input_arity && a.initial == b.initial && a.accept == b.accept &&
           a.reject == b.reject && a.transitions == b.transitions && a.bound == b.bound;
}

/// "(2,1)" rendering of an input vector for test failure messages.
inline std::string show(const std::vector<std::uint32_t>& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s + ")";
}

} // namespace testutil
