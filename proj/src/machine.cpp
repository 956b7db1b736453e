#include "bcp/machine.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace bcp {

Instruction reverse_instruction(const Instruction& ins) {
    switch (ins.kind) {
        case InsKind::Inc: return {InsKind::Dec, ins.counter};
        case InsKind::Dec: return {InsKind::Inc, ins.counter};
        default: return ins;
    }
}

std::uint32_t CounterMachine::state(const std::string& name) const {
    auto id = find_state(name);
    if (!id) raise(ErrorCode::UnknownName, "unknown state '" + name + "' in machine '" + this->name + "'");
    return *id;
}

std::optional<std::uint32_t> CounterMachine::find_state(const std::string& name) const {
    if (state_index_.size() != states.size()) {
        state_index_.clear();
        for (std::uint32_t i = 0; i < states.size(); ++i) state_index_.emplace(states[i], i);
    }
    auto it = state_index_.find(name);
    if (it == state_index_.end()) return std::nullopt;
    return it->second;
}

std::uint32_t CounterMachine::counter(const std::string& name) const {
    auto id = find_counter(name);
    if (!id) raise(ErrorCode::UnknownName, "unknown counter '" + name + "' in machine '" + this->name + "'");
    return *id;
}

std::optional<std::uint32_t> CounterMachine::find_counter(const std::string& name) const {
    if (counter_index_.size() != counters.size()) {
        counter_index_.clear();
        for (std::uint32_t i = 0; i < counters.size(); ++i) counter_index_.emplace(counters[i], i);
    }
    auto it = counter_index_.find(name);
    if (it == counter_index_.end()) return std::nullopt;
    return it->second;
}

std::uint32_t CounterMachine::add_state(const std::string& name) {
    if (find_state(name)) raise(ErrorCode::DuplicateName, "duplicate state '" + name + "'");
    states.push_back(name);
    std::uint32_t id = static_cast<std::uint32_t>(states.size() - 1);
    state_index_.emplace(name, id);
    return id;
}

std::uint32_t CounterMachine::ensure_state(const std::string& name) {
    if (auto id = find_state(name)) return *id;
    return add_state(name);
}

std::uint32_t CounterMachine::add_counter(const std::string& name) {
    if (find_counter(name)) raise(ErrorCode::DuplicateName, "duplicate counter '" + name + "'");
    counters.push_back(name);
    std::uint32_t id = static_cast<std::uint32_t>(counters.size() - 1);
    counter_index_.emplace(name, id);
    return id;
}

void add_macro(CounterMachine& m, std::uint32_t src, const std::vector<Instruction>& instrs,
               std::uint32_t dst, const std::string& tag) {
    if (instrs.empty()) raise(ErrorCode::ParseError, "macro transition with no instructions");
    std::uint32_t at = src;
    for (std::size_t i = 0; i < instrs.size(); ++i) {
        std::uint32_t next;
        if (i + 1 == instrs.size()) {
            next = dst;
        } else {
            next = m.add_state(m.states[src] + "#" + tag + "#" + std::to_string(i + 1));
        }
        m.transitions.push_back({at, instrs[i], next});
        if (i + 1 != instrs.size()) {
            m.transitions.push_back({next, reverse_instruction(instrs[i]), at});
        }
        at = next;
    }
}

CmConfig cm_initial(const CounterMachine& m, const std::vector<std::uint32_t>& input) {
    if (input.size() != m.input_arity) {
        raise(ErrorCode::ArityMismatch,
              "input has " + std::to_string(input.size()) + " components, machine arity is " +
                  std::to_string(m.input_arity));
    }
    CmConfig c;
    c.state = m.initial;
    c.values.assign(m.counters.size(), 0);
    for (std::size_t i = 0; i < input.size(); ++i) c.values[i] = input[i];
    return c;
}

std::vector<CmStep> cm_step(const CounterMachine& m, const CmConfig& c) {
    std::vector<CmStep> steps;
    for (std::uint32_t i = 0; i < m.transitions.size(); ++i) {
        const CmTransition& t = m.transitions[i];
        if (t.src != c.state) continue;
        const Instruction& ins = t.ins;
        switch (ins.kind) {
            case InsKind::Inc: {
                CmConfig next{t.dst, c.values};
                next.values[ins.counter] += 1;
                steps.push_back({i, std::move(next)});
                break;
            }
            case InsKind::Dec: {
                if (c.values[ins.counter] == 0) break;
                CmConfig next{t.dst, c.values};
                next.values[ins.counter] -= 1;
                steps.push_back({i, std::move(next)});
                break;
            }
            case InsKind::Zero:
                if (c.values[ins.counter] == 0) steps.push_back({i, {t.dst, c.values}});
                break;
            case InsKind::Nonzero:
                if (c.values[ins.counter] > 0) steps.push_back({i, {t.dst, c.values}});
                break;
            case InsKind::Nop:
                steps.push_back({i, {t.dst, c.values}});
                break;
        }
    }
    return steps;
}

std::string instruction_to_string(const CounterMachine& m, const Instruction& ins) {
    switch (ins.kind) {
        case InsKind::Inc: return "inc(" + m.counters[ins.counter] + ")";
        case InsKind::Dec: return "dec(" + m.counters[ins.counter] + ")";
        case InsKind::Zero: return "zero(" + m.counters[ins.counter] + ")";
        case InsKind::Nonzero: return "nonzero(" + m.counters[ins.counter] + ")";
        case InsKind::Nop: return "nop";
    }
    return "nop";
}

std::string cm_config_to_string(const CounterMachine& m, const CmConfig& c) {
    std::string out = m.states[c.state];
    for (std::size_t i = 0; i < c.values.size(); ++i) {
        out += " " + m.counters[i] + "=" + std::to_string(c.values[i]);
    }
    return out;
}

std::uint64_t cm_sum_cap(const CounterMachine& m, std::uint64_t n, const std::optional<Bound>& b) {
    if (!b) return std::max<std::uint64_t>(n, 1);
    switch (b->cls) {
        case BoundClass::N: return std::max<std::uint64_t>(n, 1);
        case BoundClass::WeakN: return std::max<std::uint64_t>(n * m.counters.size(), 1);
        case BoundClass::Poly: {
            std::uint64_t cap = 1;
            for (std::uint32_t i = 0; i < b->degree; ++i) cap *= std::max<std::uint64_t>(n, 1);
            return std::max<std::uint64_t>(cap, n);
        }
    }
    return n;
}

namespace {

bool respects_bound(const CmConfig& c, const Bound& b, std::uint64_t n) {
    std::uint64_t sum = 0;
    for (std::uint32_t v : c.values) sum += v;
    switch (b.cls) {
        case BoundClass::N: return sum <= n;
        case BoundClass::WeakN: {
            for (std::uint32_t v : c.values) {
                if (v > n) return false;
            }
            return true;
        }
        case BoundClass::Poly: {
            std::uint64_t cap = 1;
            for (std::uint32_t i = 0; i < b.degree; ++i) cap *= n;
            return sum <= cap;
        }
    }
    return true;
}

} // namespace

CmGraph cm_explore(const CounterMachine& m, const std::vector<std::uint32_t>& input,
                   const CmExploreOptions& options) {
    std::uint64_t n = 0;
    for (std::uint32_t v : input) n += v;
    std::uint64_t cap = options.sum_cap ? *options.sum_cap : cm_sum_cap(m, n, m.bound);

    CmGraph g;
    std::unordered_map<CmConfig, std::uint32_t, CmConfigHash> seen;
    std::deque<std::uint32_t> queue;

    auto intern = [&](CmConfig c) -> std::uint32_t {
        auto it = seen.find(c);
        if (it != seen.end()) return it->second;
        std::uint32_t id = static_cast<std::uint32_t>(g.configs.size());
        if (id >= options.node_budget) {
            raise(ErrorCode::BudgetExceeded,
                  "machine exploration exceeded the node budget of " +
                      std::to_string(options.node_budget));
        }
        seen.emplace(c, id);
        g.configs.push_back(std::move(c));
        g.edges.emplace_back();
        queue.push_back(id);
        return id;
    };

    std::uint32_t root = intern(cm_initial(m, input));
    (void)root;

    while (!queue.empty()) {
        std::uint32_t id = queue.front();
        queue.pop_front();

        if (options.check_bound && !respects_bound(g.configs[id], *options.check_bound, n)) {
            g.violation = id;
            return g;
        }
        std::uint64_t sum = 0;
        for (std::uint32_t v : g.configs[id].values) sum += v;
        if (sum > cap) {
            raise(ErrorCode::BudgetExceeded,
                  "configuration " + cm_config_to_string(m, g.configs[id]) +
                      " exceeds the counter-sum cap of " + std::to_string(cap) +
                      "; the machine violates its declared bound");
        }

        for (CmStep& s : cm_step(m, g.configs[id])) {
            std::uint32_t succ = intern(std::move(s.successor));
            g.edges[id].push_back({s.trans_index, succ});
        }
    }
    return g;
}

bool cm_accepts(const CounterMachine& m, const std::vector<std::uint32_t>& input,
                const CmExploreOptions& options) {
    CmGraph g = cm_explore(m, input, options);
    for (const CmConfig& c : g.configs) {
        if (c.state == m.accept) return true;
    }
    return false;
}

bool cm_rejects(const CounterMachine& m, const std::vector<std::uint32_t>& input,
                const CmExploreOptions& options) {
    CmGraph g = cm_explore(m, input, options);
    std::vector<std::vector<std::uint32_t>> reverse(g.configs.size());
    for (std::uint32_t u = 0; u < g.edges.size(); ++u) {
        for (const auto& [t, v] : g.edges[u]) reverse[v].push_back(u);
    }
    std::vector<char> co_reaches(g.configs.size(), 0);
    std::deque<std::uint32_t> queue;
    for (std::uint32_t u = 0; u < g.configs.size(); ++u) {
        if (g.configs[u].state == m.accept) return false;
        if (g.configs[u].state == m.reject) {
            co_reaches[u] = 1;
            queue.push_back(u);
        }
    }
    while (!queue.empty()) {
        std::uint32_t v = queue.front();
        queue.pop_front();
        for (std::uint32_t u : reverse[v]) {
            if (!co_reaches[u]) {
                co_reaches[u] = 1;
                queue.push_back(u);
            }
        }
    }
    for (char flag : co_reaches) {
        if (!flag) return false;
    }
    return true;
}

CmComputeReport cm_check_computes(const CounterMachine& m,
                                  const std::vector<std::vector<std::uint32_t>>& inputs,
                                  const std::vector<int>& expected,
                                  const CmExploreOptions& options) {
    CmComputeReport report;
    report.ok = true;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        CmComputeRecord rec;
        rec.input = inputs[i];
        rec.expected = expected[i];
        rec.accepts = cm_accepts(m, inputs[i], options);
        rec.rejects = cm_rejects(m, inputs[i], options);
        rec.ok = rec.expected == 1 ? (rec.accepts && !rec.rejects) : (rec.rejects && !rec.accepts);
        report.ok = report.ok && rec.ok;
        report.records.push_back(std::move(rec));
    }
    return report;
}

CmBoundReport cm_check_bounded(const CounterMachine& m, const Bound& checked,
                               const std::vector<std::vector<std::uint32_t>>& inputs,
                               const CmExploreOptions& options) {
    CmBoundReport report;
    report.ok = true;
    report.checked = checked;
    for (const auto& input : inputs) {
        CmExploreOptions local = options;
        local.check_bound = checked;
        if (!local.sum_cap) {
            // Explore under the declared bound's cap, or generously under the
            // checked bound's own cap, so violations surface instead of raising.
            std::uint64_t n = 0;
            for (std::uint32_t v : input) n += v;
            std::uint64_t declared = cm_sum_cap(m, n, m.bound);
            std::uint64_t wanted = cm_sum_cap(m, n, checked);
            local.sum_cap = std::max(declared, wanted) + m.counters.size() + 2;
        }
        CmGraph g = cm_explore(m, input, local);
        CmBoundRecord rec;
        rec.input = input;
        rec.ok = !g.violation.has_value();
        if (g.violation) rec.violation = g.configs[*g.violation];
        report.ok = report.ok && rec.ok;
        report.records.push_back(std::move(rec));
    }
    return report;
}

std::vector<CmViolation> validate_machine(const CounterMachine& m) {
    std::vector<CmViolation> out;
    auto fail = [&](const std::string& msg) { out.push_back({false, msg}); };
    auto warn = [&](const std::string& msg) { out.push_back({true, msg}); };

    if (m.states.empty()) fail("machine has no states");
    {
        std::unordered_map<std::string, int> seen;
        for (const auto& s : m.states) {
            if (++seen[s] == 2) fail("duplicate state '" + s + "'");
        }
    }
    {
        std::unordered_map<std::string, int> seen;
        for (const auto& x : m.counters) {
            if (++seen[x] == 2) fail("duplicate counter '" + x + "'");
        }
    }
    if (m.input_arity > m.counters.size()) {
        fail("input arity " + std::to_string(m.input_arity) + " exceeds counter count " +
             std::to_string(m.counters.size()));
    }
    auto known_state = [&](std::uint32_t q) { return q < m.states.size(); };
    if (!known_state(m.initial)) fail("initial state out of range");
    if (!known_state(m.accept)) fail("accept state out of range");
    if (!known_state(m.reject)) fail("reject state out of range");
    if (m.bound && m.bound->cls == BoundClass::Poly && m.bound->degree == 0) {
        fail("polynomial bound must have degree at least 1");
    }
    for (std::size_t i = 0; i < m.transitions.size(); ++i) {
        const CmTransition& t = m.transitions[i];
        if (!known_state(t.src) || !known_state(t.dst)) {
            fail("transition " + std::to_string(i) + " names an unknown state");
            continue;
        }
        if (t.ins.kind != InsKind::Nop && t.ins.counter >= m.counters.size()) {
            fail("transition " + std::to_string(i) + " names an unknown counter");
            continue;
        }
        if (known_state(m.accept) && t.src == m.accept) {
            warn("accept state '" + m.states[m.accept] + "' has an outgoing transition");
        }
        if (known_state(m.reject) && t.src == m.reject) {
            warn("reject state '" + m.states[m.reject] + "' has an outgoing transition");
        }
    }
    return out;
}

} // namespace bcp
