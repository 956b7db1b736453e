#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bcp/error.hpp"

namespace bcp {

enum class InsKind { Inc, Dec, Zero, Nonzero, Nop };

struct Instruction {
    InsKind kind;
    std::uint32_t counter = 0;  // ignored for Nop
    bool operator==(const Instruction&) const = default;
};

/// The reverse used when a macro's prefix backs out: inc/dec swap, the
/// guards and nop are their own reverses (they change no counter).
Instruction reverse_instruction(const Instruction& ins);

struct CmTransition {
    std::uint32_t src;
    Instruction ins;
    std::uint32_t dst;
    bool operator==(const CmTransition&) const = default;
};

enum class BoundClass { N, WeakN, Poly };

struct Bound {
    BoundClass cls;
    std::uint32_t degree = 1;  // for Poly
    bool operator==(const Bound&) const = default;
};

class CounterMachine {
  public:
    std::string name;
    std::vector<std::string> counters;
    std::uint32_t input_arity = 0;  // the first input_arity counters are inputs
    std::vector<std::string> states;
    std::uint32_t initial = 0, accept = 0, reject = 0;
    std::optional<Bound> bound;
    std::vector<CmTransition> transitions;

    std::uint32_t state(const std::string& name) const;
    std::optional<std::uint32_t> find_state(const std::string& name) const;
    std::uint32_t counter(const std::string& name) const;
    std::optional<std::uint32_t> find_counter(const std::string& name) const;

    std::uint32_t add_state(const std::string& name);
    std::uint32_t ensure_state(const std::string& name);
    std::uint32_t add_counter(const std::string& name);

  private:
    mutable std::unordered_map<std::string, std::uint32_t> state_index_;
    mutable std::unordered_map<std::string, std::uint32_t> counter_index_;
};

/// Expands `src -[ins_1; ...; ins_k]-> dst`: fresh intermediate states named
/// `<src>#<tag>#<i>`, a forward chain, and reverse edges for the first k-1
/// links so a partially executed macro can always back out.
void add_macro(CounterMachine& m, std::uint32_t src, const std::vector<Instruction>& instrs,
               std::uint32_t dst, const std::string& tag);

struct CmConfig {
    std::uint32_t state;
    std::vector<std::uint32_t> values;
    bool operator==(const CmConfig&) const = default;
};

struct CmConfigHash {
    std::size_t operator()(const CmConfig& c) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ull ^ c.state;
        for (std::uint32_t v : c.values) {
            std::uint64_t x = (h ^ v) * 0xbf58476d1ce4e5b9ull;
            h = x ^ (x >> 31);
        }
        return static_cast<std::size_t>(h);
    }
};

struct CmStep {
    std::uint32_t trans_index;
    CmConfig successor;
};

CmConfig cm_initial(const CounterMachine& m, const std::vector<std::uint32_t>& input);

/// Enabled steps in transition order.
std::vector<CmStep> cm_step(const CounterMachine& m, const CmConfig& c);

std::string cm_config_to_string(const CounterMachine& m, const CmConfig& c);
std::string instruction_to_string(const CounterMachine& m, const Instruction& ins);

struct CmExploreOptions {
    std::uint64_t node_budget = 2'000'000;
    std::optional<std::uint64_t> sum_cap;  // defaults from the declared bound
    // When set, exploration stops at the first configuration violating this
    // bound instead of raising; cm_check_bounded uses it.
    std::optional<Bound> check_bound;
};

struct CmGraph {
    std::vector<CmConfig> configs;                                    // BFS order
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> edges;
    std::optional<std::size_t> violation;  // node violating check_bound, if any
};

/// Derived counter-sum cap for exploring on input of total n.
std::uint64_t cm_sum_cap(const CounterMachine& m, std::uint64_t n, const std::optional<Bound>& b);

CmGraph cm_explore(const CounterMachine& m, const std::vector<std::uint32_t>& input,
                   const CmExploreOptions& options = {});

bool cm_accepts(const CounterMachine& m, const std::vector<std::uint32_t>& input,
                const CmExploreOptions& options = {});

/// True when no reachable configuration accepts and every reachable
/// configuration can still reach the reject state.
bool cm_rejects(const CounterMachine& m, const std::vector<std::uint32_t>& input,
                const CmExploreOptions& options = {});

struct CmComputeRecord {
    std::vector<std::uint32_t> input;
    int expected;
    bool accepts;
    bool rejects;
    bool ok;
};

struct CmComputeReport {
    bool ok;
    std::vector<CmComputeRecord> records;
};

CmComputeReport cm_check_computes(const CounterMachine& m,
                                  const std::vector<std::vector<std::uint32_t>>& inputs,
                                  const std::vector<int>& expected,
                                  const CmExploreOptions& options = {});

struct CmBoundRecord {
    std::vector<std::uint32_t> input;
    bool ok;
    std::optional<CmConfig> violation;
};

struct CmBoundReport {
    bool ok;
    Bound checked;
    std::vector<CmBoundRecord> records;
};

/// Does every configuration reachable on these inputs respect `checked`?
CmBoundReport cm_check_bounded(const CounterMachine& m, const Bound& checked,
                               const std::vector<std::vector<std::uint32_t>>& inputs,
                               const CmExploreOptions& options = {});

struct CmViolation {
    bool warning;
    std::string message;
};

std::vector<CmViolation> validate_machine(const CounterMachine& m);

} // namespace bcp
