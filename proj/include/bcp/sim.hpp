#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bcp/protocol.hpp"

namespace bcp {

/// SplitMix64 (Steele/Lea/Flood): a tiny portable generator with exact 64-bit
/// wraparound semantics, so seeded runs produce identical traces on every
/// platform. bounded(n) draws uniformly from [0, n) by rejection sampling:
/// draw 64 bits, retry while the draw falls below 2^64 mod n, then reduce.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t bounded(std::uint64_t n) {
        std::uint64_t threshold = (0 - n) % n;
        while (true) {
            std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

  private:
    std::uint64_t state_;
};

enum class VerdictKind { Terminal, Stabilized, BudgetExhausted };

const char* verdict_kind_name(VerdictKind kind);

/// Terminal is sound (no step can change the configuration again); Stabilized
/// is the heuristic quiescence verdict (consensus persisted for a full
/// window); BudgetExhausted means neither happened within max_steps.
struct Verdict {
    VerdictKind kind;
    std::optional<int> consensus;
    std::uint64_t at_step = 0;
};

struct TraceStep {
    std::uint32_t trans_id;
    Config config;
};

struct SimOptions {
    std::uint64_t max_steps = 1'000'000;
    /// Consecutive consensus configurations required for Stabilized;
    /// defaults to 10 * |states| * |initial population|.
    std::optional<std::uint64_t> quiescence_window;
    bool record_trace = true;
};

struct SimTrace {
    std::uint64_t seed = 0;
    Config initial;
    std::vector<TraceStep> steps;  // only when record_trace
    std::uint64_t step_count = 0;
    Verdict verdict{VerdictKind::BudgetExhausted, std::nullopt, 0};
};

/// Runs one fair random schedule: each step picks uniformly among the enabled
/// steps. Stops at a terminal configuration, a filled quiescence window
/// (at_step = first step of the stable run), or the step budget.
SimTrace simulate(const Protocol& p, const Config& initial, std::uint64_t seed,
                  const SimOptions& options = {});

struct SimSummary {
    std::uint64_t seed;
    VerdictKind kind;
    std::optional<int> consensus;
    std::uint64_t at_step;
    std::uint64_t step_count;
};

/// Verdict-only runs for many seeds; `jobs` > 1 runs them in parallel with
/// results still ordered by seed position.
std::vector<SimSummary> batch_simulate(const Protocol& p, const Config& initial,
                                       const std::vector<std::uint64_t>& seeds,
                                       const SimOptions& options = {}, unsigned jobs = 1);

/// One line per step: "<step#> <transition-id> <config sorted by state name>".
std::string trace_to_string(const Protocol& p, const SimTrace& trace);

/// Parses trace lines back into steps (inverse of trace_to_string).
std::vector<TraceStep> parse_trace(const Protocol& p, const std::string& text);

/// Re-applies each recorded transition from `initial`, checking every
/// intermediate configuration. Raises on the first divergence.
void replay_trace(const Protocol& p, const Config& initial, const std::vector<TraceStep>& steps);

Config parse_config(const Protocol& p, const std::string& text);

} // namespace bcp
