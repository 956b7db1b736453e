#include "bcp/sim.hpp"

#include <future>
#include <sstream>

#include "bcp/error.hpp"

namespace bcp {

const char* verdict_kind_name(VerdictKind kind) {
    switch (kind) {
        case VerdictKind::Terminal: return "terminal";
        case VerdictKind::Stabilized: return "stabilized";
        case VerdictKind::BudgetExhausted: return "budget-exhausted";
    }
    return "unknown";
}

SimTrace simulate(const Protocol& p, const Config& initial, std::uint64_t seed,
                  const SimOptions& options) {
    SimTrace trace;
    trace.seed = seed;
    trace.initial = initial;

    std::uint64_t window = options.quiescence_window
                               ? *options.quiescence_window
                               : 10 * static_cast<std::uint64_t>(p.states.size()) * initial.size();
    if (window == 0) window = 1;

    SplitMix64 rng(seed);
    StepIndex index(p);
    Config current = initial;

    std::uint64_t run_length = 0;
    int run_bit = -1;

    auto note_consensus = [&](std::uint64_t step) -> std::optional<Verdict> {
        std::optional<int> bit = classify_consensus(p, current);
        if (bit && *bit == run_bit) {
            ++run_length;
        } else if (bit) {
            run_bit = *bit;
            run_length = 1;
        } else {
            run_bit = -1;
            run_length = 0;
        }
        if (run_length >= window) {
            return Verdict{VerdictKind::Stabilized, run_bit, step - (run_length - 1)};
        }
        return std::nullopt;
    };

    for (std::uint64_t step = 0;; ++step) {
        std::vector<std::uint32_t> enabled = index.enabled_ids(current);
        bool terminal = true;
        for (std::uint32_t id : enabled) {
            if (!(apply_transition(p, current, id) == current)) {
                terminal = false;
                break;
            }
        }
        if (terminal) {
            trace.verdict = {VerdictKind::Terminal, classify_consensus(p, current), step};
            trace.step_count = step;
            return trace;
        }
        if (auto verdict = note_consensus(step)) {
            trace.verdict = *verdict;
            trace.step_count = step;
            return trace;
        }
        if (step >= options.max_steps) {
            trace.verdict = {VerdictKind::BudgetExhausted, classify_consensus(p, current), step};
            trace.step_count = step;
            return trace;
        }
        std::uint32_t chosen = enabled[rng.bounded(enabled.size())];
        current = apply_transition(p, current, chosen);
        if (options.record_trace) trace.steps.push_back({chosen, current});
    }
}

std::vector<SimSummary> batch_simulate(const Protocol& p, const Config& initial,
                                       const std::vector<std::uint64_t>& seeds,
                                       const SimOptions& options, unsigned jobs) {
    SimOptions local = options;
    local.record_trace = false;

    auto run_one = [&](std::uint64_t seed) {
        SimTrace t = simulate(p, initial, seed, local);
        return SimSummary{seed, t.verdict.kind, t.verdict.consensus, t.verdict.at_step,
                          t.step_count};
    };

    std::vector<SimSummary> out(seeds.size(), SimSummary{});
    if (jobs <= 1 || seeds.size() <= 1) {
        for (std::size_t i = 0; i < seeds.size(); ++i) out[i] = run_one(seeds[i]);
        return out;
    }
    std::vector<std::future<void>> workers;
    std::size_t stride = jobs;
    for (std::size_t w = 0; w < stride; ++w) {
        workers.push_back(std::async(std::launch::async, [&, w]() {
            for (std::size_t i = w; i < seeds.size(); i += stride) out[i] = run_one(seeds[i]);
        }));
    }
    for (auto& f : workers) f.get();
    return out;
}

std::string trace_to_string(const Protocol& p, const SimTrace& trace) {
    std::ostringstream out;
    std::uint64_t step = 0;
    for (const TraceStep& s : trace.steps) {
        out << ++step << " " << p.transition_label(s.trans_id) << " "
            << config_to_string(p, s.config) << "\n";
    }
    return out.str();
}

Config parse_config(const Protocol& p, const std::string& text) {
    std::istringstream in(text);
    std::string tok;
    std::vector<Config::Entry> entries;
    while (in >> tok) {
        auto colon = tok.rfind(':');
        if (colon == std::string::npos || colon + 1 == tok.size()) {
            raise(ErrorCode::ParseError, "bad configuration entry '" + tok + "'");
        }
        std::uint32_t count = 0;
        try {
            count = static_cast<std::uint32_t>(std::stoul(tok.substr(colon + 1)));
        } catch (const std::exception&) {
            raise(ErrorCode::ParseError, "bad count in configuration entry '" + tok + "'");
        }
        entries.push_back({p.state(tok.substr(0, colon)), count});
    }
    return Config::from_entries(std::move(entries));
}

std::vector<TraceStep> parse_trace(const Protocol& p, const std::string& text) {
    std::vector<TraceStep> steps;
    std::istringstream in(text);
    std::string line;
    std::uint64_t expected_step = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::uint64_t number = 0;
        std::string label;
        if (!(ls >> number >> label)) {
            raise(ErrorCode::ParseError, "bad trace line '" + line + "'");
        }
        if (number != ++expected_step) {
            raise(ErrorCode::ParseError, "trace step numbers must be 1,2,...; got " +
                                             std::to_string(number));
        }
        if (label.size() < 2 || (label[0] != 'r' && label[0] != 'b')) {
            raise(ErrorCode::ParseError, "bad transition label '" + label + "'");
        }
        std::uint32_t index = 0;
        try {
            index = static_cast<std::uint32_t>(std::stoul(label.substr(1)));
        } catch (const std::exception&) {
            raise(ErrorCode::ParseError, "bad transition label '" + label + "'");
        }
        std::uint32_t trans_id = label[0] == 'r'
                                     ? index
                                     : index + static_cast<std::uint32_t>(p.rendezvous.size());
        if (trans_id >= p.transition_count()) {
            raise(ErrorCode::UnknownName, "trace names transition '" + label +
                                              "' which the protocol does not have");
        }
        std::string rest;
        std::getline(ls, rest);
        steps.push_back({trans_id, parse_config(p, rest)});
    }
    return steps;
}

void replay_trace(const Protocol& p, const Config& initial, const std::vector<TraceStep>& steps) {
    Config current = initial;
    std::uint64_t step = 0;
    for (const TraceStep& s : steps) {
        ++step;
        Config next = apply_transition(p, current, s.trans_id);  // raises if not enabled
        if (!(next == s.config)) {
            raise(ErrorCode::NotEnabled,
                  "replay diverged at step " + std::to_string(step) + ": expected " +
                      config_to_string(p, s.config) + ", got " + config_to_string(p, next));
        }
        current = next;
    }
}

} // namespace bcp
