#include <atomic>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bcp/bounding.hpp"
#include "bcp/compile.hpp"
#include "bcp/error.hpp"
#include "bcp/machine.hpp"
#include "bcp/oracle.hpp"
#include "bcp/protocol.hpp"
#include "bcp/sim.hpp"
#include "bcp/text.hpp"
#include "bcp/transforms.hpp"
#include "bcp/verify.hpp"

using json = nlohmann::ordered_json;
using namespace bcp;

namespace {

// Exit codes: 0 = operation succeeded and every check passed, 1 = some
// verification check failed (reports written), 2 = usage, parse, or input
// problems, 3 = an exploration or step budget ran out.
enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kBudget = 3 };

constexpr const char* kVersion = "bcp 0.1.0";

/// One report line per record, to a file when a path was given, else stdout.
class ReportSink {
  public:
    explicit ReportSink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) raise(ErrorCode::IoError, "cannot open report file '" + path + "'");
        }
    }

    void line(const json& record) { (file_.is_open() ? file_ : std::cout) << record.dump() << "\n"; }

  private:
    std::ofstream file_;
};

std::vector<std::uint32_t> parse_point(const std::string& text) {
    std::vector<std::uint32_t> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::string tok = text.substr(start, comma == std::string::npos ? comma : comma - start);
        try {
            std::size_t used = 0;
            unsigned long v = std::stoul(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            out.push_back(static_cast<std::uint32_t>(v));
        } catch (const std::exception&) {
            raise(ErrorCode::ParseError, "bad input component '" + tok + "' in '" + text + "'");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

Oracle resolve_oracle(const std::string& builtin, const std::string& machine_file) {
    if (!builtin.empty() && !machine_file.empty()) {
        raise(ErrorCode::ParseError, "give either --builtin or --oracle, not both");
    }
    if (!builtin.empty()) return builtin_oracle(builtin);
    if (machine_file.empty()) {
        raise(ErrorCode::ParseError, "an oracle is required: --builtin <spec> or --oracle <cm-file>");
    }
    auto m = std::make_shared<CounterMachine>(load_machine_file(machine_file));
    return Oracle{m->name, m->input_arity, [m](const std::vector<std::uint32_t>& input) {
                      return cm_accepts(*m, input) ? 1 : 0;
                  }};
}

/// Runs fn(0..count) across `jobs` workers; fn must not throw.
template <typename Fn>
void for_each_index(std::size_t count, unsigned jobs, Fn&& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> cursor{0};
    std::vector<std::thread> pool;
    unsigned width = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
    for (unsigned t = 0; t < width; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = cursor.fetch_add(1); i < count; i = cursor.fetch_add(1)) fn(i);
        });
    }
    for (std::thread& th : pool) th.join();
}

json check_record(const Protocol& p, const std::vector<std::uint32_t>& input,
                  const std::string& mode, int expected, const CheckResult& r) {
    json rec;
    rec["input"] = input;
    rec["mode"] = mode;
    rec["expected"] = expected;
    rec["ok"] = r.ok;
    rec["nodes"] = r.nodes;
    rec["bottom_sccs"] = r.bottom_count;
    if (!r.ok) {
        rec["reason"] = r.reason;
        if (r.witness_target) {
            rec["witness_target"] = config_to_string(p, *r.witness_target);
            json path = json::array();
            for (const TraceStep& s : r.witness) {
                path.push_back({{"trans", p.transition_label(s.trans_id)},
                                {"config", config_to_string(p, s.config)}});
            }
            rec["witness"] = path;
        }
    }
    return rec;
}

using CheckFn = CheckResult (*)(const Protocol&, const std::vector<std::uint32_t>&, int,
                                const VerifyOptions&);

CheckFn mode_fn(const std::string& mode) {
    if (mode == "computes") return &check_computes;
    if (mode == "silent") return &check_silently_computes;
    if (mode == "semi") return &check_semi_computes;
    raise(ErrorCode::ParseError, "unknown mode '" + mode + "'");
}

/// Checks every input against the oracle, in parallel, reporting in input
/// order. Returns kOk or kCheckFailed; worker exceptions are rethrown in
/// input order.
int run_checks(const Protocol& p, const std::string& mode, const Oracle& oracle,
               const std::vector<std::vector<std::uint32_t>>& inputs, const VerifyOptions& options,
               unsigned jobs, ReportSink& sink) {
    CheckFn fn = mode_fn(mode);
    struct Slot {
        json record;
        bool failed = false;
        std::exception_ptr error;
    };
    std::vector<Slot> slots(inputs.size());
    for_each_index(inputs.size(), jobs, [&](std::size_t i) {
        try {
            int expected = oracle(inputs[i]);
            CheckResult r = fn(p, inputs[i], expected, options);
            slots[i].record = check_record(p, inputs[i], mode, expected, r);
            slots[i].failed = !r.ok;
        } catch (const Error& e) {
            // Ranges like (0,0)..(3,3) legitimately contain inputs whose
            // population is below the model's minimum of two agents.
            if (e.code() == ErrorCode::PopulationTooSmall) {
                slots[i].record = {{"input", inputs[i]}, {"mode", mode},
                                   {"skipped", "population too small"}};
            } else {
                slots[i].error = std::current_exception();
            }
        } catch (...) {
            slots[i].error = std::current_exception();
        }
    });
    int rc = kOk;
    for (const Slot& s : slots) {
        if (s.error) std::rethrow_exception(s.error);
        sink.line(s.record);
        if (s.failed) rc = kCheckFailed;
    }
    return rc;
}

std::string bound_token(const std::optional<Bound>& b) {
    if (!b) return "none";
    switch (b->cls) {
        case BoundClass::N: return "n";
        case BoundClass::WeakN: return "weak-n";
        case BoundClass::Poly: return "poly " + std::to_string(b->degree);
    }
    return "none";
}

Bound parse_bound_token(const std::string& text) {
    if (text == "n") return {BoundClass::N, 1};
    if (text == "weak-n") return {BoundClass::WeakN, 1};
    if (text.rfind("poly:", 0) == 0) {
        try {
            std::size_t used = 0;
            unsigned long d = std::stoul(text.substr(5), &used);
            if (used == text.size() - 5 && d > 0) {
                return {BoundClass::Poly, static_cast<std::uint32_t>(d)};
            }
        } catch (const std::exception&) {
        }
    }
    raise(ErrorCode::ParseError, "bad bound '" + text + "'; expected n, weak-n, or poly:<c>");
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

int guarded(const std::function<int()>& action) {
    try {
        return action();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << " [" << error_code_name(e.code()) << "]\n";
        return e.code() == ErrorCode::BudgetExceeded ? kBudget : kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"workbench for broadcast consensus protocols"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    unsigned jobs = 1;
    std::uint64_t budget = 0;  // 0 = library defaults
    app.add_option("--jobs", jobs, "parallel workers for per-input checks")->capture_default_str();
    app.add_option("--budget", budget, "node budget for graph exploration (0 = default)");

    auto verify_options = [&] {
        VerifyOptions o;
        if (budget > 0) o.node_budget = budget;
        return o;
    };
    auto explore_options = [&] {
        CmExploreOptions o;
        if (budget > 0) o.node_budget = budget;
        return o;
    };

    std::function<int()> action;

    // validate
    std::string va_file;
    auto* va = app.add_subcommand("validate", "structural checks for a .bcp or .cm file");
    va->add_option("file", va_file, "protocol (.bcp) or machine (.cm) file")->required();
    va->callback([&] {
        action = [&]() -> int {
            ReportSink sink("");
            int rc = kOk;
            std::size_t count = 0;
            auto emit = [&](bool warning, const std::string& message) {
                sink.line({{"warning", warning}, {"message", message}});
                ++count;
                if (!warning) rc = kCheckFailed;
            };
            if (has_suffix(va_file, ".cm")) {
                CounterMachine m = load_machine_file(va_file);
                for (const CmViolation& v : validate_machine(m)) emit(v.warning, v.message);
                sink.line({{"file", va_file}, {"machine", m.name}, {"violations", count},
                           {"ok", rc == kOk}});
            } else {
                Protocol p = load_protocol_file(va_file);
                for (const Violation& v : validate(p)) emit(v.warning, v.message);
                sink.line({{"file", va_file}, {"protocol", p.name}, {"violations", count},
                           {"ok", rc == kOk}});
            }
            return rc;
        };
    });

    // simulate
    std::string si_file, si_input, si_trace;
    std::uint64_t si_seed = 0, si_max_steps = 1'000'000, si_window = 0;
    auto* si = app.add_subcommand("simulate", "one seeded random fair run");
    si->add_option("file", si_file, "protocol file")->required();
    si->add_option("--input", si_input, "input vector, e.g. 4 or 2,3")->required();
    si->add_option("--seed", si_seed, "random seed")->capture_default_str();
    si->add_option("--max-steps", si_max_steps, "step budget")->capture_default_str();
    si->add_option("--window", si_window,
                   "consensus steps before declaring stabilization (0 = 10*|Q|*|C0|)");
    si->add_option("--trace", si_trace, "write the full step trace to this file");
    si->callback([&] {
        action = [&]() -> int {
            Protocol p = load_protocol_file(si_file);
            std::vector<std::uint32_t> input = parse_point(si_input);
            SimOptions opts;
            opts.max_steps = si_max_steps;
            if (si_window > 0) opts.quiescence_window = si_window;
            opts.record_trace = !si_trace.empty();
            SimTrace t = simulate(p, initial_configuration(p, input), si_seed, opts);
            if (!si_trace.empty()) write_file(si_trace, trace_to_string(p, t));
            json rec;
            rec["protocol"] = p.name;
            rec["input"] = input;
            rec["seed"] = si_seed;
            rec["verdict"] = verdict_kind_name(t.verdict.kind);
            rec["consensus"] = t.verdict.consensus ? json(*t.verdict.consensus) : json(nullptr);
            rec["at_step"] = t.verdict.at_step;
            rec["steps"] = t.step_count;
            ReportSink sink("");
            sink.line(rec);
            return t.verdict.kind == VerdictKind::BudgetExhausted ? kBudget : kOk;
        };
    });

    // verify
    std::string ve_file, ve_mode = "computes", ve_builtin, ve_oracle, ve_inputs, ve_report;
    auto* ve = app.add_subcommand("verify", "exhaustive verification against an oracle");
    ve->add_option("file", ve_file, "protocol file")->required();
    ve->add_option("--mode", ve_mode, "computes, silent, or semi")
        ->check(CLI::IsMember({"computes", "silent", "semi"}))
        ->capture_default_str();
    ve->add_option("--builtin", ve_builtin, "builtin oracle, e.g. power2 or threshold:3");
    ve->add_option("--oracle", ve_oracle, "counter machine file to use as the oracle");
    ve->add_option("--inputs", ve_inputs, "input range: 2..9, (0,0)..(3,3), or a point")
        ->required();
    ve->add_option("--report", ve_report, "write report lines here instead of stdout");
    ve->callback([&] {
        action = [&]() -> int {
            Protocol p = load_protocol_file(ve_file);
            Oracle oracle = resolve_oracle(ve_builtin, ve_oracle);
            std::vector<std::vector<std::uint32_t>> inputs = parse_input_range(ve_inputs);
            ReportSink sink(ve_report);
            return run_checks(p, ve_mode, oracle, inputs, verify_options(), jobs, sink);
        };
    });

    // cm run | check | bound
    auto* cm = app.add_subcommand("cm", "counter machine tools");
    cm->require_subcommand(1);
    cm->fallthrough();

    std::string cr_file, cr_inputs;
    auto* cr = cm->add_subcommand("run", "explore the reachable configurations per input");
    cr->add_option("file", cr_file, "machine file")->required();
    cr->add_option("--inputs", cr_inputs, "input range")->required();
    cr->callback([&] {
        action = [&]() -> int {
            CounterMachine m = load_machine_file(cr_file);
            ReportSink sink("");
            for (const auto& input : parse_input_range(cr_inputs)) {
                CmGraph g = cm_explore(m, input, explore_options());
                std::size_t edge_count = 0;
                for (const auto& es : g.edges) edge_count += es.size();
                json rec;
                rec["input"] = input;
                rec["configs"] = g.configs.size();
                rec["edges"] = edge_count;
                rec["accepts"] = cm_accepts(m, input, explore_options());
                rec["rejects"] = cm_rejects(m, input, explore_options());
                sink.line(rec);
            }
            return kOk;
        };
    });

    std::string cc_file, cc_builtin, cc_oracle, cc_inputs, cc_report;
    auto* cc = cm->add_subcommand("check", "compare accept/reject behaviour with an oracle");
    cc->add_option("file", cc_file, "machine file")->required();
    cc->add_option("--builtin", cc_builtin, "builtin oracle spec");
    cc->add_option("--oracle", cc_oracle, "counter machine file to use as the oracle");
    cc->add_option("--inputs", cc_inputs, "input range")->required();
    cc->add_option("--report", cc_report, "write report lines here instead of stdout");
    cc->callback([&] {
        action = [&]() -> int {
            CounterMachine m = load_machine_file(cc_file);
            Oracle oracle = resolve_oracle(cc_builtin, cc_oracle);
            std::vector<std::vector<std::uint32_t>> inputs = parse_input_range(cc_inputs);
            std::vector<int> expected;
            expected.reserve(inputs.size());
            for (const auto& input : inputs) expected.push_back(oracle(input));
            CmComputeReport report = cm_check_computes(m, inputs, expected, explore_options());
            ReportSink sink(cc_report);
            for (const CmComputeRecord& r : report.records) {
                sink.line({{"input", r.input}, {"expected", r.expected}, {"accepts", r.accepts},
                           {"rejects", r.rejects}, {"ok", r.ok}});
            }
            return report.ok ? kOk : kCheckFailed;
        };
    });

    std::string cb_file, cb_inputs, cb_check;
    auto* cb = cm->add_subcommand("bound", "check a resource bound over the reachable set");
    cb->add_option("file", cb_file, "machine file")->required();
    cb->add_option("--inputs", cb_inputs, "input range")->required();
    cb->add_option("--check", cb_check, "bound to check: n, weak-n, poly:<c> (default: declared)");
    cb->callback([&] {
        action = [&]() -> int {
            CounterMachine m = load_machine_file(cb_file);
            Bound checked;
            if (!cb_check.empty()) {
                checked = parse_bound_token(cb_check);
            } else if (m.bound) {
                checked = *m.bound;
            } else {
                raise(ErrorCode::MissingBoundDeclaration,
                      "machine declares no bound; pass --check");
            }
            CmBoundReport report = cm_check_bounded(m, checked, parse_input_range(cb_inputs),
                                                    explore_options());
            ReportSink sink("");
            for (const CmBoundRecord& r : report.records) {
                json rec;
                rec["input"] = r.input;
                rec["bound"] = bound_token(checked);
                rec["ok"] = r.ok;
                if (r.violation) rec["violation"] = cm_config_to_string(m, *r.violation);
                sink.line(rec);
            }
            return report.ok ? kOk : kCheckFailed;
        };
    });

    // bound weaken | tighten
    auto* bo = app.add_subcommand("bound", "rewrite a machine to a tighter bound class");
    bo->require_subcommand(1);
    bo->fallthrough();
    std::string bw_file, bw_out;
    for (const char* which : {"weaken", "tighten"}) {
        auto* sub = bo->add_subcommand(
            which, std::string(which) == "weaken" ? "poly bound to weak-n (digit counters)"
                                                  : "weak-n bound to n (subset token pools)");
        sub->add_option("file", bw_file, "machine file")->required();
        sub->add_option("-o,--output", bw_out, "where to write the rewritten machine")
            ->required();
        std::string name = which;
        sub->callback([&, name] {
            action = [&, name]() -> int {
                CounterMachine m = load_machine_file(bw_file);
                CounterMachine out = name == "weaken" ? weaken(m) : tighten(m);
                write_file(bw_out, serialize_machine(out));
                ReportSink sink("");
                sink.line({{"machine", out.name}, {"bound", bound_token(out.bound)},
                           {"counters", out.counters.size()}, {"states", out.states.size()},
                           {"transitions", out.transitions.size()}, {"output", bw_out}});
                return kOk;
            };
        });
    }

    // compile
    std::string co_pos, co_neg, co_out, co_builtin, co_oracle, co_inputs, co_report;
    bool co_skip = false, co_verify = false;
    auto* co = app.add_subcommand("compile",
                                  "machine pair to a silent protocol (lower, compile, compose)");
    co->add_option("file", co_pos, "machine for the predicate")->required();
    co->add_option("--neg", co_neg, "machine for the negation")->required();
    co->add_flag("--skip-bounding", co_skip, "machines are already n-bounded; compile directly");
    co->add_option("-o,--output", co_out, "where to write the protocol")->required();
    co->add_flag("--verify", co_verify, "verify the output immediately");
    co->add_option("--builtin", co_builtin, "oracle for --verify");
    co->add_option("--oracle", co_oracle, "machine oracle for --verify");
    co->add_option("--inputs", co_inputs, "input range for --verify");
    co->add_option("--report", co_report, "write verification report lines here");
    co->callback([&] {
        action = [&]() -> int {
            CounterMachine pos = load_machine_file(co_pos);
            CounterMachine neg = load_machine_file(co_neg);
            Protocol p = co_skip ? compose_silent(cm_to_protocol(pos), cm_to_protocol(neg))
                                 : pipeline(pos, neg);
            write_file(co_out, serialize_protocol(p));
            ReportSink summary("");
            summary.line({{"protocol", p.name}, {"states", p.states.size()},
                          {"rendezvous", p.rendezvous.size()},
                          {"broadcasts", p.broadcasts.size()}, {"output", co_out}});
            if (!co_verify) return kOk;
            if (co_inputs.empty()) {
                raise(ErrorCode::ParseError, "--verify needs --inputs");
            }
            Oracle oracle = resolve_oracle(co_builtin, co_oracle);
            ReportSink sink(co_report);
            return run_checks(p, "silent", oracle, parse_input_range(co_inputs),
                              verify_options(), jobs, sink);
        };
    });

    // transform
    std::string tr_file, tr_out, tr_symbol;
    bool tr_leaderless = false, tr_single_bc = false, tr_single_sig = false;
    auto* tr = app.add_subcommand("transform", "structural protocol rewrites");
    tr->add_option("file", tr_file, "protocol file")->required();
    auto* f1 = tr->add_flag("--leaderless", tr_leaderless, "fold the leaders into the population");
    auto* f2 = tr->add_flag("--single-broadcaster", tr_single_bc,
                            "route every broadcast through one leader");
    auto* f3 = tr->add_flag("--single-signal", tr_single_sig,
                            "rebuild all broadcasts onto one shared freeze transfer");
    f1->excludes(f2)->excludes(f3);
    f2->excludes(f3);
    tr->add_option("--symbol", tr_symbol, "alphabet symbol electing the leader (--leaderless)");
    tr->add_option("-o,--output", tr_out, "where to write the protocol")->required();
    tr->callback([&] {
        action = [&]() -> int {
            if (!tr_leaderless && !tr_single_bc && !tr_single_sig) {
                raise(ErrorCode::ParseError,
                      "pick one of --leaderless, --single-broadcaster, --single-signal");
            }
            Protocol p = load_protocol_file(tr_file);
            Protocol q;
            if (tr_leaderless) {
                q = to_leaderless(p, tr_symbol);
            } else if (tr_single_bc) {
                q = to_single_broadcaster(p);
            } else {
                std::vector<std::string> warnings;
                q = to_single_signal(p, &warnings);
                for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
            }
            write_file(tr_out, serialize_protocol(q));
            ReportSink sink("");
            sink.line({{"protocol", q.name}, {"states", q.states.size()},
                       {"rendezvous", q.rendezvous.size()}, {"broadcasts", q.broadcasts.size()},
                       {"leaders", q.leaders.size()}, {"output", tr_out}});
            return kOk;
        };
    });

    // check-reset
    std::string rs_file, rs_inputs, rs_report;
    auto* rs = app.add_subcommand("check-reset",
                                  "do all reachable broadcasts restore the initial configuration?");
    rs->add_option("file", rs_file, "protocol file")->required();
    rs->add_option("--inputs", rs_inputs, "input range")->required();
    rs->add_option("--report", rs_report, "write report lines here instead of stdout");
    rs->callback([&] {
        action = [&]() -> int {
            Protocol p = load_protocol_file(rs_file);
            ResetReport report =
                check_reset_protocol(p, parse_input_range(rs_inputs), verify_options());
            ReportSink sink(rs_report);
            for (const ResetViolation& v : report.violations) {
                json rec;
                rec["input"] = v.input;
                rec["at"] = config_to_string(p, v.at);
                rec["trans"] = p.transition_label(v.trans_id);
                rec["got"] = config_to_string(p, v.got);
                json path = json::array();
                for (const TraceStep& s : v.path) {
                    path.push_back({{"trans", p.transition_label(s.trans_id)},
                                    {"config", config_to_string(p, s.config)}});
                }
                rec["path"] = path;
                sink.line(rec);
            }
            sink.line({{"protocol", p.name}, {"nodes", report.nodes}, {"ok", report.ok}});
            return report.ok ? kOk : kCheckFailed;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }
    return guarded(action);
}
