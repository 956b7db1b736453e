#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bcp/corpus.hpp"
#include "bcp/error.hpp"
#include "bcp/sim.hpp"
#include "bcp/text.hpp"

#include "util.hpp"

using namespace bcp;
using testutil::cfg;

TEST_CASE("the generator matches the published reference outputs") {
    // First three outputs of SplitMix64 seeded with 0, as used in the
    // xoshiro/xoroshiro reference material.
    SplitMix64 rng(0);
    CHECK(rng.next() == 0xe220a8397b1dcdafull);
    CHECK(rng.next() == 0x6e789e6aa1b965f4ull);
    CHECK(rng.next() == 0x06c45d188009454full);
}

TEST_CASE("bounded draws stay in range and hit every value") {
    SplitMix64 rng(7);
    std::vector<int> seen(5, 0);
    for (int i = 0; i < 200; ++i) {
        std::uint64_t v = rng.bounded(5);
        REQUIRE(v < 5);
        seen[v] += 1;
    }
    for (int c : seen) CHECK(c > 0);
}

TEST_CASE("a seed pins the whole trace") {
    Protocol p = corpus_protocol("power2");
    Config c0 = initial_configuration(p, {5});
    SimTrace a = simulate(p, c0, 12345);
    SimTrace b = simulate(p, c0, 12345);
    CHECK(trace_to_string(p, a) == trace_to_string(p, b));
    CHECK(a.verdict.kind == b.verdict.kind);
    CHECK(a.step_count == b.step_count);
}

TEST_CASE("terminal runs report the consensus they reached") {
    Protocol p = corpus_protocol("majority");
    Config c0 = initial_configuration(p, {2, 3});
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SimTrace t = simulate(p, c0, seed);
        REQUIRE(t.verdict.kind == VerdictKind::Terminal);
        CHECK(t.verdict.consensus == 1);
    }
    Config c1 = initial_configuration(p, {3, 2});
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SimTrace t = simulate(p, c1, seed);
        REQUIRE(t.verdict.kind == VerdictKind::Terminal);
        CHECK(t.verdict.consensus == 0);
    }
}

TEST_CASE("self-loop-only configurations stabilize") {
    Protocol p = parse_protocol(
        "protocol idle\n"
        "states: g\n"
        "alphabet: u\n"
        "input: u -> g\n"
        "output1: g\n"
        "rv: g g -> g g\n");
    SimTrace t = simulate(p, initial_configuration(p, {2}), 3);
    CHECK(t.verdict.kind == VerdictKind::Terminal);
    CHECK(t.verdict.consensus == 1);
    CHECK(t.step_count == 0);
}

TEST_CASE("a protocol that never settles exhausts its budget") {
    Protocol p = corpus_protocol("universal-reset");
    SimOptions options;
    options.max_steps = 2000;
    options.record_trace = false;
    SimTrace t = simulate(p, initial_configuration(p, {4}), 99, options);
    CHECK(t.verdict.kind == VerdictKind::BudgetExhausted);
    CHECK(t.step_count == 2000);
}

TEST_CASE("quiescence window declares stabilization without terminality") {
    // The configuration oscillates between {a:2} and {b:2} forever, so no
    // terminal verdict is possible, but both sides agree on output 1; the
    // window verdict fires long before the budget.
    Protocol p = parse_protocol(
        "protocol blinker\n"
        "states: a b\n"
        "alphabet: u\n"
        "input: u -> a\n"
        "output1: a b\n"
        "rv: a a -> b b\n"
        "rv: b b -> a a\n");
    SimOptions options;
    options.max_steps = 100000;
    SimTrace t = simulate(p, initial_configuration(p, {2}), 11, options);
    CHECK(t.verdict.kind == VerdictKind::Stabilized);
    CHECK(t.verdict.consensus == 1);
    CHECK(t.step_count < 100000);
}

TEST_CASE("traces replay and round trip through text") {
    Protocol p = corpus_protocol("power2");
    Config c0 = initial_configuration(p, {6});
    SimTrace t = simulate(p, c0, 2024);
    REQUIRE(!t.steps.empty());
    replay_trace(p, c0, t.steps);

    std::string text = trace_to_string(p, t);
    std::vector<TraceStep> parsed = parse_trace(p, text);
    REQUIRE(parsed.size() == t.steps.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        CHECK(parsed[i].trans_id == t.steps[i].trans_id);
        CHECK(parsed[i].config == t.steps[i].config);
    }
    replay_trace(p, c0, parsed);
}

TEST_CASE("replay rejects corrupted traces") {
    Protocol p = corpus_protocol("power2");
    Config c0 = initial_configuration(p, {4});
    SimTrace t = simulate(p, c0, 5);
    REQUIRE(t.steps.size() >= 2);

    SUBCASE("wrong configuration") {
        std::vector<TraceStep> bad = t.steps;
        bad[0].config = cfg(p, {{"xtilde", 4}});
        CHECK_THROWS_AS(replay_trace(p, c0, bad), Error);
    }
    SUBCASE("transition not enabled") {
        std::vector<TraceStep> bad = t.steps;
        bad[0].trans_id = 1;  // recovery broadcast needs a bot agent
        CHECK_THROWS_AS(replay_trace(p, c0, bad), Error);
    }
}

TEST_CASE("batch runs are independent of the job count") {
    Protocol p = corpus_protocol("power2");
    Config c0 = initial_configuration(p, {4});
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 1; s <= 12; ++s) seeds.push_back(s);
    auto solo = batch_simulate(p, c0, seeds, {}, 1);
    auto parallel = batch_simulate(p, c0, seeds, {}, 4);
    REQUIRE(solo.size() == parallel.size());
    for (std::size_t i = 0; i < solo.size(); ++i) {
        CHECK(solo[i].seed == parallel[i].seed);
        CHECK(solo[i].kind == parallel[i].kind);
        CHECK(solo[i].consensus == parallel[i].consensus);
        CHECK(solo[i].step_count == parallel[i].step_count);
    }
}

TEST_CASE("trace text uses transition labels and named counts") {
    Protocol p = corpus_protocol("power2");
    SimTrace t = simulate(p, initial_configuration(p, {2}), 1);
    std::string text = trace_to_string(p, t);
    CHECK(text.find("1 ") == 0);
    bool labeled = text.find(" r0 ") != std::string::npos ||
                   text.find(" b") != std::string::npos;
    CHECK(labeled);
}
