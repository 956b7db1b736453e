#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bcp/corpus.hpp"
#include "bcp/error.hpp"
#include "bcp/machine.hpp"
#include "bcp/oracle.hpp"
#include "bcp/text.hpp"

using namespace bcp;

TEST_CASE("configurations and steps") {
    CounterMachine m = corpus_machine("cm-geq");
    CmConfig c0 = cm_initial(m, {2, 1});
    CHECK(c0.state == m.initial);
    CHECK(c0.values == std::vector<std::uint32_t>{2, 1});
    CHECK_THROWS_AS(cm_initial(m, {2}), Error);

    // From q0 with x2 > 0 only dec(x2) is enabled; the zero guard is not.
    std::vector<CmStep> steps = cm_step(m, c0);
    REQUIRE(steps.size() == 1);
    CHECK(steps[0].successor.state == m.state("p"));
    CHECK(steps[0].successor.values == std::vector<std::uint32_t>{2, 0});

    CmConfig done{m.state("qa"), {2, 0}};
    CHECK(cm_step(m, done).empty());
}

TEST_CASE("acceptance and rejection on the comparison machines") {
    CounterMachine geq = corpus_machine("cm-geq");
    CounterMachine lt = corpus_machine("cm-lt");
    for (std::uint32_t a = 0; a <= 4; ++a) {
        for (std::uint32_t b = 0; b <= 4; ++b) {
            CAPTURE(a);
            CAPTURE(b);
            CHECK(cm_accepts(geq, {a, b}) == (a >= b));
            CHECK(cm_rejects(geq, {a, b}) == (a < b));
            CHECK(cm_accepts(lt, {a, b}) == (a < b));
            CHECK(cm_rejects(lt, {a, b}) == (a >= b));
        }
    }
}

TEST_CASE("the unary machines match their oracles") {
    for (const char* name : {"cm-even", "cm-odd", "cm-div3"}) {
        CAPTURE(name);
        CounterMachine m = corpus_machine(name);
        Oracle oracle = builtin_oracle(std::string(name).substr(3));
        std::vector<std::vector<std::uint32_t>> inputs;
        std::vector<int> expected;
        for (std::uint32_t n = 0; n <= 9; ++n) {
            inputs.push_back({n});
            expected.push_back(oracle({n}));
        }
        CmComputeReport report = cm_check_computes(m, inputs, expected);
        CHECK(report.ok);
        for (const CmComputeRecord& r : report.records) {
            CHECK(r.ok);
            CHECK(r.accepts == (r.expected == 1));
            CHECK(r.rejects == (r.expected == 0));
        }
    }
}

TEST_CASE("a partially executed macro can always back out") {
    CounterMachine m = parse_machine(
        "cm backout\n"
        "counters: x\n"
        "input-arity: 1\n"
        "states: q0 qa qr\n"
        "init: q0  accept: qa  reject: qr\n"
        "bound: n\n"
        "trans: q0 [dec(x); dec(x)] qa\n"
        "trans: q0 zero(x) qr\n");
    // Needs two tokens to finish the macro: with one token the machine
    // oscillates between q0 and the intermediate state forever (the zero
    // guard is blocked while the token exists), so it neither accepts nor
    // rejects; with none it rejects immediately.
    CHECK(cm_accepts(m, {2}));
    CHECK_FALSE(cm_accepts(m, {1}));
    CHECK_FALSE(cm_rejects(m, {1}));
    CHECK(cm_rejects(m, {0}));

    // The intermediate configuration really is explored.
    CmGraph g = cm_explore(m, {1});
    bool hit_intermediate = false;
    for (const CmConfig& c : g.configs) {
        if (m.states[c.state].find('#') != std::string::npos) hit_intermediate = true;
    }
    CHECK(hit_intermediate);
}

TEST_CASE("exploration is deterministic breadth-first") {
    CounterMachine m = corpus_machine("cm-even");
    CmGraph a = cm_explore(m, {4});
    CmGraph b = cm_explore(m, {4});
    CHECK(a.configs == b.configs);
    CHECK(a.edges == b.edges);
    CHECK(a.configs[0] == cm_initial(m, {4}));
    // Evenness machine on 4 tokens walks straight down: 4,3,2,1,0 plus halt.
    CHECK(a.configs.size() == 6);
}

TEST_CASE("sum caps derive from the declared bound") {
    CounterMachine m = corpus_machine("cm-geq");
    CHECK(cm_sum_cap(m, 5, Bound{BoundClass::N, 1}) == 5);
    CHECK(cm_sum_cap(m, 5, Bound{BoundClass::WeakN, 1}) == 10);  // 2 counters
    CHECK(cm_sum_cap(m, 5, Bound{BoundClass::Poly, 2}) == 25);
    CHECK(cm_sum_cap(m, 0, Bound{BoundClass::N, 1}) >= 1);
}

TEST_CASE("bound checking finds violations") {
    CounterMachine pump = parse_machine(
        "cm pump\n"
        "counters: x y\n"
        "input-arity: 1\n"
        "states: q0 qa qr\n"
        "init: q0  accept: qa  reject: qr\n"
        "bound: poly 2\n"
        "trans: q0 inc(y) q0\n"
        "trans: q0 zero(x) qa\n");
    // y grows without limit, so the strict sum bound fails...
    CmBoundReport strict = cm_check_bounded(pump, Bound{BoundClass::N, 1}, {{3}});
    CHECK_FALSE(strict.ok);
    REQUIRE(strict.records.size() == 1);
    REQUIRE(strict.records[0].violation.has_value());
    std::uint64_t total = 0;
    for (std::uint32_t v : strict.records[0].violation->values) total += v;
    CHECK(total > 3);

    // ...while the machines that only ever consume their input pass.
    CounterMachine geq = corpus_machine("cm-geq");
    std::vector<std::vector<std::uint32_t>> inputs;
    for (std::uint32_t a = 0; a <= 3; ++a) {
        for (std::uint32_t b = 0; a + b <= 3; ++b) inputs.push_back({a, b});
    }
    CHECK(cm_check_bounded(geq, Bound{BoundClass::N, 1}, inputs).ok);
    CHECK(cm_check_bounded(geq, Bound{BoundClass::WeakN, 1}, inputs).ok);
}

TEST_CASE("machine validation") {
    CounterMachine m = corpus_machine("cm-geq");
    CHECK(validate_machine(m).empty());

    CounterMachine noisy = m;
    noisy.transitions.push_back({noisy.accept, {InsKind::Nop, 0}, noisy.initial});
    auto violations = validate_machine(noisy);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].warning);

    CounterMachine bad = m;
    bad.bound = Bound{BoundClass::Poly, 0};
    bool hard = false;
    for (const auto& v : validate_machine(bad)) hard = hard || !v.warning;
    CHECK(hard);
}
