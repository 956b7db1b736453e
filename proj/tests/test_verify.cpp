#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "bcp/corpus.hpp"
#include "bcp/error.hpp"
#include "bcp/oracle.hpp"
#include "bcp/verify.hpp"

#include "util.hpp"

using namespace bcp;
using testutil::cfg;

TEST_CASE("the size-two reachability graph of power2 is fully known") {
    Protocol p = corpus_protocol("power2");
    ReachGraph g = build_graph(p, initial_configuration(p, {2}));
    CHECK(g.configs[0] == cfg(p, {{"x", 2}}));

    std::set<Config> nodes(g.configs.begin(), g.configs.end());
    std::set<Config> expected = {
        cfg(p, {{"x", 2}}),
        cfg(p, {{"xbar", 1}, {"0", 1}}),
        cfg(p, {{"0", 1}, {"bot", 1}}),
        cfg(p, {{"1", 1}, {"bot", 1}}),
        cfg(p, {{"x", 1}, {"1", 1}}),
        cfg(p, {{"1", 2}}),
    };
    CHECK(nodes == expected);

    SccResult scc = bottom_sccs(g);
    std::vector<std::uint32_t> comp_size(scc.component_count, 0);
    for (std::uint32_t c : scc.component) comp_size[c] += 1;

    // Exactly one bottom component: the terminal singleton {1:2}. The
    // configuration {1:1, bot:1} is not bottom because the recovery
    // broadcast rebuilds {x:2} from it.
    std::uint32_t bottoms = 0;
    for (std::uint32_t c = 0; c < scc.component_count; ++c) {
        if (!scc.is_bottom[c]) continue;
        bottoms += 1;
        CHECK(comp_size[c] == 1);
        for (std::uint32_t u = 0; u < g.configs.size(); ++u) {
            if (scc.component[u] == c) CHECK(g.configs[u] == cfg(p, {{"1", 2}}));
        }
    }
    CHECK(bottoms == 1);
}

TEST_CASE("witness paths are shortest and lexicographically least") {
    Protocol p = corpus_protocol("power2");
    ReachGraph g = build_graph(p, initial_configuration(p, {2}));
    std::uint32_t target = UINT32_MAX;
    for (std::uint32_t u = 0; u < g.configs.size(); ++u) {
        if (g.configs[u] == cfg(p, {{"1", 2}})) target = u;
    }
    REQUIRE(target != UINT32_MAX);
    std::vector<TraceStep> path = witness_path(g, target);
    REQUIRE(path.size() == 3);
    CHECK(path[0].trans_id == 0);  // x x -> xbar 0
    CHECK(path[1].trans_id == 2);  // xbar -> x ; 0 -> 1
    CHECK(path[2].trans_id == 5);  // x -> 1
    CHECK(path[2].config == cfg(p, {{"1", 2}}));
    CHECK(witness_path(g, 0).empty());
}

TEST_CASE("power2 verification matches the predicate on small sizes") {
    Protocol p = corpus_protocol("power2");
    Oracle oracle = builtin_oracle("power2");
    for (std::uint32_t n = 2; n <= 6; ++n) {
        int expected = oracle({n});
        CheckResult r = check_computes(p, {n}, expected);
        CHECK_MESSAGE(r.ok, "size ", n);
        CheckResult s = check_silently_computes(p, {n}, expected);
        CHECK_MESSAGE(s.ok, "size ", n);
        DecideResult d = decide(p, {n});
        CHECK(d.value == expected);
    }
}

TEST_CASE("a failed check carries a replayable witness") {
    Protocol p = corpus_protocol("power2");
    CheckResult r = check_computes(p, {2}, 0);
    REQUIRE_FALSE(r.ok);
    REQUIRE(r.witness_target.has_value());
    CHECK(*r.witness_target == cfg(p, {{"1", 2}}));
    CHECK_FALSE(r.reason.empty());
    Config at = initial_configuration(p, {2});
    for (const TraceStep& step : r.witness) {
        at = apply_transition(p, at, step.trans_id);
        CHECK(at == step.config);
    }
    CHECK(at == *r.witness_target);
}

TEST_CASE("majority verifies silently on a grid of inputs") {
    Protocol p = corpus_protocol("majority");
    Oracle oracle = builtin_oracle("majority");
    for (std::uint32_t a = 0; a <= 3; ++a) {
        for (std::uint32_t b = 0; b <= 3; ++b) {
            if (a + b < 2) continue;
            CheckResult r = check_silently_computes(p, {a, b}, oracle({a, b}));
            CHECK_MESSAGE(r.ok, "input (", a, ",", b, ")");
        }
    }
}

TEST_CASE("a live lasso yields an undetermined verdict") {
    Protocol p = corpus_protocol("universal-reset");
    ReachGraph g = build_graph(p, initial_configuration(p, {2}));
    SccResult scc = bottom_sccs(g);
    CHECK(scc.component_count == 1);
    CHECK(scc.is_bottom[0]);

    DecideResult d = decide(p, {2});
    CHECK(d.value == std::nullopt);
    CHECK_FALSE(check_computes(p, {2}, 0).ok);
    CHECK_FALSE(check_computes(p, {2}, 1).ok);
}

TEST_CASE("semi-computation separates the two sides") {
    Protocol p = corpus_protocol("power2");
    // Power of two: every bottom component is the terminal 1-consensus.
    CHECK(check_semi_computes(p, {4}, 1).ok);
    // Not a power of two: 0-consensus terminals are reachable, so the
    // protocol computes 0 but does not semi-compute it.
    CHECK(check_computes(p, {3}, 0).ok);
    CheckResult r = check_semi_computes(p, {3}, 0);
    CHECK_FALSE(r.ok);
    CHECK(r.witness_target.has_value());
}

TEST_CASE("node budgets abort exploration") {
    Protocol p = corpus_protocol("power2");
    VerifyOptions tight;
    tight.node_budget = 3;
    try {
        build_graph(p, initial_configuration(p, {6}), tight);
        FAIL("expected the node budget to trip");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BudgetExceeded);
    }
}

TEST_CASE("verification results are reproducible") {
    Protocol p = corpus_protocol("power2");
    ReachGraph a = build_graph(p, initial_configuration(p, {5}));
    ReachGraph b = build_graph(p, initial_configuration(p, {5}));
    CHECK(a.configs == b.configs);
    CHECK(a.edges == b.edges);
}
