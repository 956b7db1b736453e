#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bcp/error.hpp"
#include "bcp/text.hpp"

#include "util.hpp"

using namespace bcp;
using testutil::cfg;

namespace {

const char* kToy = R"(protocol toy
# two leaders push everyone to the yes side
states: s t u0 u1
alphabet: u
input: u -> u0
leaders: s:1 t:1
output1: s t u1
note: always answers 1
rv: s u0 -> s u1
rv: t u0 -> t u1
bc: s -> s ; u0 -> u1, t -> s
)";

} // namespace

TEST_CASE("protocol round trip survives parsing and printing") {
    Protocol p = parse_protocol(kToy);
    CHECK(p.name == "toy");
    CHECK(p.states.size() == 4);
    CHECK(p.alphabet == std::vector<std::string>{"u"});
    CHECK(p.input_map == std::vector<StateId>{p.state("u0")});
    CHECK(p.leaders == cfg(p, {{"s", 1}, {"t", 1}}));
    CHECK(p.output[p.state("u1")] == 1);
    CHECK(p.output[p.state("u0")] == 0);
    CHECK(p.notes == std::vector<std::string>{"always answers 1"});
    REQUIRE(p.rendezvous.size() == 2);
    REQUIRE(p.broadcasts.size() == 1);
    const auto& f = p.transfers[p.broadcasts[0].transfer];
    CHECK(f[p.state("u0")] == p.state("u1"));
    CHECK(f[p.state("t")] == p.state("s"));
    CHECK(f[p.state("u1")] == p.state("u1"));

    std::string text = serialize_protocol(p);
    Protocol q = parse_protocol(text);
    CHECK(q.states == p.states);
    CHECK(q.alphabet == p.alphabet);
    CHECK(q.input_map == p.input_map);
    CHECK(q.leaders == p.leaders);
    CHECK(q.output == p.output);
    CHECK(q.rendezvous == p.rendezvous);
    CHECK(q.broadcasts == p.broadcasts);
    CHECK(q.transfers == p.transfers);
    CHECK(q.notes == p.notes);
    CHECK(serialize_protocol(q) == text);
}

TEST_CASE("comments open only at token boundaries") {
    Protocol p = parse_protocol(
        "protocol hash\n"
        "# whole-line comment\n"
        "states: a#g#1 b # trailing comment\n"
        "alphabet: u\n"
        "input: u -> a#g#1\n");
    CHECK(p.states == std::vector<std::string>{"a#g#1", "b"});
    CHECK(p.input_map[0] == 0);
}

TEST_CASE("protocol parse errors carry line numbers") {
    auto expect_parse_error = [](const std::string& text, const char* needle) {
        try {
            parse_protocol(text);
            FAIL_CHECK("expected a parse error mentioning: " << needle);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ParseError);
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_parse_error("states: a\n", "protocol");
    expect_parse_error("protocol p\nstates: a a\n", "duplicate");
    expect_parse_error("protocol p\nstates: a\nrv: a b -> a a\n", "unknown state");
    expect_parse_error("protocol p\nstates: a\nalphabet: u\n", "missing alphabet symbol");
    expect_parse_error("protocol p\nstates: a\nalphabet: u u\ninput: u -> a\n", "duplicate");
    expect_parse_error("protocol p\nstates: a\nalphabet: u\ninput: u -> a ; u -> a\n",
                       "duplicate input entry");
    expect_parse_error("protocol p\nstates: a\nleaders: a:\n", "leader");
    expect_parse_error("protocol p\nstates: a\nwhat: ever\n", "unrecognized");
}

TEST_CASE("machine round trip") {
    const char* text = R"(cm tiny
counters: x y
input-arity: 1
states: q0 qa qr
init: q0  accept: qa  reject: qr
bound: poly 2
trans: q0 dec(x) q0
trans: q0 zero(x) qa
trans: q0 nonzero(y) qr
trans: qr nop qr
)";
    CounterMachine m = parse_machine(text);
    CHECK(m.name == "tiny");
    CHECK(m.counters == std::vector<std::string>{"x", "y"});
    CHECK(m.input_arity == 1);
    CHECK(m.initial == m.state("q0"));
    CHECK(m.accept == m.state("qa"));
    CHECK(m.reject == m.state("qr"));
    REQUIRE(m.bound.has_value());
    CHECK(m.bound->cls == BoundClass::Poly);
    CHECK(m.bound->degree == 2);
    REQUIRE(m.transitions.size() == 4);
    CHECK(m.transitions[3].ins.kind == InsKind::Nop);

    std::string out = serialize_machine(m);
    CounterMachine m2 = parse_machine(out);
    CHECK(m2.states == m.states);
    CHECK(m2.counters == m.counters);
    CHECK(m2.transitions == m.transitions);
    CHECK(m2.bound == m.bound);
    CHECK(serialize_machine(m2) == out);
}

TEST_CASE("macro transitions expand with a reversible prefix") {
    CounterMachine m = parse_machine(
        "cm mac\n"
        "counters: x y\n"
        "input-arity: 1\n"
        "states: a b\n"
        "init: a  accept: b  reject: a\n"
        "trans: a [dec(x); inc(y)] b\n");
    // One fresh intermediate state, forward chain of two, one reverse edge.
    REQUIRE(m.states.size() == 3);
    CHECK(m.states[2] == "a#m0#1");
    REQUIRE(m.transitions.size() == 3);
    CHECK(m.transitions[0] ==
          CmTransition{0, {InsKind::Dec, m.counter("x")}, 2});
    CHECK(m.transitions[1] ==
          CmTransition{2, {InsKind::Inc, m.counter("x")}, 0});
    CHECK(m.transitions[2] ==
          CmTransition{2, {InsKind::Inc, m.counter("y")}, 1});
}

TEST_CASE("machine parse errors") {
    auto expect_parse_error = [](const std::string& text, const char* needle) {
        try {
            parse_machine(text);
            FAIL_CHECK("expected a parse error mentioning: " << needle);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ParseError);
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_parse_error("counters: x\n", "cm");
    expect_parse_error("cm m\nstates: a\ninit: a\n", "accept");
    expect_parse_error("cm m\ncounters: x\ninput-arity: 2\nstates: a\n"
                       "init: a  accept: a  reject: a\n",
                       "arity exceeds");
    expect_parse_error("cm m\ncounters: x\nstates: a\ninit: a  accept: a  reject: a\n"
                       "trans: a dec(z) a\n",
                       "unknown counter");
    expect_parse_error("cm m\ncounters: x\nstates: a\ninit: a  accept: a  reject: a\n"
                       "trans: a [dec(x); inc(x) a\n",
                       "missing ']'");
    expect_parse_error("cm m\ncounters: x\nstates: a\ninit: a  accept: a  reject: a\n"
                       "bound: poly\n",
                       "bad bound");
}

TEST_CASE("file io errors surface as IoError") {
    CHECK_THROWS_AS(read_file("/nonexistent/path/file.bcp"), Error);
    try {
        read_file("/nonexistent/path/file.bcp");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IoError);
    }
}
