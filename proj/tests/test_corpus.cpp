#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>

#include "bcp/corpus.hpp"
#include "bcp/error.hpp"
#include "bcp/text.hpp"

#include "util.hpp"

using namespace bcp;

TEST_CASE("the corpus directory exists and the listings match it") {
    std::filesystem::path dir = corpus_directory();
    REQUIRE(std::filesystem::is_directory(dir));
    for (const std::string& name : corpus_protocol_names()) {
        CAPTURE(name);
        CHECK(std::filesystem::is_regular_file(dir / (name + ".bcp")));
    }
    for (const std::string& name : corpus_machine_names()) {
        CAPTURE(name);
        CHECK(std::filesystem::is_regular_file(dir / (name + ".cm")));
    }

    // And nothing on disk is missing from the listings.
    std::size_t bcp_files = 0;
    std::size_t cm_files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".bcp") ++bcp_files;
        if (entry.path().extension() == ".cm") ++cm_files;
    }
    CHECK(bcp_files == corpus_protocol_names().size());
    CHECK(cm_files == corpus_machine_names().size());
}

TEST_CASE("every bundled protocol validates and round-trips") {
    for (const std::string& name : corpus_protocol_names()) {
        CAPTURE(name);
        Protocol p = corpus_protocol(name);
        CHECK(p.name == name);
        CHECK(validate(p).empty());
        Protocol again = parse_protocol(serialize_protocol(p));
        CHECK(testutil::same_protocol(again, p));
    }
}

TEST_CASE("every bundled machine validates and round-trips") {
    for (const std::string& name : corpus_machine_names()) {
        CAPTURE(name);
        CounterMachine m = corpus_machine(name);
        CHECK(m.name == name);
        for (const CmViolation& v : validate_machine(m)) {
            CAPTURE(v.message);
            CHECK(v.warning);
        }
        CounterMachine again = parse_machine(serialize_machine(m));
        CHECK(testutil::same_machine(again, m));
    }
}

TEST_CASE("every bundled machine declares the bound the pipeline needs") {
    for (const std::string& name : corpus_machine_names()) {
        CAPTURE(name);
        CHECK(corpus_machine(name).bound.has_value());
    }
}

TEST_CASE("asking for a missing corpus entry fails cleanly") {
    CHECK_THROWS_AS(corpus_protocol("nosuch"), Error);
    CHECK_THROWS_AS(corpus_machine("nosuch"), Error);
}
