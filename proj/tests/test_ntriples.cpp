#include <doctest.h>

#include <string>
#include <vector>

#include "rdfpart/ntriples.hpp"

using namespace rdfpart;

TEST_CASE("plain IRI statement") {
    auto triples = parse_ntriples("<a> <p> <b> .\n");
    REQUIRE(triples.size() == 1);
    CHECK(triples[0].s == Term::iri("a"));
    CHECK(triples[0].p == Term::iri("p"));
    CHECK(triples[0].o == Term::iri("b"));
}

TEST_CASE("blank node subject and literal object") {
    auto triples = parse_ntriples("_:x <p> \"v\" .\n");
    REQUIRE(triples.size() == 1);
    CHECK(triples[0].s == Term::blank("x"));
    CHECK(triples[0].o == Term::literal("\"v\""));
}

TEST_CASE("literal tokens are kept verbatim") {
    auto triples = parse_ntriples(
        "<a> <p> \"plain\" .\n"
        "<a> <p> \"tagged\"@en-GB .\n"
        "<a> <p> \"typed\"^^<http://www.w3.org/2001/XMLSchema#int> .\n"
        "<a> <p> \"esc \\\" quote\" .\n");
    REQUIRE(triples.size() == 4);
    CHECK(triples[0].o.lexical == "\"plain\"");
    CHECK(triples[1].o.lexical == "\"tagged\"@en-GB");
    CHECK(triples[2].o.lexical == "\"typed\"^^<http://www.w3.org/2001/XMLSchema#int>");
    CHECK(triples[3].o.lexical == "\"esc \\\" quote\"");
}

TEST_CASE("comments and blank lines are skipped") {
    ParseStats stats;
    auto triples = parse_ntriples("# header\n\n<a> <p> <b> . # trailing\n   \n", ParsePolicy::Abort,
                                  &stats);
    CHECK(triples.size() == 1);
    CHECK(stats.statements == 1);
}

TEST_CASE("truncated statement reports its line number") {
    try {
        parse_ntriples("<a> <p>");
        FAIL("expected MalformedLine");
    } catch (const MalformedLine& e) {
        CHECK(e.line() == 1);
        CHECK(e.reason() == "truncated statement");
    }
}

TEST_CASE("missing dot is malformed") {
    CHECK_THROWS_AS(parse_ntriples("<a> <p> <b>\n"), MalformedLine);
}

TEST_CASE("literal in subject position is malformed") {
    CHECK_THROWS_AS(parse_ntriples("\"v\" <p> <b> .\n"), MalformedLine);
}

TEST_CASE("whitespace inside an IRI is malformed") {
    CHECK_THROWS_AS(parse_ntriples("<a b> <p> <c> .\n"), MalformedLine);
}

TEST_CASE("skip-and-count policy keeps going") {
    ParseStats stats;
    auto triples = parse_ntriples("<a> <p> <b> .\nbroken line\n<c> <p> <d> .\n",
                                  ParsePolicy::SkipAndCount, &stats);
    CHECK(triples.size() == 2);
    CHECK(stats.statements == 2);
    CHECK(stats.skipped == 1);
}

TEST_CASE("input order is preserved") {
    auto triples = parse_ntriples("<b> <p> <c> .\n<a> <p> <b> .\n");
    REQUIRE(triples.size() == 2);
    CHECK(triples[0].s == Term::iri("b"));
    CHECK(triples[1].s == Term::iri("a"));
}
