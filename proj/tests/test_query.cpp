#include <doctest.h>

#include <string>
#include <vector>

#include "oracles.hpp"
#include "rdfpart/dictionary.hpp"
#include "rdfpart/ntriples.hpp"
#include "rdfpart/query.hpp"

using namespace rdfpart;

namespace {

struct Fixture {
    DictionaryPair dicts;
    std::vector<EncodedTriple> triples;
    PrefixMap prefixes{{"ex", "http://ex/"},
                       {"rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"}};

    explicit Fixture(const std::string& nt) {
        auto tt = parse_ntriples(nt);
        triples = encode_triples(tt, dicts);
    }
};

const char* kChainData =
    "<http://ex/bob> <http://ex/advisor> <http://ex/alice> .\n"
    "<http://ex/alice> <http://ex/worksFor> <http://ex/dbteam> .\n"
    "<http://ex/dbteam> <http://ex/subOrg> <http://ex/univ1> .\n";

}  // namespace

TEST_CASE("a chain query parses into a three-pattern BGP") {
    Fixture fx(kChainData);
    Query q = parse_query(
        "SELECT ?x ?y ?z WHERE { ?x ex:advisor ?y . ?y ex:worksFor ?z . ?z ex:subOrg ?t . }",
        fx.prefixes, fx.dicts);
    REQUIRE(q.bgp.size() == 3);
    CHECK(q.projection == std::vector<std::string>{"x", "y", "z"});
    CHECK(q.bgp[0].s.is_var());
    CHECK(q.bgp[0].p.is_const());
    CHECK(q.bgp[1].s.name == "y");
}

TEST_CASE("a star query parses with a shared subject") {
    Fixture fx(
        "<http://ex/e> <http://ex/P39> <http://ex/a> .\n"
        "<http://ex/e> <http://ex/P580> <http://ex/b> .\n"
        "<http://ex/e> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://ex/T> .\n");
    Query q = parse_query(
        "SELECT ?x ?y ?z WHERE { ?x ex:P39 ?y . ?x ex:P580 ?z . ?x rdf:type ?w }", fx.prefixes,
        fx.dicts);
    REQUIRE(q.bgp.size() == 3);
    CHECK(is_subject_star(q.bgp));
    ResultSet rs = evaluate_global(q, fx.triples);
    CHECK(rs.rows.size() == 1);
}

TEST_CASE("OPTIONAL / UNION / FILTER are rejected") {
    Fixture fx(kChainData);
    CHECK_THROWS_AS(parse_query("SELECT ?x WHERE { ?x ex:advisor ?y . OPTIONAL { ?x ex:p ?z } }",
                                fx.prefixes, fx.dicts),
                    Unsupported);
    CHECK_THROWS_AS(parse_query("SELECT ?x WHERE { { ?x ex:p ?y } UNION { ?x ex:q ?y } }",
                                fx.prefixes, fx.dicts),
                    Unsupported);
    CHECK_THROWS_AS(
        parse_query("SELECT ?x WHERE { ?x ex:p ?y . FILTER (?y > 3) }", fx.prefixes, fx.dicts),
        Unsupported);
}

TEST_CASE("syntax errors carry a position") {
    Fixture fx(kChainData);
    CHECK_THROWS_AS(parse_query("ASK { ?x ex:p ?y }", fx.prefixes, fx.dicts), SyntaxError);
    CHECK_THROWS_AS(parse_query("SELECT WHERE { ?x ex:p ?y }", fx.prefixes, fx.dicts), SyntaxError);
    CHECK_THROWS_AS(parse_query("SELECT ?x WHERE { ?x unknown:p ?y }", fx.prefixes, fx.dicts),
                    SyntaxError);
    CHECK_THROWS_AS(parse_query("SELECT ?z WHERE { ?x ex:p ?y }", fx.prefixes, fx.dicts),
                    SyntaxError);
}

TEST_CASE("unknown constants give an empty result, not an error") {
    Fixture fx(kChainData);
    Query q = parse_query("SELECT ?x WHERE { ?x ex:advisor <http://ex/nobody> }", fx.prefixes,
                          fx.dicts);
    CHECK(evaluate_global(q, fx.triples).rows.empty());
}

TEST_CASE("single pattern evaluation") {
    Fixture fx("<http://ex/s> <http://ex/p> <http://ex/o> .\n");
    Query q = parse_query("SELECT ?x ?y WHERE { ?x ex:p ?y }", fx.prefixes, fx.dicts);
    ResultSet rs = evaluate_global(q, fx.triples);
    REQUIRE(rs.rows.size() == 1);
    CHECK(rs.rows[0] == Row{0, 1});
}

TEST_CASE("chain query over a chain yields exactly one row") {
    Fixture fx(kChainData);
    Query q = parse_query(
        "SELECT ?x ?y ?z WHERE { ?x ex:advisor ?y . ?y ex:worksFor ?z . ?z ex:subOrg ?t }",
        fx.prefixes, fx.dicts);
    ResultSet rs = evaluate_global(q, fx.triples);
    CHECK(rs.rows.size() == 1);
    CHECK(rs == oracles::naive_evaluate(q, fx.triples));
}

TEST_CASE("repeated variables within one pattern enforce equality") {
    Fixture fx(
        "<http://ex/a> <http://ex/p> <http://ex/a> .\n"
        "<http://ex/a> <http://ex/p> <http://ex/b> .\n");
    Query q = parse_query("SELECT ?x WHERE { ?x ex:p ?x }", fx.prefixes, fx.dicts);
    ResultSet rs = evaluate_global(q, fx.triples);
    CHECK(rs == oracles::naive_evaluate(q, fx.triples));
    REQUIRE(rs.rows.size() == 1);
}

TEST_CASE("evaluate_global matches the nested-loop oracle on random data") {
    DictionaryPair dicts;
    PrefixMap prefixes{{"p", "urn:p:"}};
    // encode synthetic terms so queries can reference p:0 .. p:7
    std::vector<TermTriple> tt;
    std::mt19937_64 rng(606);
    for (int i = 0; i < 1500; ++i) {
        tt.push_back({Term::iri("urn:n:" + std::to_string(rng() % 60)),
                      Term::iri("urn:p:" + std::to_string(rng() % 8)),
                      Term::iri("urn:n:" + std::to_string(rng() % 60))});
    }
    auto triples = encode_triples(tt, dicts);

    const char* queries[] = {
        "SELECT ?x ?y WHERE { ?x <urn:p:0> ?y . ?y <urn:p:1> ?z }",
        "SELECT ?x ?z WHERE { ?x <urn:p:2> ?y . ?y <urn:p:3> ?z . ?z <urn:p:4> ?w }",
        "SELECT ?x ?y ?z WHERE { ?x <urn:p:0> ?y . ?x <urn:p:5> ?z }",
        "SELECT ?x WHERE { ?x <urn:p:6> ?x }",
        "SELECT ?x ?a WHERE { ?x <urn:p:1> ?y . ?a <urn:p:7> ?b }",  // cartesian
        "SELECT ?x ?y WHERE { ?x ?p ?y . ?y <urn:p:2> ?z }",         // variable predicate
    };
    for (const char* text : queries) {
        Query q = parse_query(text, prefixes, dicts);
        CHECK(evaluate_global(q, triples) == oracles::naive_evaluate(q, triples));
    }
}

TEST_CASE("pattern order does not change the result set") {
    DictionaryPair dicts;
    PrefixMap prefixes;
    std::vector<TermTriple> tt;
    std::mt19937_64 rng(607);
    for (int i = 0; i < 800; ++i) {
        tt.push_back({Term::iri("urn:n:" + std::to_string(rng() % 40)),
                      Term::iri("urn:p:" + std::to_string(rng() % 4)),
                      Term::iri("urn:n:" + std::to_string(rng() % 40))});
    }
    auto triples = encode_triples(tt, dicts);
    Query a = parse_query("SELECT ?x ?z WHERE { ?x <urn:p:0> ?y . ?y <urn:p:1> ?z }", prefixes,
                          dicts);
    Query b = parse_query("SELECT ?x ?z WHERE { ?y <urn:p:1> ?z . ?x <urn:p:0> ?y }", prefixes,
                          dicts);
    CHECK(evaluate_global(a, triples) == evaluate_global(b, triples));
}

TEST_CASE("binding rows decode through the right dictionaries") {
    Fixture fx(kChainData);
    Query q = parse_query("SELECT ?p ?y WHERE { <http://ex/alice> ?p ?y }", fx.prefixes,
                          fx.dicts);
    ResultSet rs = evaluate_global(q, fx.triples);
    auto rows = decode_rows(rs, q, fx.dicts);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0][0] == "<http://ex/worksFor>");
    CHECK(rows[0][1] == "<http://ex/dbteam>");
}

TEST_CASE("locality classification per strategy") {
    Fixture fx(kChainData);
    Query star = parse_query("SELECT ?x WHERE { ?x ex:advisor ?y . ?x ex:worksFor ?z }",
                             fx.prefixes, fx.dicts);
    Query chain3 = parse_query(
        "SELECT ?x WHERE { ?x ex:advisor ?y . ?y ex:worksFor ?z . ?z ex:subOrg ?t }", fx.prefixes,
        fx.dicts);
    Query single = parse_query("SELECT ?x WHERE { ?x ex:advisor ?y }", fx.prefixes, fx.dicts);

    CHECK(classify_locality(star, Strategy::SubjectHash, 2) == Locality::Local);
    CHECK(classify_locality(chain3, Strategy::SubjectHash, 2) == Locality::Distributed);
    CHECK(classify_locality(star, Strategy::RandomHash, 2) == Locality::Distributed);
    CHECK(classify_locality(single, Strategy::RandomHash, 2) == Locality::Local);

    // the 3-pattern chain needs a 3-hop guarantee
    CHECK(classify_locality(chain3, Strategy::GraphNHop, 2) == Locality::Distributed);
    CHECK(classify_locality(chain3, Strategy::GraphNHop, 3) == Locality::Local);
    CHECK(classify_locality(star, Strategy::GraphNHop, 3) == Locality::Distributed);
    CHECK(classify_locality(chain3, Strategy::GraphSubject, 3) == Locality::Distributed);

    // workload coverage drives warp/hybrid
    std::vector<std::string> keys{canonical_bgp_key(generalize_bgp(chain3.bgp))};
    CHECK(classify_locality(chain3, Strategy::Warp, 2, keys) == Locality::Local);
    CHECK(classify_locality(star, Strategy::Warp, 2, keys) == Locality::Distributed);
    CHECK(classify_locality(star, Strategy::Hybrid, 2, keys) == Locality::Local);  // star basis
    CHECK(classify_locality(chain3, Strategy::Hybrid, 2, keys) == Locality::Local);
    CHECK(classify_locality(chain3, Strategy::Hybrid, 2, {}) == Locality::Distributed);

    // variable predicates are never promised local (beyond single patterns)
    Query varp = parse_query("SELECT ?x WHERE { ?x ?p ?y . ?x ex:advisor ?z }", fx.prefixes,
                             fx.dicts);
    CHECK(classify_locality(varp, Strategy::SubjectHash, 2) == Locality::Distributed);
}

TEST_CASE("generalization replaces constants and merges renamings") {
    Fixture fx(kChainData);
    Query q4ish = parse_query("SELECT ?y WHERE { ?y ex:subOrg <http://ex/univ1> }", fx.prefixes,
                              fx.dicts);
    auto g = generalize_bgp(q4ish.bgp);
    REQUIRE(g.size() == 1);
    CHECK(g[0].s.is_var());
    CHECK(g[0].p.is_const());
    CHECK(g[0].o.is_var());
    CHECK(g[0].o.name != "y");

    // all-variable pattern is a fixpoint
    Query allvar = parse_query("SELECT ?a WHERE { ?a ex:subOrg ?b }", fx.prefixes, fx.dicts);
    CHECK(generalize_bgp(allvar.bgp) == allvar.bgp);

    // two queries differing only in constants/naming collapse to one key
    Query other = parse_query("SELECT ?q WHERE { ?q ex:subOrg <http://ex/dbteam> }", fx.prefixes,
                              fx.dicts);
    CHECK(canonical_bgp_key(generalize_bgp(q4ish.bgp)) ==
          canonical_bgp_key(generalize_bgp(other.bgp)));
    CHECK(canonical_bgp_key(generalize_bgp(q4ish.bgp)) ==
          canonical_bgp_key(generalize_bgp(allvar.bgp)));

    Query varp = parse_query("SELECT ?x WHERE { ?x ?p ?y }", fx.prefixes, fx.dicts);
    CHECK_THROWS_AS(generalize_bgp(varp.bgp), UnsupportedPattern);
}
