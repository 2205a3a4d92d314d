#ifndef RDFPART_TERM_HPP
#define RDFPART_TERM_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <tuple>

#include "rdfpart/hashing.hpp"

namespace rdfpart {

using NodeId = std::uint64_t;
using PredId = std::uint64_t;
using PartitionId = std::uint32_t;

enum class TermKind : std::uint8_t { IRI, BlankNode, Literal };

/// One RDF term. IRIs and blank nodes store the bare lexical form (no angle
/// brackets, no "_:" prefix); literals keep the full N-Triples token verbatim,
/// quotes and datatype/language tag included.
struct Term {
    std::string lexical;
    TermKind kind = TermKind::IRI;

    static Term iri(std::string lex) { return {std::move(lex), TermKind::IRI}; }
    static Term blank(std::string label) { return {std::move(label), TermKind::BlankNode}; }
    static Term literal(std::string token) { return {std::move(token), TermKind::Literal}; }

    bool operator==(const Term&) const = default;
    auto operator<=>(const Term&) const = default;

    /// N-Triples serialization of the term.
    std::string to_ntriples() const {
        switch (kind) {
            case TermKind::IRI: return "<" + lexical + ">";
            case TermKind::BlankNode: return "_:" + lexical;
            case TermKind::Literal: return lexical;
        }
        return lexical;
    }
};

struct TermHash {
    std::size_t operator()(const Term& t) const {
        std::uint64_t h = mix64(static_cast<std::uint64_t>(t.kind) + kHashPhi);
        for (char c : t.lexical) {
            h = mix64(h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
        }
        return static_cast<std::size_t>(h);
    }
};

/// Dictionary-encoded triple. Subjects and objects share the node id space,
/// predicates have their own.
struct EncodedTriple {
    NodeId s = 0;
    PredId p = 0;
    NodeId o = 0;

    bool operator==(const EncodedTriple&) const = default;
    auto operator<=>(const EncodedTriple&) const = default;
};

struct TripleHash {
    std::size_t operator()(const EncodedTriple& t) const {
        return static_cast<std::size_t>(hash_ids({t.s, t.p, t.o}, 0x5eedULL));
    }
};

struct TermTriple {
    Term s, p, o;

    bool operator==(const TermTriple&) const = default;
};

}  // namespace rdfpart

#endif  // RDFPART_TERM_HPP
