#ifndef RDFPART_DICTIONARY_HPP
#define RDFPART_DICTIONARY_HPP

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rdfpart/error.hpp"
#include "rdfpart/term.hpp"

namespace rdfpart {

/// Bidirectional Term <-> dense id map. Ids are assigned in first-seen order,
/// 0..count-1 with no gaps, so encoded node ids double as graph vertex ids.
class Dictionary {
public:
    std::uint64_t get_or_add(const Term& t) {
        auto it = ids_.find(t);
        if (it != ids_.end()) return it->second;
        std::uint64_t id = terms_.size();
        terms_.push_back(t);
        ids_.emplace(t, id);
        return id;
    }

    /// Lookup without insertion; returns false if the term is absent.
    bool try_get(const Term& t, std::uint64_t& id) const {
        auto it = ids_.find(t);
        if (it == ids_.end()) return false;
        id = it->second;
        return true;
    }

    const Term& term(std::uint64_t id) const {
        if (id >= terms_.size()) throw UnknownId(id);
        return terms_[id];
    }

    std::uint64_t size() const { return terms_.size(); }
    std::span<const Term> terms() const { return terms_; }

private:
    std::vector<Term> terms_;
    std::unordered_map<Term, std::uint64_t, TermHash> ids_;
};

/// The two dictionaries of the store: one for subjects/objects (nodes), one
/// for predicates.
struct DictionaryPair {
    Dictionary nodes;
    Dictionary predicates;

    EncodedTriple encode(const TermTriple& t) {
        return {nodes.get_or_add(t.s), predicates.get_or_add(t.p), nodes.get_or_add(t.o)};
    }

    TermTriple decode(const EncodedTriple& t) const {
        return {nodes.term(t.s), predicates.term(t.p), nodes.term(t.o)};
    }
};

/// Encode a batch of term triples, extending the dictionaries as new terms
/// appear. Output order and count match the input.
inline std::vector<EncodedTriple> encode_triples(std::span<const TermTriple> input,
                                                 DictionaryPair& dicts) {
    std::vector<EncodedTriple> out;
    out.reserve(input.size());
    for (const TermTriple& t : input) out.push_back(dicts.encode(t));
    return out;
}

inline std::vector<TermTriple> decode_triples(std::span<const EncodedTriple> input,
                                              const DictionaryPair& dicts) {
    std::vector<TermTriple> out;
    out.reserve(input.size());
    for (const EncodedTriple& t : input) out.push_back(dicts.decode(t));
    return out;
}

}  // namespace rdfpart

#endif  // RDFPART_DICTIONARY_HPP
