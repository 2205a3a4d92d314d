#ifndef RDFPART_QUERY_HPP
#define RDFPART_QUERY_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rdfpart/dictionary.hpp"
#include "rdfpart/error.hpp"
#include "rdfpart/hashing.hpp"
#include "rdfpart/partitioner.hpp"
#include "rdfpart/term.hpp"

namespace rdfpart {

/// One position of a triple pattern: a named variable, an encoded constant,
/// or a constant term that is absent from the dictionaries (such a pattern
/// can never match, but is not an error).
struct PatternAtom {
    enum class Kind : std::uint8_t { Variable, Constant, Unresolved };

    Kind kind = Kind::Variable;
    std::string name;        // variable name, or lexical form when Unresolved
    std::uint64_t id = 0;    // encoded id when Constant

    static PatternAtom variable(std::string n) { return {Kind::Variable, std::move(n), 0}; }
    static PatternAtom constant(std::uint64_t id) { return {Kind::Constant, {}, id}; }
    static PatternAtom unresolved(std::string lexical) {
        return {Kind::Unresolved, std::move(lexical), 0};
    }

    bool is_var() const { return kind == Kind::Variable; }
    bool is_const() const { return kind == Kind::Constant; }

    bool operator==(const PatternAtom&) const = default;
};

struct TriplePattern {
    PatternAtom s, p, o;

    bool operator==(const TriplePattern&) const = default;
};

struct Query {
    std::string id;  // report label, usually the file stem
    std::vector<std::string> projection;
    std::vector<TriplePattern> bgp;
};

using PrefixMap = std::unordered_map<std::string, std::string>;

/// Prefix file: one "prefix<TAB>iri" line per entry; '#' comments allowed.
inline PrefixMap load_prefixes(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    PrefixMap m;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos) throw Error("bad prefix line: " + line);
        m[line.substr(0, tab)] = line.substr(tab + 1);
    }
    return m;
}

namespace detail {

struct QueryLexer {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size()) {
            if (std::isspace(static_cast<unsigned char>(text[pos]))) {
                ++pos;
            } else if (text[pos] == '#') {  // line comment
                while (pos < text.size() && text[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    bool eof() {
        skip_ws();
        return pos >= text.size();
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    bool try_consume(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    /// Bare word: keyword, variable body, or prefixed name.
    std::string word() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size()) {
            char c = text[pos];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '-' ||
                c == '.' || c == '/')
                ++pos;
            else
                break;
        }
        // a trailing '.' is the statement separator, not part of the name
        while (pos > start && text[pos - 1] == '.') --pos;
        return std::string(text.substr(start, pos - start));
    }
};

inline bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    }
    return true;
}

inline Term parse_query_term(QueryLexer& lex, const PrefixMap& prefixes) {
    lex.skip_ws();
    if (lex.pos >= lex.text.size()) throw SyntaxError(lex.pos, "unexpected end of query");
    char c = lex.text[lex.pos];
    if (c == '<') {
        std::size_t close = lex.text.find('>', lex.pos + 1);
        if (close == std::string_view::npos) throw SyntaxError(lex.pos, "unterminated IRI");
        Term t = Term::iri(std::string(lex.text.substr(lex.pos + 1, close - lex.pos - 1)));
        lex.pos = close + 1;
        return t;
    }
    if (c == '"') {
        std::size_t start = lex.pos;
        std::size_t i = lex.pos + 1;
        while (i < lex.text.size() && lex.text[i] != '"') {
            if (lex.text[i] == '\\') ++i;
            ++i;
        }
        if (i >= lex.text.size()) throw SyntaxError(start, "unterminated literal");
        ++i;
        if (i < lex.text.size() && lex.text[i] == '@') {
            ++i;
            while (i < lex.text.size() &&
                   (std::isalnum(static_cast<unsigned char>(lex.text[i])) || lex.text[i] == '-'))
                ++i;
        } else if (i + 1 < lex.text.size() && lex.text[i] == '^' && lex.text[i + 1] == '^') {
            i += 2;
            if (i >= lex.text.size() || lex.text[i] != '<')
                throw SyntaxError(i, "malformed datatype");
            std::size_t close = lex.text.find('>', i);
            if (close == std::string_view::npos) throw SyntaxError(i, "unterminated datatype");
            i = close + 1;
        }
        Term t = Term::literal(std::string(lex.text.substr(start, i - start)));
        lex.pos = i;
        return t;
    }
    std::size_t at = lex.pos;
    std::string w = lex.word();
    std::size_t colon = w.find(':');
    if (w.empty() || colon == std::string::npos)
        throw SyntaxError(at, "expected IRI, prefixed name, variable or literal");
    std::string prefix = w.substr(0, colon);
    auto it = prefixes.find(prefix);
    if (it == prefixes.end()) throw SyntaxError(at, "unknown prefix '" + prefix + "'");
    return Term::iri(it->second + w.substr(colon + 1));
}

inline PatternAtom atom_for_term(const Term& t, const Dictionary& dict) {
    std::uint64_t id;
    if (dict.try_get(t, id)) return PatternAtom::constant(id);
    return PatternAtom::unresolved(t.to_ntriples());
}

}  // namespace detail

/// Parse the conjunctive SELECT/WHERE subset. Constants are encoded against
/// the dictionaries; a constant term absent from the data yields an
/// Unresolved atom whose pattern simply never matches. OPTIONAL, UNION and
/// FILTER raise Unsupported.
inline Query parse_query(std::string_view text, const PrefixMap& prefixes,
                         const DictionaryPair& dicts, std::string id = "query") {
    detail::QueryLexer lex{text};
    Query q;
    q.id = std::move(id);

    std::string kw = lex.word();
    if (!detail::iequals(kw, "SELECT")) throw SyntaxError(0, "expected SELECT");
    while (lex.peek() == '?') {
        lex.try_consume('?');
        std::string name = lex.word();
        if (name.empty()) throw SyntaxError(lex.pos, "empty variable name");
        q.projection.push_back(name);
    }
    if (q.projection.empty()) throw SyntaxError(lex.pos, "no projection variables");

    std::size_t where_at = lex.pos;
    kw = lex.word();
    if (!detail::iequals(kw, "WHERE")) throw SyntaxError(where_at, "expected WHERE");
    if (!lex.try_consume('{')) throw SyntaxError(lex.pos, "expected '{'");

    // reject unsupported algebra wherever it appears in the block (outside
    // IRIs and literals)
    for (std::size_t i = lex.pos; i < text.size();) {
        char c = text[i];
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') ++i;
        } else if (c == '<') {
            std::size_t close = text.find('>', i);
            i = close == std::string_view::npos ? text.size() : close + 1;
        } else if (c == '"') {
            std::size_t j = i + 1;
            while (j < text.size() && text[j] != '"') j += text[j] == '\\' ? 2 : 1;
            i = j + 1;
        } else if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && std::isalpha(static_cast<unsigned char>(text[j]))) ++j;
            std::string_view w = text.substr(i, j - i);
            auto name_char = [](char nc) {
                return std::isalnum(static_cast<unsigned char>(nc)) || nc == ':' || nc == '_' ||
                       nc == '-' || nc == '?';
            };
            bool inside_name = (i > 0 && name_char(text[i - 1])) ||
                               (j < text.size() && name_char(text[j]));
            if (!inside_name) {
                for (const char* bad : {"OPTIONAL", "UNION", "FILTER"}) {
                    if (detail::iequals(w, bad)) throw Unsupported(bad);
                }
            }
            i = j;
        } else {
            ++i;
        }
    }

    auto parse_atom = [&](bool predicate_position) -> PatternAtom {
        if (lex.peek() == '?') {
            lex.try_consume('?');
            std::string name = lex.word();
            if (name.empty()) throw SyntaxError(lex.pos, "empty variable name");
            return PatternAtom::variable(name);
        }
        Term t = detail::parse_query_term(lex, prefixes);
        return detail::atom_for_term(t, predicate_position ? dicts.predicates : dicts.nodes);
    };

    while (true) {
        if (lex.try_consume('}')) break;
        if (lex.eof()) throw SyntaxError(lex.pos, "unterminated WHERE block");
        TriplePattern tp;
        tp.s = parse_atom(false);
        tp.p = parse_atom(true);
        tp.o = parse_atom(false);
        q.bgp.push_back(std::move(tp));
        lex.try_consume('.');
    }
    if (q.bgp.empty()) throw SyntaxError(lex.pos, "empty BGP");
    if (!lex.eof()) throw SyntaxError(lex.pos, "trailing content after '}'");

    for (const std::string& v : q.projection) {
        bool found = false;
        for (const TriplePattern& tp : q.bgp) {
            for (const PatternAtom* a : {&tp.s, &tp.p, &tp.o}) {
                if (a->is_var() && a->name == v) found = true;
            }
        }
        if (!found) throw SyntaxError(0, "projection variable ?" + v + " not in BGP");
    }
    return q;
}

inline Query load_query_file(const std::filesystem::path& path, const PrefixMap& prefixes,
                             const DictionaryPair& dicts) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_query(text, prefixes, dicts, path.stem().string());
}

// ---------------------------------------------------------------------------
// BGP evaluation

using Row = std::vector<std::uint64_t>;

struct VecHash {
    std::size_t operator()(const Row& r) const {
        std::uint64_t h = mix64(r.size() + kHashPhi);
        for (std::uint64_t v : r) h = mix64(h ^ (v + kHashPhi));
        return static_cast<std::size_t>(h);
    }
};

/// A set of binding rows with their column names.
struct RowSet {
    std::vector<std::string> vars;
    std::vector<Row> rows;

    int slot_of(std::string_view name) const {
        for (std::size_t i = 0; i < vars.size(); ++i) {
            if (vars[i] == name) return static_cast<int>(i);
        }
        return -1;
    }
};

/// Query results: projected columns, rows sorted and deduplicated.
struct ResultSet {
    std::vector<std::string> vars;
    std::vector<Row> rows;

    void normalize() {
        std::sort(rows.begin(), rows.end());
        rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    }

    bool operator==(const ResultSet&) const = default;
};

namespace detail {

/// Match one pattern against a triple range, producing a row per match over
/// the pattern's distinct variables (repeated variables enforce equality).
template <typename TripleRange>
RowSet match_pattern(TripleRange&& triples, const TriplePattern& tp) {
    RowSet out;
    std::vector<const PatternAtom*> atoms{&tp.s, &tp.p, &tp.o};
    std::vector<int> var_slot(3, -1);
    for (std::size_t i = 0; i < 3; ++i) {
        if (!atoms[i]->is_var()) continue;
        int prior = out.slot_of(atoms[i]->name);
        if (prior >= 0) {
            var_slot[i] = prior;
        } else {
            var_slot[i] = static_cast<int>(out.vars.size());
            out.vars.push_back(atoms[i]->name);
        }
    }
    // unresolved constants can never match; keep the schema, drop the rows
    for (const PatternAtom* a : atoms) {
        if (a->kind == PatternAtom::Kind::Unresolved) return out;
    }
    // first position binding each slot; later mentions of the slot must agree
    int first_mention[3] = {-1, -1, -1};
    for (std::size_t i = 0; i < 3; ++i) {
        if (var_slot[i] < 0) continue;
        for (std::size_t j = 0; j < i; ++j) {
            if (var_slot[j] == var_slot[i]) {
                first_mention[i] = static_cast<int>(j);
                break;
            }
        }
    }
    Row row(out.vars.size());
    for (const EncodedTriple& t : triples) {
        const std::uint64_t vals[3] = {t.s, t.p, t.o};
        bool ok = true;
        for (std::size_t i = 0; i < 3 && ok; ++i) {
            if (atoms[i]->is_const())
                ok = vals[i] == atoms[i]->id;
            else if (first_mention[i] >= 0)
                ok = vals[i] == vals[first_mention[i]];
        }
        if (!ok) continue;
        for (std::size_t i = 0; i < 3; ++i) {
            if (var_slot[i] >= 0 && first_mention[i] < 0) row[var_slot[i]] = vals[i];
        }
        out.rows.push_back(row);
    }
    return out;
}

/// Natural join on the shared columns (cartesian product when none).
inline RowSet join_rows(const RowSet& a, const RowSet& b) {
    std::vector<std::pair<int, int>> shared;  // (slot in a, slot in b)
    std::vector<int> b_extra;
    for (std::size_t j = 0; j < b.vars.size(); ++j) {
        int i = a.slot_of(b.vars[j]);
        if (i >= 0)
            shared.emplace_back(i, static_cast<int>(j));
        else
            b_extra.push_back(static_cast<int>(j));
    }

    RowSet out;
    out.vars = a.vars;
    for (int j : b_extra) out.vars.push_back(b.vars[j]);

    auto key_of = [&](const Row& row, bool from_a) {
        Row key;
        key.reserve(shared.size());
        for (auto [ia, ib] : shared) key.push_back(from_a ? row[ia] : row[ib]);
        return key;
    };

    std::unordered_map<Row, std::vector<std::size_t>, VecHash> index;
    for (std::size_t r = 0; r < b.rows.size(); ++r) index[key_of(b.rows[r], false)].push_back(r);

    for (const Row& ra : a.rows) {
        auto it = index.find(key_of(ra, true));
        if (it == index.end()) continue;
        for (std::size_t rb : it->second) {
            Row row = ra;
            for (int j : b_extra) row.push_back(b.rows[rb][j]);
            out.rows.push_back(std::move(row));
        }
    }
    return out;
}

/// Join pattern row sets in the given order.
inline RowSet evaluate_ordered(std::vector<RowSet>& pattern_rows, std::span<const std::size_t> order) {
    RowSet acc = std::move(pattern_rows[order[0]]);
    for (std::size_t i = 1; i < order.size(); ++i) acc = join_rows(acc, pattern_rows[order[i]]);
    return acc;
}

/// Cheapest-first join order that avoids cartesian products when it can:
/// start at the smallest row set, then repeatedly take the smallest row set
/// sharing a variable with what is already bound.
inline std::vector<std::size_t> greedy_order(const std::vector<RowSet>& pattern_rows) {
    const std::size_t m = pattern_rows.size();
    std::vector<bool> used(m, false);
    std::vector<std::size_t> order;
    std::vector<std::string> bound;

    auto shares_bound = [&](std::size_t idx) {
        for (const std::string& v : pattern_rows[idx].vars) {
            if (std::find(bound.begin(), bound.end(), v) != bound.end()) return true;
        }
        return false;
    };
    auto absorb = [&](std::size_t idx) {
        used[idx] = true;
        order.push_back(idx);
        for (const std::string& v : pattern_rows[idx].vars) {
            if (std::find(bound.begin(), bound.end(), v) == bound.end()) bound.push_back(v);
        }
    };

    for (std::size_t step = 0; step < m; ++step) {
        std::size_t best = m;
        bool best_connected = false;
        for (std::size_t i = 0; i < m; ++i) {
            if (used[i]) continue;
            bool connected = !order.empty() && shares_bound(i);
            if (order.empty()) connected = true;
            auto better = [&]() {
                if (best == m) return true;
                if (connected != best_connected) return connected;
                if (pattern_rows[i].rows.size() != pattern_rows[best].rows.size())
                    return pattern_rows[i].rows.size() < pattern_rows[best].rows.size();
                return false;  // keep smaller index
            };
            if (better()) {
                best = i;
                best_connected = connected;
            }
        }
        absorb(best);
    }
    return order;
}

inline ResultSet project(const RowSet& rows, const std::vector<std::string>& projection) {
    ResultSet out;
    out.vars = projection;
    std::vector<int> slots;
    slots.reserve(projection.size());
    for (const std::string& v : projection) {
        int s = rows.slot_of(v);
        if (s < 0) throw Error("projection variable ?" + v + " unbound");
        slots.push_back(s);
    }
    out.rows.reserve(rows.rows.size());
    for (const Row& r : rows.rows) {
        Row pr;
        pr.reserve(slots.size());
        for (int s : slots) pr.push_back(r[s]);
        out.rows.push_back(std::move(pr));
    }
    out.normalize();
    return out;
}

}  // namespace detail

/// Decode binding rows back to lexical form. A variable bound only in
/// predicate position resolves against the predicate dictionary.
inline std::vector<std::vector<std::string>> decode_rows(const ResultSet& rs, const Query& q,
                                                         const DictionaryPair& dicts) {
    std::vector<bool> is_node_var(rs.vars.size(), false);
    for (std::size_t i = 0; i < rs.vars.size(); ++i) {
        for (const TriplePattern& tp : q.bgp) {
            for (const PatternAtom* a : {&tp.s, &tp.o}) {
                if (a->is_var() && a->name == rs.vars[i]) is_node_var[i] = true;
            }
        }
    }
    std::vector<std::vector<std::string>> out;
    out.reserve(rs.rows.size());
    for (const Row& row : rs.rows) {
        std::vector<std::string> lex;
        lex.reserve(row.size());
        for (std::size_t i = 0; i < row.size(); ++i) {
            const Dictionary& dict = is_node_var[i] ? dicts.nodes : dicts.predicates;
            lex.push_back(dict.term(row[i]).to_ntriples());
        }
        out.push_back(std::move(lex));
    }
    return out;
}

/// Full-dataset reference evaluation: joins pattern match sets left to right
/// as written, projects, removes duplicates.
inline ResultSet evaluate_global(const Query& q, std::span<const EncodedTriple> triples) {
    std::vector<RowSet> pattern_rows;
    pattern_rows.reserve(q.bgp.size());
    for (const TriplePattern& tp : q.bgp) pattern_rows.push_back(detail::match_pattern(triples, tp));
    std::vector<std::size_t> order(q.bgp.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    RowSet acc = detail::evaluate_ordered(pattern_rows, order);
    return detail::project(acc, q.projection);
}

// ---------------------------------------------------------------------------
// Workload generalization and locality classification

/// Replace every constant subject/object with a fresh variable; keep
/// predicates constant. Variable-predicate patterns are rejected, since every
/// placement analysis anchors on the predicate.
inline std::vector<TriplePattern> generalize_bgp(const std::vector<TriplePattern>& bgp) {
    std::vector<TriplePattern> out;
    out.reserve(bgp.size());
    std::size_t fresh = 0;
    for (const TriplePattern& tp : bgp) {
        if (tp.p.is_var()) throw UnsupportedPattern("variable predicate");
        TriplePattern g = tp;
        if (!g.s.is_var()) g.s = PatternAtom::variable("_g" + std::to_string(fresh++));
        if (!g.o.is_var()) g.o = PatternAtom::variable("_g" + std::to_string(fresh++));
        out.push_back(std::move(g));
    }
    return out;
}

/// Canonical text key of a BGP, invariant under variable renaming: variables
/// are numbered by first occurrence in pattern order.
inline std::string canonical_bgp_key(const std::vector<TriplePattern>& bgp) {
    std::unordered_map<std::string, std::size_t> names;
    std::string key;
    auto atom_key = [&](const PatternAtom& a) -> std::string {
        switch (a.kind) {
            case PatternAtom::Kind::Variable: {
                auto [it, inserted] = names.emplace(a.name, names.size());
                return "v" + std::to_string(it->second);
            }
            case PatternAtom::Kind::Constant: return "c" + std::to_string(a.id);
            case PatternAtom::Kind::Unresolved: return "u" + a.name;
        }
        return "?";
    };
    for (const TriplePattern& tp : bgp) {
        key += atom_key(tp.s);
        key += ' ';
        key += atom_key(tp.p);
        key += ' ';
        key += atom_key(tp.o);
        key += '\n';
    }
    return key;
}

/// True when all patterns share one subject (variable or constant).
inline bool is_subject_star(const std::vector<TriplePattern>& bgp) {
    for (std::size_t i = 1; i < bgp.size(); ++i) {
        if (!(bgp[i].s == bgp[0].s)) return false;
    }
    return true;
}

namespace detail {

inline bool atoms_joinable(const PatternAtom& a, const PatternAtom& b) {
    if (a.is_var() && b.is_var()) return a.name == b.name;
    if (a.is_const() && b.is_const()) return a.id == b.id;
    return false;
}

/// Longest object->subject chain (counted in patterns) when every pattern is
/// reachable from a single root; 0 when no root covers the whole BGP.
inline std::size_t chain_cover_length(const std::vector<TriplePattern>& bgp) {
    const std::size_t m = bgp.size();
    std::vector<std::vector<std::size_t>> next(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i != j && atoms_joinable(bgp[i].o, bgp[j].s)) next[i].push_back(j);
        }
    }
    std::size_t best = 0;
    for (std::size_t root = 0; root < m; ++root) {
        std::vector<std::size_t> depth(m, m + 1);
        std::vector<std::size_t> queue{root};
        depth[root] = 0;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            std::size_t i = queue[qi];
            for (std::size_t j : next[i]) {
                if (depth[j] > depth[i] + 1) {
                    depth[j] = depth[i] + 1;
                    queue.push_back(j);
                }
            }
        }
        if (queue.size() != m) continue;  // root does not reach every pattern
        std::size_t longest = 0;
        for (std::size_t i = 0; i < m; ++i) longest = std::max(longest, depth[i]);
        std::size_t chain = longest + 1;
        if (best == 0 || chain < best) best = chain;
    }
    return best;
}

}  // namespace detail

enum class Locality { Local, Distributed };

/// Static per-strategy locality test; Local guarantees that per-partition
/// evaluation unioned over partitions equals the global result.
inline Locality classify_locality(const Query& q, Strategy strategy, std::uint32_t n,
                                  std::span<const std::string> workload_keys = {}) {
    if (q.bgp.size() == 1) return Locality::Local;  // no join anywhere
    for (const TriplePattern& tp : q.bgp) {
        if (tp.p.is_var()) return Locality::Distributed;
    }
    auto covered = [&]() {
        std::string key = canonical_bgp_key(generalize_bgp(q.bgp));
        for (const std::string& wk : workload_keys) {
            if (wk == key) return true;
        }
        return false;
    };
    switch (strategy) {
        case Strategy::RandomHash: return Locality::Distributed;
        case Strategy::SubjectHash:
            return is_subject_star(q.bgp) ? Locality::Local : Locality::Distributed;
        case Strategy::GraphSubject:
        case Strategy::GraphNHop: {
            std::uint32_t hops = strategy == Strategy::GraphSubject ? 1 : n;
            std::size_t chain = detail::chain_cover_length(q.bgp);
            return (chain > 0 && chain <= hops) ? Locality::Local : Locality::Distributed;
        }
        case Strategy::Warp: return covered() ? Locality::Local : Locality::Distributed;
        case Strategy::Hybrid:
            if (is_subject_star(q.bgp)) return Locality::Local;
            return covered() ? Locality::Local : Locality::Distributed;
    }
    return Locality::Distributed;
}

}  // namespace rdfpart

#endif  // RDFPART_QUERY_HPP
