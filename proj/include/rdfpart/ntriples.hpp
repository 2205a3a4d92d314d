#ifndef RDFPART_NTRIPLES_HPP
#define RDFPART_NTRIPLES_HPP

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rdfpart/error.hpp"
#include "rdfpart/term.hpp"

namespace rdfpart {

/// What to do with a malformed statement: raise MalformedLine, or count it
/// and continue with the next line.
enum class ParsePolicy { Abort, SkipAndCount };

struct ParseStats {
    std::size_t statements = 0;
    std::size_t skipped = 0;
};

namespace detail {

inline bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\r'; }

inline void skip_ws(std::string_view line, std::size_t& pos) {
    while (pos < line.size() && is_ws(line[pos])) ++pos;
}

inline Term parse_iri(std::string_view line, std::size_t& pos, std::size_t lineno) {
    // caller guarantees line[pos] == '<'
    std::size_t close = line.find('>', pos + 1);
    if (close == std::string_view::npos) throw MalformedLine(lineno, "unterminated IRI");
    std::string_view lex = line.substr(pos + 1, close - pos - 1);
    if (lex.empty()) throw MalformedLine(lineno, "empty IRI");
    if (lex.find(' ') != std::string_view::npos || lex.find('\t') != std::string_view::npos)
        throw MalformedLine(lineno, "whitespace in IRI");
    pos = close + 1;
    return Term::iri(std::string(lex));
}

inline Term parse_blank(std::string_view line, std::size_t& pos, std::size_t lineno) {
    // caller guarantees line starts with "_:" at pos
    std::size_t start = pos + 2;
    std::size_t end = start;
    while (end < line.size() && !is_ws(line[end])) ++end;
    if (end == start) throw MalformedLine(lineno, "empty blank node label");
    pos = end;
    return Term::blank(std::string(line.substr(start, end - start)));
}

inline Term parse_literal(std::string_view line, std::size_t& pos, std::size_t lineno) {
    // caller guarantees line[pos] == '"'; the stored lexical is the verbatim
    // token including quotes and any @lang / ^^<datatype> suffix
    std::size_t start = pos;
    std::size_t i = pos + 1;
    while (i < line.size()) {
        if (line[i] == '\\') {
            i += 2;
            continue;
        }
        if (line[i] == '"') break;
        ++i;
    }
    if (i >= line.size()) throw MalformedLine(lineno, "unterminated literal");
    ++i;  // past closing quote
    if (i < line.size() && line[i] == '@') {
        ++i;
        while (i < line.size() && (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '-'))
            ++i;
    } else if (i + 1 < line.size() && line[i] == '^' && line[i + 1] == '^') {
        i += 2;
        if (i >= line.size() || line[i] != '<') throw MalformedLine(lineno, "malformed datatype");
        std::size_t close = line.find('>', i + 1);
        if (close == std::string_view::npos) throw MalformedLine(lineno, "unterminated datatype IRI");
        i = close + 1;
    }
    Term t = Term::literal(std::string(line.substr(start, i - start)));
    pos = i;
    return t;
}

inline TermTriple parse_statement(std::string_view line, std::size_t lineno) {
    std::size_t pos = 0;
    auto next_term = [&](bool allow_literal, bool allow_blank, const char* role) -> Term {
        skip_ws(line, pos);
        if (pos >= line.size()) throw MalformedLine(lineno, "truncated statement");
        char c = line[pos];
        if (c == '<') return parse_iri(line, pos, lineno);
        if (c == '_' && pos + 1 < line.size() && line[pos + 1] == ':') {
            if (!allow_blank) throw MalformedLine(lineno, std::string("blank node as ") + role);
            return parse_blank(line, pos, lineno);
        }
        if (c == '"') {
            if (!allow_literal) throw MalformedLine(lineno, std::string("literal as ") + role);
            return parse_literal(line, pos, lineno);
        }
        throw MalformedLine(lineno, std::string("expected term as ") + role);
    };

    Term s = next_term(false, true, "subject");
    Term p = next_term(false, false, "predicate");
    Term o = next_term(true, true, "object");
    skip_ws(line, pos);
    if (pos >= line.size() || line[pos] != '.') throw MalformedLine(lineno, "truncated statement");
    ++pos;
    skip_ws(line, pos);
    if (pos < line.size() && line[pos] != '#') throw MalformedLine(lineno, "trailing garbage after '.'");
    return {std::move(s), std::move(p), std::move(o)};
}

}  // namespace detail

/// Stream one term triple per valid N-Triples statement to `sink`, in input
/// order. Blank lines and '#' comment lines are skipped. Malformed lines are
/// reported per the policy.
template <typename Sink>
void for_each_ntriple(std::string_view text, Sink&& sink, ParsePolicy policy = ParsePolicy::Abort,
                      ParseStats* stats = nullptr) {
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line =
            eol == std::string_view::npos ? text.substr(pos) : text.substr(pos, eol - pos);
        ++lineno;
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

        std::size_t first = 0;
        detail::skip_ws(line, first);
        if (first >= line.size() || line[first] == '#') continue;
        try {
            sink(detail::parse_statement(line, lineno));
            if (stats) ++stats->statements;
        } catch (const MalformedLine&) {
            if (policy == ParsePolicy::Abort) throw;
            if (stats) ++stats->skipped;
        }
    }
}

inline std::vector<TermTriple> parse_ntriples(std::string_view text,
                                              ParsePolicy policy = ParsePolicy::Abort,
                                              ParseStats* stats = nullptr) {
    std::vector<TermTriple> out;
    for_each_ntriple(text, [&](TermTriple t) { out.push_back(std::move(t)); }, policy, stats);
    return out;
}

}  // namespace rdfpart

#endif  // RDFPART_NTRIPLES_HPP
