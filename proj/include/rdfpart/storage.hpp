#ifndef RDFPART_STORAGE_HPP
#define RDFPART_STORAGE_HPP

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rdfpart/dictionary.hpp"
#include "rdfpart/error.hpp"
#include "rdfpart/term.hpp"

namespace rdfpart {

/// Read a whole file; gzip-compressed files are detected by the 1f 8b magic
/// bytes and inflated transparently.
inline std::string load_text_auto(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (raw.size() < 2 || static_cast<unsigned char>(raw[0]) != 0x1f ||
        static_cast<unsigned char>(raw[1]) != 0x8b) {
        return raw;
    }

    z_stream zs{};
    if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) throw Error("inflateInit failed");
    std::string out;
    std::vector<char> buf(1 << 16);
    zs.next_in = reinterpret_cast<Bytef*>(raw.data());
    zs.avail_in = static_cast<uInt>(raw.size());
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = reinterpret_cast<Bytef*>(buf.data());
        zs.avail_out = static_cast<uInt>(buf.size());
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw CorruptFile("gzip inflate error in " + path.string());
        }
        out.append(buf.data(), buf.size() - zs.avail_out);
    }
    inflateEnd(&zs);
    return out;
}

namespace detail {

inline void put_varint(std::string& out, std::uint64_t v) {
    while (v >= 0x80) {
        out.push_back(static_cast<char>((v & 0x7f) | 0x80));
        v >>= 7;
    }
    out.push_back(static_cast<char>(v));
}

inline std::uint64_t get_varint(std::string_view data, std::size_t& pos) {
    std::uint64_t v = 0;
    int shift = 0;
    while (true) {
        if (pos >= data.size()) throw CorruptFile("truncated varint");
        unsigned char b = static_cast<unsigned char>(data[pos++]);
        v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
        if (!(b & 0x80)) return v;
        shift += 7;
        if (shift > 63) throw CorruptFile("oversized varint");
    }
}

}  // namespace detail

inline constexpr std::string_view kTripleFileMagic = "RDPT1\n";

/// Binary triple file: magic, varint count, then s/p/o varints per triple.
inline void save_triples(const std::filesystem::path& path, std::span<const EncodedTriple> triples) {
    std::string out(kTripleFileMagic);
    detail::put_varint(out, triples.size());
    for (const EncodedTriple& t : triples) {
        detail::put_varint(out, t.s);
        detail::put_varint(out, t.p);
        detail::put_varint(out, t.o);
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

inline std::vector<EncodedTriple> load_triples(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (data.size() < kTripleFileMagic.size() ||
        std::string_view(data).substr(0, kTripleFileMagic.size()) != kTripleFileMagic)
        throw CorruptFile("bad magic in " + path.string());
    std::size_t pos = kTripleFileMagic.size();
    std::uint64_t count = detail::get_varint(data, pos);
    std::vector<EncodedTriple> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        EncodedTriple t;
        t.s = detail::get_varint(data, pos);
        t.p = detail::get_varint(data, pos);
        t.o = detail::get_varint(data, pos);
        out.push_back(t);
    }
    if (pos != data.size()) throw CorruptFile("trailing bytes in " + path.string());
    return out;
}

/// Dictionary file: one "id<TAB>lexical" line per entry, sorted by id, where
/// lexical is the N-Triples form of the term ("<iri>", "_:label", or the
/// verbatim literal token). Ids are dense, so line order equals insertion
/// order; the files diff cleanly.
inline void save_dictionary(const std::filesystem::path& path, const Dictionary& dict) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + path.string());
    std::uint64_t id = 0;
    for (const Term& t : dict.terms()) {
        f << id++ << '\t' << t.to_ntriples() << '\n';
    }
}

inline Dictionary load_dictionary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    Dictionary dict;
    std::string line;
    std::uint64_t expected = 0;
    while (std::getline(in, line)) {
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos || tab + 1 >= line.size())
            throw CorruptFile("bad dictionary line in " + path.string());
        std::uint64_t id = std::stoull(line.substr(0, tab));
        if (id != expected++) throw CorruptFile("non-dense ids in " + path.string());
        std::string lex = line.substr(tab + 1);
        Term t;
        if (lex[0] == '<' && lex.back() == '>') {
            t = Term::iri(lex.substr(1, lex.size() - 2));
        } else if (lex.size() > 2 && lex[0] == '_' && lex[1] == ':') {
            t = Term::blank(lex.substr(2));
        } else if (lex[0] == '"') {
            t = Term::literal(lex);
        } else {
            throw CorruptFile("unrecognized term form in " + path.string());
        }
        std::uint64_t got = dict.get_or_add(t);
        if (got != id) throw CorruptFile("duplicate term in " + path.string());
    }
    return dict;
}

inline void save_dictionaries(const std::filesystem::path& dir, const DictionaryPair& dicts) {
    save_dictionary(dir / "nodes.dict", dicts.nodes);
    save_dictionary(dir / "preds.dict", dicts.predicates);
}

inline DictionaryPair load_dictionaries(const std::filesystem::path& dir) {
    DictionaryPair d;
    d.nodes = load_dictionary(dir / "nodes.dict");
    d.predicates = load_dictionary(dir / "preds.dict");
    return d;
}

}  // namespace rdfpart

#endif  // RDFPART_STORAGE_HPP
