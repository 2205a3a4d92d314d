#ifndef RDFPART_ERROR_HPP
#define RDFPART_ERROR_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rdfpart {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed N-Triples statement.
class MalformedLine : public Error {
public:
    MalformedLine(std::size_t line, const std::string& reason)
        : Error("line " + std::to_string(line) + ": " + reason), line_(line), reason_(reason) {}

    std::size_t line() const { return line_; }
    const std::string& reason() const { return reason_; }

private:
    std::size_t line_;
    std::string reason_;
};

/// Query text that does not parse, with the offending position.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t pos, const std::string& reason)
        : Error("query syntax error at offset " + std::to_string(pos) + ": " + reason), pos_(pos) {}

    std::size_t pos() const { return pos_; }

private:
    std::size_t pos_;
};

/// Query uses a SPARQL feature outside the supported conjunctive subset.
class Unsupported : public Error {
public:
    explicit Unsupported(const std::string& feature) : Error("unsupported: " + feature) {}
};

/// An id with no dictionary entry.
class UnknownId : public Error {
public:
    explicit UnknownId(std::uint64_t id) : Error("unknown id " + std::to_string(id)), id_(id) {}

    std::uint64_t id() const { return id_; }

private:
    std::uint64_t id_;
};

/// A persisted file that cannot be read back (truncation, bad magic, bad counts).
class CorruptFile : public Error {
public:
    explicit CorruptFile(const std::string& detail) : Error("corrupt file: " + detail) {}
};

/// Requested partition count exceeds the vertex count.
class InfeasibleBalance : public Error {
public:
    InfeasibleBalance(std::size_t k, std::size_t n)
        : Error("cannot split " + std::to_string(n) + " vertices into " + std::to_string(k) +
                " partitions") {}
};

/// A triple whose subject is missing from the partition map.
class UnmappedSubject : public Error {
public:
    explicit UnmappedSubject(std::uint64_t subject)
        : Error("subject " + std::to_string(subject) + " has no partition assignment") {}
};

/// Workload pattern that cannot be used for placement analysis.
class UnsupportedPattern : public Error {
public:
    explicit UnsupportedPattern(const std::string& detail) : Error("unsupported pattern: " + detail) {}
};

}  // namespace rdfpart

#endif  // RDFPART_ERROR_HPP
