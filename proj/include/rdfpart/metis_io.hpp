#ifndef RDFPART_METIS_IO_HPP
#define RDFPART_METIS_IO_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rdfpart/error.hpp"
#include "rdfpart/graph.hpp"

namespace rdfpart {

/// Plain Metis graph format: header "n m", then one line per vertex listing
/// its neighbors. Vertices are 1-based in the file, 0-based in memory.
/// Isolated vertices keep an empty line so NodeId <-> line alignment holds.
inline std::string write_metis(const UndirectedGraph& g) {
    std::ostringstream out;
    out << g.vertex_count() << ' ' << g.edge_count << '\n';
    for (NodeId v = 0; v < g.vertex_count(); ++v) {
        bool first = true;
        for (NodeId u : g.adj[v]) {
            if (!first) out << ' ';
            out << (u + 1);
            first = false;
        }
        out << '\n';
    }
    return out.str();
}

inline void write_metis_file(const std::filesystem::path& path, const UndirectedGraph& g) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + path.string());
    f << write_metis(g);
}

/// Inverse of write_metis. Validates the header against the adjacency lines.
inline UndirectedGraph read_metis(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw CorruptFile("missing metis header");
    std::istringstream header(line);
    std::size_t n = 0, m = 0;
    if (!(header >> n >> m)) throw CorruptFile("bad metis header");

    UndirectedGraph g;
    g.adj.resize(n);
    std::size_t mentions = 0;
    for (std::size_t v = 0; v < n; ++v) {
        if (!std::getline(in, line)) throw CorruptFile("metis line count mismatch");
        std::istringstream row(line);
        std::uint64_t u1;
        while (row >> u1) {
            if (u1 < 1 || u1 > n) throw CorruptFile("metis neighbor id out of range");
            g.adj[v].push_back(u1 - 1);
            ++mentions;
        }
    }
    if (mentions != 2 * m) throw CorruptFile("metis edge count mismatch");
    for (auto& neighbors : g.adj) std::sort(neighbors.begin(), neighbors.end());
    g.edge_count = m;
    return g;
}

inline UndirectedGraph read_metis_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return read_metis(in);
}

/// Metis partition output: one 0-based partition id per line, line i maps to
/// vertex i-1. Fails on a line count mismatch or an id >= k.
inline PartitionMap read_metis_partition(std::istream& in, std::size_t vertex_count,
                                         std::uint32_t k) {
    PartitionMap pm;
    pm.k = k;
    pm.assignment.reserve(vertex_count);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::uint64_t pid = std::stoull(line);
        if (pid >= k) throw CorruptFile("partition id " + std::to_string(pid) + " >= k");
        pm.assignment.push_back(static_cast<PartitionId>(pid));
    }
    if (pm.assignment.size() != vertex_count)
        throw CorruptFile("partition line count " + std::to_string(pm.assignment.size()) +
                          " != vertex count " + std::to_string(vertex_count));
    return pm;
}

inline PartitionMap read_metis_partition_file(const std::filesystem::path& path,
                                              std::size_t vertex_count, std::uint32_t k) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return read_metis_partition(in, vertex_count, k);
}

inline void write_metis_partition_file(const std::filesystem::path& path, const PartitionMap& pm) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + path.string());
    for (PartitionId p : pm.assignment) f << p << '\n';
}

}  // namespace rdfpart

#endif  // RDFPART_METIS_IO_HPP
