#ifndef RDFPART_GRAPH_HPP
#define RDFPART_GRAPH_HPP

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "rdfpart/error.hpp"
#include "rdfpart/term.hpp"

namespace rdfpart {

/// Unlabeled undirected graph over dense NodeIds. Adjacency lists are sorted
/// ascending, hold no self-loops and no duplicates, and are symmetric.
struct UndirectedGraph {
    std::vector<std::vector<NodeId>> adj;
    std::size_t edge_count = 0;  // each undirected edge counted once

    std::size_t vertex_count() const { return adj.size(); }

    bool has_edge(NodeId a, NodeId b) const {
        const auto& n = adj[a];
        return std::binary_search(n.begin(), n.end(), b);
    }
};

/// Total assignment of graph vertices to partitions 0..k-1.
struct PartitionMap {
    std::vector<PartitionId> assignment;
    std::uint32_t k = 1;

    PartitionId at(NodeId v) const {
        if (v >= assignment.size()) throw UnmappedSubject(v);
        return assignment[v];
    }
};

/// Drop predicates, undirect, dedup: edge set is {{s,o} : (s,p,o) in input,
/// s != o}. Vertices are all ids below `vertex_count`.
inline UndirectedGraph to_undirected(std::span<const EncodedTriple> triples,
                                     std::size_t vertex_count) {
    UndirectedGraph g;
    g.adj.resize(vertex_count);
    for (const EncodedTriple& t : triples) {
        if (t.s == t.o) continue;
        g.adj[t.s].push_back(t.o);
        g.adj[t.o].push_back(t.s);
    }
    for (auto& neighbors : g.adj) {
        std::sort(neighbors.begin(), neighbors.end());
        neighbors.erase(std::unique(neighbors.begin(), neighbors.end()), neighbors.end());
        g.edge_count += neighbors.size();
    }
    g.edge_count /= 2;
    return g;
}

/// Overload deriving the vertex count from the highest id present.
inline UndirectedGraph to_undirected(std::span<const EncodedTriple> triples) {
    std::size_t n = 0;
    for (const EncodedTriple& t : triples) n = std::max({n, t.s + 1, t.o + 1});
    return to_undirected(triples, n);
}

/// Number of edges whose endpoints land in different partitions.
inline std::size_t edge_cut(const UndirectedGraph& g, const PartitionMap& pm) {
    std::size_t cut = 0;
    for (NodeId v = 0; v < g.vertex_count(); ++v) {
        for (NodeId u : g.adj[v]) {
            if (u > v && pm.assignment[u] != pm.assignment[v]) ++cut;
        }
    }
    return cut;
}

}  // namespace rdfpart

#endif  // RDFPART_GRAPH_HPP
