// Independent reference implementations used only by tests. Everything here
// is written the slow, obvious way on purpose: these are the oracles the
// library is checked against, so they must not share code with it.

#ifndef RDFPART_TESTS_ORACLES_HPP
#define RDFPART_TESTS_ORACLES_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rdfpart/dataset.hpp"
#include "rdfpart/graph.hpp"
#include "rdfpart/hashing.hpp"
#include "rdfpart/query.hpp"
#include "rdfpart/term.hpp"

namespace oracles {

using rdfpart::EncodedTriple;
using rdfpart::PartitionId;
using rdfpart::Query;
using rdfpart::TriplePattern;

// ---------------------------------------------------------------------------
// Brute-force query evaluation: recursive nested loops, no indexes, no join
// ordering, bindings held in a std::map.

using Binding = std::map<std::string, std::uint64_t>;

inline bool atom_matches(const rdfpart::PatternAtom& a, std::uint64_t value, Binding& b) {
    switch (a.kind) {
        case rdfpart::PatternAtom::Kind::Constant: return a.id == value;
        case rdfpart::PatternAtom::Kind::Unresolved: return false;
        case rdfpart::PatternAtom::Kind::Variable: {
            auto it = b.find(a.name);
            if (it != b.end()) return it->second == value;
            b.emplace(a.name, value);
            return true;
        }
    }
    return false;
}

inline void naive_extend(const Query& q, std::span<const EncodedTriple> triples, std::size_t depth,
                         Binding& binding, std::set<std::vector<std::uint64_t>>& out) {
    if (depth == q.bgp.size()) {
        std::vector<std::uint64_t> row;
        row.reserve(q.projection.size());
        for (const std::string& v : q.projection) row.push_back(binding.at(v));
        out.insert(std::move(row));
        return;
    }
    const TriplePattern& tp = q.bgp[depth];
    for (const EncodedTriple& t : triples) {
        Binding extended = binding;
        if (atom_matches(tp.s, t.s, extended) && atom_matches(tp.p, t.p, extended) &&
            atom_matches(tp.o, t.o, extended)) {
            naive_extend(q, triples, depth + 1, extended, out);
        }
    }
}

/// Nested-loop evaluation of a BGP query; returns the sorted distinct
/// projected rows.
inline rdfpart::ResultSet naive_evaluate(const Query& q, std::span<const EncodedTriple> triples) {
    std::set<std::vector<std::uint64_t>> rows;
    Binding empty;
    naive_extend(q, triples, 0, empty, rows);
    rdfpart::ResultSet rs;
    rs.vars = q.projection;
    rs.rows.assign(rows.begin(), rows.end());
    return rs;
}

// ---------------------------------------------------------------------------
// Exhaustive graph partitioning: try every assignment of n vertices to k
// partitions that satisfies the balance cap, return the minimum edge cut.

inline std::size_t cut_of(const rdfpart::UndirectedGraph& g,
                          const std::vector<PartitionId>& assign) {
    std::size_t cut = 0;
    for (rdfpart::NodeId v = 0; v < g.vertex_count(); ++v) {
        for (rdfpart::NodeId u : g.adj[v]) {
            if (u > v && assign[u] != assign[v]) ++cut;
        }
    }
    return cut;
}

inline std::optional<std::size_t> optimal_balanced_cut(const rdfpart::UndirectedGraph& g,
                                                       std::uint32_t k, std::size_t cap) {
    const std::size_t n = g.vertex_count();
    std::vector<PartitionId> assign(n, 0);
    std::optional<std::size_t> best;
    while (true) {
        std::vector<std::size_t> sizes(k, 0);
        for (PartitionId p : assign) ++sizes[p];
        if (*std::max_element(sizes.begin(), sizes.end()) <= cap) {
            std::size_t cut = cut_of(g, assign);
            if (!best || cut < *best) best = cut;
        }
        std::size_t i = 0;
        while (i < n && assign[i] + 1u == k) assign[i++] = 0;
        if (i == n) break;
        ++assign[i];
    }
    return best;
}

// ---------------------------------------------------------------------------
// Hop-expansion closure by breadth-first search over the triple graph
// (object of one triple feeding the subject of the next).

/// All triples reachable from `roots` in at most `hops` object->subject steps.
inline std::set<EncodedTriple> forward_closure(const std::set<EncodedTriple>& roots,
                                               std::span<const EncodedTriple> triples,
                                               std::uint32_t hops) {
    std::set<EncodedTriple> reached = roots;
    std::set<EncodedTriple> frontier = roots;
    for (std::uint32_t step = 0; step < hops; ++step) {
        std::set<EncodedTriple> next;
        for (const EncodedTriple& from : frontier) {
            for (const EncodedTriple& t : triples) {
                if (t.s == from.o && !reached.contains(t)) {
                    next.insert(t);
                    reached.insert(t);
                }
            }
        }
        if (next.empty()) break;
        frontier = std::move(next);
    }
    return reached;
}

/// The quad multiset a partition should hold after an n-hop expansion of
/// the given starting contents.
inline std::set<EncodedTriple> expected_partition_after_nhop(
    const rdfpart::PartitionedDataset& before, PartitionId p,
    std::span<const EncodedTriple> triples, std::uint32_t n) {
    std::set<EncodedTriple> start;
    for (const rdfpart::Quad& q : before.partition(p)) start.insert(q.triple);
    return forward_closure(start, triples, n - 1);
}

/// Path-enumeration n-hop check: every chain of up to n triples rooted at one
/// of the partition's originals must sit inside the partition.
inline bool exhaustive_nhop_holds(const rdfpart::PartitionedDataset& pd,
                                  std::span<const EncodedTriple> triples, std::uint32_t n) {
    for (PartitionId p = 0; p < pd.k(); ++p) {
        std::set<EncodedTriple> originals;
        for (const rdfpart::Quad& q : pd.partition(p)) {
            if (q.prov == rdfpart::Provenance::Original) originals.insert(q.triple);
        }
        for (const EncodedTriple& t : forward_closure(originals, triples, n - 1)) {
            if (!pd.contains(t, p)) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Independent recount of the distributed plan's exchanged tuples. Follows the
// written pattern order with bindings as plain maps, tagging each row with a
// partition and counting every move.

struct TaggedRow {
    Binding binding;
    PartitionId at;
};

inline std::size_t recount_exchanged_tuples(const Query& q, const rdfpart::PartitionedDataset& pd,
                                            std::uint64_t hash_seed) {
    using rdfpart::kHashPhi;
    using rdfpart::mix64;
    const std::uint32_t k = pd.k();
    std::size_t moved = 0;

    auto matches_in = [&](PartitionId p, const TriplePattern& tp) {
        std::vector<TaggedRow> rows;
        for (const rdfpart::Quad& quad : pd.partition(p)) {
            if (quad.prov != rdfpart::Provenance::Original) continue;
            Binding b;
            if (atom_matches(tp.s, quad.triple.s, b) && atom_matches(tp.p, quad.triple.p, b) &&
                atom_matches(tp.o, quad.triple.o, b)) {
                rows.push_back({std::move(b), p});
            }
        }
        return rows;
    };

    std::vector<TaggedRow> acc;
    for (PartitionId p = 0; p < k; ++p) {
        for (TaggedRow& r : matches_in(p, q.bgp[0])) acc.push_back(std::move(r));
    }

    for (std::size_t j = 1; j < q.bgp.size(); ++j) {
        std::vector<TaggedRow> pattern_rows;
        for (PartitionId p = 0; p < k; ++p) {
            for (TaggedRow& r : matches_in(p, q.bgp[j])) pattern_rows.push_back(std::move(r));
        }
        // join key: variables shared between the accumulated schema and the
        // incoming pattern, keyed in accumulated first-appearance order (the
        // tuple hash is order-sensitive). Derived from the query structure,
        // not from whichever rows happen to exist.
        std::vector<std::string> acc_schema;
        auto add_pattern_vars = [](const TriplePattern& tp, std::vector<std::string>& out) {
            for (const rdfpart::PatternAtom* a : {&tp.s, &tp.p, &tp.o}) {
                if (a->is_var() && std::find(out.begin(), out.end(), a->name) == out.end())
                    out.push_back(a->name);
            }
        };
        for (std::size_t i = 0; i < j; ++i) add_pattern_vars(q.bgp[i], acc_schema);
        std::vector<std::string> pattern_schema;
        add_pattern_vars(q.bgp[j], pattern_schema);
        std::vector<std::string> key_vars;
        for (const std::string& v : acc_schema) {
            if (std::find(pattern_schema.begin(), pattern_schema.end(), v) !=
                pattern_schema.end())
                key_vars.push_back(v);
        }

        auto target_of = [&](const Binding& b) {
            std::uint64_t h = mix64(hash_seed + kHashPhi);
            for (const std::string& v : key_vars) h = mix64(h ^ (b.at(v) + kHashPhi));
            return static_cast<PartitionId>(h % k);
        };

        std::vector<std::vector<TaggedRow>> acc_by_part(k), pat_by_part(k);
        for (TaggedRow& r : acc) {
            PartitionId t = target_of(r.binding);
            if (t != r.at) ++moved;
            r.at = t;
            acc_by_part[t].push_back(std::move(r));
        }
        for (TaggedRow& r : pattern_rows) {
            PartitionId t = target_of(r.binding);
            if (t != r.at) ++moved;
            r.at = t;
            pat_by_part[t].push_back(std::move(r));
        }

        std::vector<TaggedRow> next;
        for (PartitionId p = 0; p < k; ++p) {
            for (const TaggedRow& a : acc_by_part[p]) {
                for (const TaggedRow& b : pat_by_part[p]) {
                    bool compatible = true;
                    for (const auto& [name, value] : b.binding) {
                        auto it = a.binding.find(name);
                        if (it != a.binding.end() && it->second != value) {
                            compatible = false;
                            break;
                        }
                    }
                    if (!compatible) continue;
                    TaggedRow merged = a;
                    for (const auto& [name, value] : b.binding) merged.binding.emplace(name, value);
                    next.push_back(std::move(merged));
                }
            }
        }
        acc = std::move(next);
    }
    return moved;
}

// ---------------------------------------------------------------------------
// Seeded random fixtures.

/// Order-sensitive digest of a triple sequence, for large equality checks.
inline std::uint64_t sequence_digest(std::span<const EncodedTriple> triples) {
    std::uint64_t h = rdfpart::mix64(triples.size());
    for (const EncodedTriple& t : triples) {
        h = rdfpart::mix64(h ^ t.s);
        h = rdfpart::mix64(h ^ t.p);
        h = rdfpart::mix64(h ^ t.o);
    }
    return h;
}

inline std::vector<EncodedTriple> random_triples(std::uint64_t seed, std::size_t count,
                                                 std::uint64_t nodes, std::uint64_t preds) {
    std::mt19937_64 rng(seed);
    std::vector<EncodedTriple> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back({rng() % nodes, rng() % preds, rng() % nodes});
    // ids must be dense for graph building: remap by first appearance
    std::map<std::uint64_t, std::uint64_t> node_map, pred_map;
    for (EncodedTriple& t : out) {
        t.s = node_map.emplace(t.s, node_map.size()).first->second;
        t.p = pred_map.emplace(t.p, pred_map.size()).first->second;
        t.o = node_map.emplace(t.o, node_map.size()).first->second;
    }
    return out;
}

/// Sparse random graph (dense node ids, no self loops).
inline rdfpart::UndirectedGraph random_graph(std::uint64_t seed, std::size_t vertices,
                                             std::size_t edges) {
    std::mt19937_64 rng(seed);
    std::vector<EncodedTriple> triples;
    triples.reserve(edges);
    for (std::size_t i = 0; i < edges; ++i) {
        std::uint64_t a = rng() % vertices;
        std::uint64_t b = rng() % vertices;
        if (a == b) continue;
        triples.push_back({a, 0, b});
    }
    return rdfpart::to_undirected(triples, vertices);
}

/// Planted-community random graph: dense blocks, sparse links between them.
inline rdfpart::UndirectedGraph community_graph(std::uint64_t seed, std::size_t communities,
                                                std::size_t per_community,
                                                std::size_t intra_edges, std::size_t inter_edges) {
    std::mt19937_64 rng(seed);
    std::size_t n = communities * per_community;
    std::vector<EncodedTriple> triples;
    for (std::size_t c = 0; c < communities; ++c) {
        std::uint64_t base = c * per_community;
        for (std::size_t i = 0; i < intra_edges; ++i) {
            std::uint64_t a = base + rng() % per_community;
            std::uint64_t b = base + rng() % per_community;
            if (a != b) triples.push_back({a, 0, b});
        }
    }
    for (std::size_t i = 0; i < inter_edges; ++i) {
        std::uint64_t a = rng() % n;
        std::uint64_t b = rng() % n;
        if (a != b) triples.push_back({a, 0, b});
    }
    return rdfpart::to_undirected(triples, n);
}

/// Scatter triples over k partitions with a seeded pick (test fixture only).
inline rdfpart::PartitionedDataset random_partitioned(std::span<const EncodedTriple> triples,
                                                      std::uint32_t k, std::uint64_t seed) {
    rdfpart::PartitionedDataset pd(k);
    std::mt19937_64 rng(seed);
    for (const EncodedTriple& t : triples) pd.add_original(t, rng() % k);
    return pd;
}

}  // namespace oracles

#endif  // RDFPART_TESTS_ORACLES_HPP
