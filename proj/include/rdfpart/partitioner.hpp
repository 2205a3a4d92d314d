#ifndef RDFPART_PARTITIONER_HPP
#define RDFPART_PARTITIONER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "rdfpart/dataset.hpp"
#include "rdfpart/error.hpp"
#include "rdfpart/graph.hpp"
#include "rdfpart/hashing.hpp"
#include "rdfpart/term.hpp"

namespace rdfpart {

enum class Strategy { RandomHash, SubjectHash, GraphSubject, GraphNHop, Warp, Hybrid };

inline const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::RandomHash: return "random-hash";
        case Strategy::SubjectHash: return "subject-hash";
        case Strategy::GraphSubject: return "graph-subject";
        case Strategy::GraphNHop: return "graph-nhop";
        case Strategy::Warp: return "warp";
        case Strategy::Hybrid: return "hybrid";
    }
    return "?";
}

inline Strategy strategy_from_name(const std::string& name) {
    for (Strategy s : {Strategy::RandomHash, Strategy::SubjectHash, Strategy::GraphSubject,
                       Strategy::GraphNHop, Strategy::Warp, Strategy::Hybrid}) {
        if (name == strategy_name(s)) return s;
    }
    throw Error("unknown strategy: " + name);
}

struct StrategyConfig {
    std::uint32_t k = 1;
    std::uint64_t hash_seed = 0;
    double balance_epsilon = 0.03;
    std::uint32_t hop_count = 2;  // n of the n-hop guarantee
    Strategy strategy = Strategy::SubjectHash;
    std::uint32_t hybrid_prehop = 0;  // optional n-hop stage before hybrid refinement

    void validate() const {
        if (k < 1) throw Error("k must be >= 1");
        if (balance_epsilon < 0.0 || balance_epsilon >= 1.0) throw Error("epsilon must be in [0,1)");
        if (hop_count < 1) throw Error("hop count must be >= 1");
    }
};

/// Partition by the whole triple: H(s,p,o) mod k. Order-sensitive hash, so
/// this spreads triples with no regard to any component.
inline PartitionId hash_random(const EncodedTriple& t, const StrategyConfig& cfg) {
    return static_cast<PartitionId>(hash_ids({t.s, t.p, t.o}, cfg.hash_seed) % cfg.k);
}

/// Partition by subject: H(s) mod k. All triples sharing a subject land
/// together, which keeps subject-star queries local.
inline PartitionId hash_subject(const EncodedTriple& t, const StrategyConfig& cfg) {
    return static_cast<PartitionId>(hash_ids({t.s}, cfg.hash_seed) % cfg.k);
}

/// Tag each triple with its subject's partition, flagged Original.
inline PartitionedDataset allocate_by_subject(std::span<const EncodedTriple> triples,
                                              const PartitionMap& pm) {
    PartitionedDataset pd(pm.k);
    for (const EncodedTriple& t : triples) pd.add_original(t, pm.at(t.s));
    return pd;
}

/// Hash-allocate every triple, flagged Original.
inline PartitionedDataset allocate_by_hash(std::span<const EncodedTriple> triples,
                                           const StrategyConfig& cfg, bool whole_triple) {
    PartitionedDataset pd(cfg.k);
    for (const EncodedTriple& t : triples)
        pd.add_original(t, whole_triple ? hash_random(t, cfg) : hash_subject(t, cfg));
    return pd;
}

namespace detail {

/// Weighted graph used on the coarsening ladder. Vertex weights count the
/// original vertices a coarse vertex stands for; edge weights count merged
/// parallel edges.
struct LevelGraph {
    std::vector<std::uint64_t> vweight;
    std::vector<std::vector<std::pair<NodeId, std::uint64_t>>> adj;

    std::size_t n() const { return vweight.size(); }

    std::uint64_t weighted_degree(NodeId v) const {
        std::uint64_t d = 0;
        for (const auto& [u, w] : adj[v]) d += w;
        return d;
    }
};

inline LevelGraph level_from_graph(const UndirectedGraph& g) {
    LevelGraph lg;
    lg.vweight.assign(g.vertex_count(), 1);
    lg.adj.resize(g.vertex_count());
    for (NodeId v = 0; v < g.vertex_count(); ++v) {
        lg.adj[v].reserve(g.adj[v].size());
        for (NodeId u : g.adj[v]) lg.adj[v].emplace_back(u, 1);
    }
    return lg;
}

/// Heavy-edge matching, heaviest-degree vertices first with a seeded shuffle
/// among ties. Returns the fine-to-coarse map and the coarse vertex count.
inline std::size_t match_and_map(const LevelGraph& g, std::uint64_t seed, std::uint64_t max_vweight,
                                 std::vector<NodeId>& cmap) {
    const std::size_t n = g.n();
    std::vector<NodeId> order(n);
    for (NodeId v = 0; v < n; ++v) order[v] = v;
    std::vector<std::uint64_t> deg(n);
    for (NodeId v = 0; v < n; ++v) deg[v] = g.weighted_degree(v);
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        if (deg[a] != deg[b]) return deg[a] > deg[b];
        std::uint64_t ha = mix64(seed ^ (a + kHashPhi));
        std::uint64_t hb = mix64(seed ^ (b + kHashPhi));
        if (ha != hb) return ha < hb;
        return a < b;
    });

    constexpr NodeId kUnmatched = std::numeric_limits<NodeId>::max();
    std::vector<NodeId> match(n, kUnmatched);
    for (NodeId v : order) {
        if (match[v] != kUnmatched) continue;
        NodeId best = kUnmatched;
        std::uint64_t best_w = 0;
        for (const auto& [u, w] : g.adj[v]) {
            if (match[u] != kUnmatched || u == v) continue;
            if (g.vweight[v] + g.vweight[u] > max_vweight) continue;
            if (best == kUnmatched || w > best_w || (w == best_w && u < best)) {
                best = u;
                best_w = w;
            }
        }
        match[v] = best == kUnmatched ? v : best;
        if (best != kUnmatched) match[best] = v;
    }

    cmap.assign(n, kUnmatched);
    std::size_t coarse_n = 0;
    for (NodeId v = 0; v < n; ++v) {
        if (cmap[v] != kUnmatched) continue;
        cmap[v] = coarse_n;
        if (match[v] != v) cmap[match[v]] = coarse_n;
        ++coarse_n;
    }
    return coarse_n;
}

inline LevelGraph contract(const LevelGraph& g, const std::vector<NodeId>& cmap,
                           std::size_t coarse_n) {
    LevelGraph cg;
    cg.vweight.assign(coarse_n, 0);
    cg.adj.resize(coarse_n);
    for (NodeId v = 0; v < g.n(); ++v) cg.vweight[cmap[v]] += g.vweight[v];

    // gather, sort, merge parallel edges
    std::vector<std::vector<std::pair<NodeId, std::uint64_t>>>& cadj = cg.adj;
    for (NodeId v = 0; v < g.n(); ++v) {
        NodeId cv = cmap[v];
        for (const auto& [u, w] : g.adj[v]) {
            NodeId cu = cmap[u];
            if (cu != cv) cadj[cv].emplace_back(cu, w);
        }
    }
    for (auto& neighbors : cadj) {
        std::sort(neighbors.begin(), neighbors.end());
        std::size_t out = 0;
        for (std::size_t i = 0; i < neighbors.size();) {
            NodeId u = neighbors[i].first;
            std::uint64_t w = 0;
            while (i < neighbors.size() && neighbors[i].first == u) w += neighbors[i++].second;
            neighbors[out++] = {u, w};
        }
        neighbors.resize(out);
    }
    return cg;
}

/// Greedy region growing: seed at the heaviest-degree unassigned vertex, then
/// repeatedly absorb the unassigned vertex best connected to the region until
/// the partition reaches its share of the remaining weight. Falls back to the
/// lightest unassigned vertex when the frontier dries up (disconnected input).
inline std::vector<PartitionId> initial_partition(const LevelGraph& g, std::uint32_t k,
                                                  std::uint64_t cap) {
    const std::size_t n = g.n();
    constexpr PartitionId kNone = std::numeric_limits<PartitionId>::max();
    std::vector<PartitionId> part(n, kNone);
    std::vector<std::uint64_t> deg(n);
    std::uint64_t remaining = 0;
    for (NodeId v = 0; v < n; ++v) {
        deg[v] = g.weighted_degree(v);
        remaining += g.vweight[v];
    }

    std::vector<NodeId> seed_order(n), filler_order(n);
    for (NodeId v = 0; v < n; ++v) seed_order[v] = filler_order[v] = v;
    std::sort(seed_order.begin(), seed_order.end(), [&](NodeId a, NodeId b) {
        if (deg[a] != deg[b]) return deg[a] > deg[b];
        return a < b;
    });
    std::sort(filler_order.begin(), filler_order.end(), [&](NodeId a, NodeId b) {
        if (g.vweight[a] != g.vweight[b]) return g.vweight[a] < g.vweight[b];
        return a < b;
    });

    std::vector<std::uint64_t> conn(n, 0);
    std::vector<std::uint32_t> conn_epoch(n, 0);
    std::size_t seed_pos = 0;
    std::size_t unassigned = n;

    for (std::uint32_t p = 0; p + 1 < k && unassigned > 0; ++p) {
        std::uint64_t target = (remaining + (k - p) - 1) / (k - p);
        std::uint64_t weight = 0;
        std::uint32_t epoch = p + 1;
        // max connectivity first, then smallest id; lazily invalidated
        auto worse = [](const std::pair<std::uint64_t, NodeId>& a,
                        const std::pair<std::uint64_t, NodeId>& b) {
            if (a.first != b.first) return a.first < b.first;
            return a.second > b.second;
        };
        std::priority_queue<std::pair<std::uint64_t, NodeId>,
                            std::vector<std::pair<std::uint64_t, NodeId>>, decltype(worse)>
            frontier(worse);

        auto take = [&](NodeId v) {
            part[v] = p;
            weight += g.vweight[v];
            remaining -= g.vweight[v];
            --unassigned;
            for (const auto& [u, w] : g.adj[v]) {
                if (part[u] != kNone) continue;
                if (conn_epoch[u] != epoch) {
                    conn_epoch[u] = epoch;
                    conn[u] = 0;
                }
                conn[u] += w;
                frontier.emplace(conn[u], u);
            }
        };

        std::size_t filler_pos = 0;
        while (weight < target && unassigned > 0) {
            NodeId next = std::numeric_limits<NodeId>::max();
            if (weight == 0) {
                while (seed_pos < n && part[seed_order[seed_pos]] != kNone) ++seed_pos;
                if (seed_pos < n && g.vweight[seed_order[seed_pos]] <= cap) {
                    next = seed_order[seed_pos];
                } else {
                    for (; filler_pos < n; ++filler_pos) {
                        NodeId v = filler_order[filler_pos];
                        if (part[v] == kNone && g.vweight[v] <= cap) {
                            next = v;
                            break;
                        }
                    }
                }
            } else {
                while (!frontier.empty()) {
                    auto [c, v] = frontier.top();
                    frontier.pop();
                    if (part[v] != kNone || conn_epoch[v] != epoch || conn[v] != c) continue;
                    if (weight + g.vweight[v] > cap) continue;  // never fits this region again
                    next = v;
                    break;
                }
                if (next == std::numeric_limits<NodeId>::max()) {
                    for (; filler_pos < n; ++filler_pos) {
                        NodeId v = filler_order[filler_pos];
                        if (part[v] == kNone && weight + g.vweight[v] <= cap) {
                            next = v;
                            break;
                        }
                    }
                }
            }
            if (next == std::numeric_limits<NodeId>::max()) break;  // nothing fits
            take(next);
        }
    }
    // last partition absorbs the rest; rebalancing cleans up any overshoot
    for (NodeId v = 0; v < n; ++v) {
        if (part[v] == kNone) part[v] = k - 1;
    }
    return part;
}

/// Move vertices out of overweight partitions, least cut damage first, until
/// every partition fits under cap or no feasible move remains. With unit
/// weights (the finest level) this always restores balance.
inline void rebalance(const LevelGraph& g, std::uint32_t k, std::uint64_t cap,
                      std::vector<PartitionId>& part, std::vector<std::uint64_t>& pweight) {
    const std::size_t n = g.n();
    while (true) {
        bool any_over = false;
        for (std::uint32_t p = 0; p < k; ++p) any_over |= pweight[p] > cap;
        if (!any_over) return;

        NodeId best_v = std::numeric_limits<NodeId>::max();
        std::uint32_t best_q = 0;
        std::int64_t best_gain = std::numeric_limits<std::int64_t>::min();
        for (NodeId v = 0; v < n; ++v) {
            if (pweight[part[v]] <= cap) continue;
            std::vector<std::int64_t> link(k, 0);
            for (const auto& [u, w] : g.adj[v]) link[part[u]] += static_cast<std::int64_t>(w);
            for (std::uint32_t q = 0; q < k; ++q) {
                if (q == part[v] || pweight[q] + g.vweight[v] > cap) continue;
                std::int64_t gain = link[q] - link[part[v]];
                if (gain > best_gain || (gain == best_gain && v < best_v)) {
                    best_gain = gain;
                    best_v = v;
                    best_q = q;
                }
            }
        }
        if (best_v == std::numeric_limits<NodeId>::max()) return;  // nothing fits
        pweight[part[best_v]] -= g.vweight[best_v];
        pweight[best_q] += g.vweight[best_v];
        part[best_v] = best_q;
    }
}

/// One greedy boundary pass: move a vertex to the neighboring partition with
/// the largest positive cut gain, provided the target stays under cap.
inline void refine_pass(const LevelGraph& g, std::uint32_t k, std::uint64_t cap,
                        std::vector<PartitionId>& part, std::vector<std::uint64_t>& pweight) {
    const std::size_t n = g.n();
    std::vector<std::int64_t> link(k, 0);
    for (NodeId v = 0; v < n; ++v) {
        bool boundary = false;
        for (const auto& [u, w] : g.adj[v]) {
            if (part[u] != part[v]) {
                boundary = true;
                break;
            }
        }
        if (!boundary) continue;
        std::fill(link.begin(), link.end(), 0);
        for (const auto& [u, w] : g.adj[v]) link[part[u]] += static_cast<std::int64_t>(w);
        std::int64_t own = link[part[v]];
        std::int64_t best_gain = 0;
        std::uint32_t best_q = part[v];
        for (const auto& [u, w] : g.adj[v]) {
            std::uint32_t q = part[u];
            if (q == part[v]) continue;
            std::int64_t gain = link[q] - own;
            if (pweight[q] + g.vweight[v] > cap) continue;
            if (gain > best_gain || (gain == best_gain && gain > 0 && q < best_q)) {
                best_gain = gain;
                best_q = q;
            }
        }
        if (best_gain > 0) {
            pweight[part[v]] -= g.vweight[v];
            pweight[best_q] += g.vweight[v];
            part[v] = best_q;
        }
    }
}

}  // namespace detail

/// Multilevel min-edge-cut heuristic: heavy-edge matching down to
/// max(100, 20k) vertices, greedy region-growing k-way assignment on the
/// coarsest graph, then per-level rebalancing plus one greedy refinement pass
/// while uncoarsening. Deterministic for a fixed seed. Every partition ends
/// at most (1+epsilon) * ceil(n/k) vertices.
inline PartitionMap multilevel_partition(const UndirectedGraph& graph, const StrategyConfig& cfg) {
    cfg.validate();
    const std::size_t n = graph.vertex_count();
    const std::uint32_t k = cfg.k;
    if (k > n) throw InfeasibleBalance(k, n);

    PartitionMap pm;
    pm.k = k;
    if (k == 1) {
        pm.assignment.assign(n, 0);
        return pm;
    }

    const std::uint64_t share = (n + k - 1) / k;  // ceil(n/k)
    const std::uint64_t cap = std::max<std::uint64_t>(
        share, static_cast<std::uint64_t>((1.0 + cfg.balance_epsilon) * static_cast<double>(share)));
    const std::size_t floor_size = std::max<std::size_t>(100, 20ULL * k);
    const std::uint64_t max_vweight = std::max<std::uint64_t>(2, (3 * n) / (2 * floor_size));

    std::vector<detail::LevelGraph> levels;
    std::vector<std::vector<NodeId>> cmaps;
    levels.push_back(detail::level_from_graph(graph));
    while (levels.back().n() > floor_size) {
        std::vector<NodeId> cmap;
        std::size_t coarse_n = detail::match_and_map(
            levels.back(), cfg.hash_seed + levels.size(), max_vweight, cmap);
        if (coarse_n >= levels.back().n() * 95 / 100) break;  // matching stalled
        levels.push_back(detail::contract(levels.back(), cmap, coarse_n));
        cmaps.push_back(std::move(cmap));
    }

    const detail::LevelGraph& coarsest = levels.back();
    std::vector<PartitionId> part = detail::initial_partition(coarsest, k, cap);
    std::vector<std::uint64_t> pweight(k, 0);
    for (NodeId v = 0; v < coarsest.n(); ++v) pweight[part[v]] += coarsest.vweight[v];
    detail::rebalance(coarsest, k, cap, part, pweight);
    detail::refine_pass(coarsest, k, cap, part, pweight);

    for (std::size_t level = levels.size() - 1; level-- > 0;) {
        const std::vector<NodeId>& cmap = cmaps[level];
        std::vector<PartitionId> finer(levels[level].n());
        for (NodeId v = 0; v < finer.size(); ++v) finer[v] = part[cmap[v]];
        part = std::move(finer);
        std::fill(pweight.begin(), pweight.end(), 0);
        for (NodeId v = 0; v < levels[level].n(); ++v) pweight[part[v]] += levels[level].vweight[v];
        detail::rebalance(levels[level], k, cap, part, pweight);
        detail::refine_pass(levels[level], k, cap, part, pweight);
    }

    pm.assignment = std::move(part);
    return pm;
}

}  // namespace rdfpart

#endif  // RDFPART_PARTITIONER_HPP
