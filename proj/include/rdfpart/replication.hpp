#ifndef RDFPART_REPLICATION_HPP
#define RDFPART_REPLICATION_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ranges>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rdfpart/dataset.hpp"
#include "rdfpart/error.hpp"
#include "rdfpart/graph.hpp"
#include "rdfpart/partitioner.hpp"
#include "rdfpart/query.hpp"
#include "rdfpart/term.hpp"

namespace rdfpart {

namespace detail {

/// Distinct triples grouped by subject, for hop expansion and path walking.
class SubjectIndex {
public:
    explicit SubjectIndex(std::span<const EncodedTriple> triples) {
        std::vector<EncodedTriple> sorted(triples.begin(), triples.end());
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (const EncodedTriple& t : sorted) by_subject_[t.s].push_back(t);
    }

    std::span<const EncodedTriple> with_subject(NodeId s) const {
        auto it = by_subject_.find(s);
        if (it == by_subject_.end()) return {};
        return it->second;
    }

private:
    std::unordered_map<NodeId, std::vector<EncodedTriple>> by_subject_;
};

}  // namespace detail

/// Extend every partition by one hop: for each object occurring in a
/// partition's quads, pull in all original triples with that subject as
/// replicas. One call adds exactly one hop; quads added by this call do not
/// cascade within it.
inline std::size_t one_hop_expand(PartitionedDataset& pd, const detail::SubjectIndex& index) {
    std::size_t added = 0;
    for (PartitionId p = 0; p < pd.k(); ++p) {
        std::unordered_set<NodeId> objects;
        for (const Quad& q : pd.partition(p)) objects.insert(q.triple.o);
        std::vector<NodeId> ordered(objects.begin(), objects.end());
        std::sort(ordered.begin(), ordered.end());
        for (NodeId o : ordered) {
            for (const EncodedTriple& t : index.with_subject(o)) {
                if (pd.add_replica(t, p)) ++added;
            }
        }
    }
    return added;
}

inline std::size_t one_hop_expand(PartitionedDataset& pd, std::span<const EncodedTriple> triples) {
    detail::SubjectIndex index(triples);
    return one_hop_expand(pd, index);
}

/// Apply one_hop_expand (n-1) times; n = 1 leaves the dataset untouched.
inline std::size_t nhop_expand(PartitionedDataset& pd, std::span<const EncodedTriple> triples,
                               std::uint32_t n) {
    if (n <= 1) return 0;
    detail::SubjectIndex index(triples);
    std::size_t added = 0;
    for (std::uint32_t hop = 1; hop < n; ++hop) added += one_hop_expand(pd, index);
    return added;
}

struct NHopViolation {
    PartitionId partition = 0;
    std::vector<EncodedTriple> path;  // the offending path; its last triple is missing
};

struct NHopCheck {
    bool ok = true;
    NHopViolation violation;
};

/// Check the n-hop guarantee: every directed path of up to n triples
/// (object feeding the next subject) rooted at one of a partition's original
/// triples must lie entirely inside that partition. Returns the first
/// violating path otherwise.
inline NHopCheck verify_nhop(const PartitionedDataset& pd, std::span<const EncodedTriple> triples,
                             std::uint32_t n) {
    detail::SubjectIndex index(triples);
    NHopCheck result;

    for (PartitionId p = 0; p < pd.k(); ++p) {
        // memoize the depth to which a resident triple has been cleared
        std::unordered_map<EncodedTriple, std::uint32_t, TripleHash> cleared;
        std::vector<EncodedTriple> path;

        auto walk = [&](auto&& self, const EncodedTriple& from, std::uint32_t depth) -> bool {
            if (depth == 0) return true;
            auto it = cleared.find(from);
            if (it != cleared.end() && it->second >= depth) return true;
            for (const EncodedTriple& t : index.with_subject(from.o)) {
                path.push_back(t);
                if (!pd.contains(t, p)) {
                    result.ok = false;
                    result.violation = {p, path};
                    return false;
                }
                if (!self(self, t, depth - 1)) return false;
                path.pop_back();
            }
            auto [slot, inserted] = cleared.emplace(from, depth);
            if (!inserted && slot->second < depth) slot->second = depth;
            return true;
        };

        for (const Quad& q : pd.partition(p)) {
            if (q.prov != Provenance::Original) continue;
            path.assign(1, q.triple);
            if (!walk(walk, q.triple, n - 1)) return result;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// WARP: workload-aware refinement

/// A workload query with its constants generalized away; queries identical up
/// to variable renaming are merged.
struct GeneralizedPattern {
    std::vector<TriplePattern> bgp;
    std::string key;
    std::vector<std::string> sources;  // query ids folded into this pattern
};

inline std::vector<GeneralizedPattern> warp_generalize(std::span<const Query> workload) {
    std::vector<GeneralizedPattern> out;
    std::unordered_map<std::string, std::size_t> by_key;
    for (const Query& q : workload) {
        std::vector<TriplePattern> g = generalize_bgp(q.bgp);
        std::string key = canonical_bgp_key(g);
        auto it = by_key.find(key);
        if (it != by_key.end()) {
            out[it->second].sources.push_back(q.id);
            continue;
        }
        by_key.emplace(key, out.size());
        out.push_back({std::move(g), std::move(key), {q.id}});
    }
    return out;
}

inline bool is_connected_bgp(const std::vector<TriplePattern>& bgp) {
    const std::size_t m = bgp.size();
    if (m <= 1) return true;
    auto shares_var = [&](const TriplePattern& a, const TriplePattern& b) {
        for (const PatternAtom* x : {&a.s, &a.p, &a.o}) {
            if (!x->is_var()) continue;
            for (const PatternAtom* y : {&b.s, &b.p, &b.o}) {
                if (y->is_var() && x->name == y->name) return true;
            }
        }
        return false;
    };
    std::vector<bool> seen(m, false);
    std::vector<std::size_t> queue{0};
    seen[0] = true;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        for (std::size_t j = 0; j < m; ++j) {
            if (!seen[j] && shares_var(bgp[queue[qi]], bgp[j])) {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    return queue.size() == m;
}

/// Column name carrying the home partition of the quad matched by pattern i.
inline std::string partition_column(std::size_t pattern_idx) {
    return "#p" + std::to_string(pattern_idx);
}

/// Evaluate a BGP over the original quads, with each solution row annotated
/// by the home partition of every matched triple (replicas are invisible to
/// the costing).
inline RowSet annotate_bindings(const std::vector<TriplePattern>& bgp,
                                const PartitionedDataset& pd) {
    std::vector<RowSet> pattern_rows;
    pattern_rows.reserve(bgp.size());
    for (std::size_t i = 0; i < bgp.size(); ++i) {
        RowSet rs = detail::match_pattern(std::span<const EncodedTriple>{}, bgp[i]);  // schema only
        for (PartitionId p = 0; p < pd.k(); ++p) {
            auto originals = pd.partition(p) |
                             std::views::filter([](const Quad& q) {
                                 return q.prov == Provenance::Original;
                             }) |
                             std::views::transform([](const Quad& q) { return q.triple; });
            RowSet sub = detail::match_pattern(originals, bgp[i]);
            for (Row& row : sub.rows) {
                row.push_back(p);
                rs.rows.push_back(std::move(row));
            }
        }
        rs.vars.push_back(partition_column(i));
        pattern_rows.push_back(std::move(rs));
    }
    std::vector<std::size_t> order = detail::greedy_order(pattern_rows);
    return detail::evaluate_ordered(pattern_rows, order);
}

namespace detail {

inline EncodedTriple substitute(const TriplePattern& tp, const RowSet& schema, const Row& row) {
    auto value = [&](const PatternAtom& a) -> std::uint64_t {
        if (a.is_const()) return a.id;
        int slot = schema.slot_of(a.name);
        if (slot < 0) throw Error("unbound variable ?" + a.name + " in substitution");
        return row[slot];
    };
    return {value(tp.s), value(tp.p), value(tp.o)};
}

}  // namespace detail

using ReplicationPair = std::pair<EncodedTriple, PartitionId>;

/// The distinct (triple, target partition) copies the given seed choice would
/// require: for every solution row, every non-seed matched triple whose home
/// partition differs from the row's seed partition and which the seed
/// partition does not already hold.
inline std::set<ReplicationPair> warp_seed_pairs(const std::vector<TriplePattern>& bgp,
                                                 std::size_t seed_index, const RowSet& bindings,
                                                 const PartitionedDataset& pd) {
    std::set<ReplicationPair> pairs;
    int seed_slot = bindings.slot_of(partition_column(seed_index));
    if (seed_slot < 0) throw Error("bindings lack partition annotations");
    for (const Row& row : bindings.rows) {
        PartitionId target = static_cast<PartitionId>(row[seed_slot]);
        for (std::size_t j = 0; j < bgp.size(); ++j) {
            if (j == seed_index) continue;
            int slot = bindings.slot_of(partition_column(j));
            if (static_cast<PartitionId>(row[slot]) == target) continue;
            EncodedTriple t = detail::substitute(bgp[j], bindings, row);
            if (pd.contains(t, target)) continue;
            pairs.insert({t, target});
        }
    }
    return pairs;
}

/// Cost of anchoring the pattern at the given seed: the number of distinct
/// (triple, target partition) replication pairs.
inline std::size_t warp_seed_cost(const std::vector<TriplePattern>& bgp, std::size_t seed_index,
                                  const RowSet& bindings, const PartitionedDataset& pd) {
    return warp_seed_pairs(bgp, seed_index, bindings, pd).size();
}

/// Candidate seed with its replication cost.
struct SeedCandidate {
    std::string pattern_key;
    std::size_t seed_index = 0;
    std::size_t cost = 0;
};

struct WarpRefineStats {
    std::size_t patterns_evaluated = 0;
    std::size_t replicas_added = 0;
    std::vector<SeedCandidate> chosen;
};

/// For each generalized workload pattern: evaluate it with partition
/// annotations, pick the seed with the minimum replication cost (smallest
/// pattern index on ties), and materialize that seed's pairs as replicas.
/// Afterwards every workload query is answerable as the union of per-partition
/// local results.
inline WarpRefineStats warp_refine(PartitionedDataset& pd, std::span<const Query> workload) {
    WarpRefineStats stats;
    for (const GeneralizedPattern& gp : warp_generalize(workload)) {
        if (!is_connected_bgp(gp.bgp))
            throw UnsupportedPattern("disconnected BGP in workload (query " + gp.sources.front() +
                                     ")");
        ++stats.patterns_evaluated;
        RowSet bindings = annotate_bindings(gp.bgp, pd);
        if (bindings.rows.empty()) continue;

        std::size_t best_seed = 0;
        std::set<ReplicationPair> best_pairs;
        bool have_best = false;
        for (std::size_t seed = 0; seed < gp.bgp.size(); ++seed) {
            std::set<ReplicationPair> pairs = warp_seed_pairs(gp.bgp, seed, bindings, pd);
            if (!have_best || pairs.size() < best_pairs.size()) {
                best_seed = seed;
                best_pairs = std::move(pairs);
                have_best = true;
            }
        }
        for (const auto& [t, p] : best_pairs) {
            if (pd.add_replica(t, p)) ++stats.replicas_added;
        }
        stats.chosen.push_back({gp.key, best_seed, best_pairs.size()});
    }
    return stats;
}

// ---------------------------------------------------------------------------
// Pipelines

struct StageStat {
    std::string name;
    double ms = 0.0;
    std::size_t quads_after = 0;
};

struct PipelineResult {
    PartitionedDataset pd;
    std::vector<StageStat> stages;
};

namespace detail {

class StageTimer {
public:
    void start() { t0_ = std::chrono::steady_clock::now(); }

    double stop_ms() const {
        auto dt = std::chrono::steady_clock::now() - t0_;
        return std::chrono::duration<double, std::milli>(dt).count();
    }

private:
    std::chrono::steady_clock::time_point t0_;
};

}  // namespace detail

/// Graph partitioning, subject allocation, 2-hop guarantee, then
/// workload-aware refinement. An externally computed partition map (for
/// example a real Metis run read from file) substitutes for the internal
/// partitioner when provided.
inline PipelineResult warp_pipeline(std::span<const EncodedTriple> triples,
                                    std::span<const Query> workload, const StrategyConfig& cfg,
                                    const PartitionMap* external_pm = nullptr) {
    cfg.validate();
    detail::StageTimer timer;
    std::vector<StageStat> stages;

    timer.start();
    PartitionMap pm;
    if (external_pm) {
        pm = *external_pm;
    } else {
        UndirectedGraph graph = to_undirected(triples);
        stages.push_back({"graph-prep", timer.stop_ms(), 0});
        timer.start();
        pm = multilevel_partition(graph, cfg);
    }
    stages.push_back({"partition", timer.stop_ms(), 0});

    timer.start();
    PartitionedDataset pd = allocate_by_subject(triples, pm);
    stages.push_back({"allocate", timer.stop_ms(), pd.total_quads()});

    timer.start();
    nhop_expand(pd, triples, 2);
    stages.push_back({"2-hop", timer.stop_ms(), pd.total_quads()});

    timer.start();
    warp_refine(pd, workload);
    stages.push_back({"warp-refine", timer.stop_ms(), pd.total_quads()});

    return {std::move(pd), std::move(stages)};
}

/// Subject hashing followed directly by workload-aware refinement; no graph
/// partitioner, no separate hop stage (hybrid_prehop re-enables one).
inline PipelineResult hybrid_pipeline(std::span<const EncodedTriple> triples,
                                      std::span<const Query> workload,
                                      const StrategyConfig& cfg) {
    cfg.validate();
    detail::StageTimer timer;
    std::vector<StageStat> stages;

    timer.start();
    PartitionedDataset pd = allocate_by_hash(triples, cfg, /*whole_triple=*/false);
    stages.push_back({"allocate", timer.stop_ms(), pd.total_quads()});

    if (cfg.hybrid_prehop > 0) {
        timer.start();
        nhop_expand(pd, triples, cfg.hybrid_prehop);
        stages.push_back({"prehop", timer.stop_ms(), pd.total_quads()});
    }

    timer.start();
    warp_refine(pd, workload);
    stages.push_back({"warp-refine", timer.stop_ms(), pd.total_quads()});

    return {std::move(pd), std::move(stages)};
}

/// Build a partitioned dataset under any of the six strategies.
inline PipelineResult build_partitioned_dataset(std::span<const EncodedTriple> triples,
                                                std::span<const Query> workload,
                                                const StrategyConfig& cfg,
                                                const PartitionMap* external_pm = nullptr) {
    cfg.validate();
    detail::StageTimer timer;
    std::vector<StageStat> stages;

    switch (cfg.strategy) {
        case Strategy::RandomHash:
        case Strategy::SubjectHash: {
            timer.start();
            PartitionedDataset pd =
                allocate_by_hash(triples, cfg, cfg.strategy == Strategy::RandomHash);
            stages.push_back({"allocate", timer.stop_ms(), pd.total_quads()});
            return {std::move(pd), std::move(stages)};
        }
        case Strategy::GraphSubject:
        case Strategy::GraphNHop: {
            timer.start();
            PartitionMap pm;
            if (external_pm) {
                pm = *external_pm;
            } else {
                UndirectedGraph graph = to_undirected(triples);
                stages.push_back({"graph-prep", timer.stop_ms(), 0});
                timer.start();
                pm = multilevel_partition(graph, cfg);
            }
            stages.push_back({"partition", timer.stop_ms(), 0});
            timer.start();
            PartitionedDataset pd = allocate_by_subject(triples, pm);
            stages.push_back({"allocate", timer.stop_ms(), pd.total_quads()});
            if (cfg.strategy == Strategy::GraphNHop) {
                timer.start();
                nhop_expand(pd, triples, cfg.hop_count);
                stages.push_back({"n-hop", timer.stop_ms(), pd.total_quads()});
            }
            return {std::move(pd), std::move(stages)};
        }
        case Strategy::Warp: return warp_pipeline(triples, workload, cfg, external_pm);
        case Strategy::Hybrid: return hybrid_pipeline(triples, workload, cfg);
    }
    throw Error("unreachable strategy");
}

}  // namespace rdfpart

#endif  // RDFPART_REPLICATION_HPP
