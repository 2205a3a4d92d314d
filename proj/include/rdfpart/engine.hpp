#ifndef RDFPART_ENGINE_HPP
#define RDFPART_ENGINE_HPP

#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "rdfpart/dataset.hpp"
#include "rdfpart/error.hpp"
#include "rdfpart/query.hpp"
#include "rdfpart/term.hpp"

namespace rdfpart {

namespace detail {

/// Run fn(0..count-1) on a bounded worker pool; exceptions are rethrown on
/// the calling thread. Tasks must not share mutable state.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    unsigned nt = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    threads.reserve(nt);
    for (unsigned t = 0; t < nt; ++t) threads.emplace_back(body);
    for (std::thread& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace detail

struct ShuffleStats {
    std::size_t tuples_exchanged = 0;
    std::size_t bytes_estimated = 0;  // 8 bytes per bound variable per moved row
    std::size_t stages = 0;           // repartitioning rounds

    void count_move(std::size_t bound_vars) {
        ++tuples_exchanged;
        bytes_estimated += 8 * bound_vars;
    }
};

enum class RunMode { Local, Distributed };

struct QueryRunReport {
    std::string query_id;
    RunMode mode = RunMode::Distributed;
    bool forced = false;  // local evaluation forced past the classifier
    std::size_t result_count = 0;
    double wall_ms = 0.0;
    ShuffleStats shuffle;
};

struct EvalResult {
    ResultSet results;
    QueryRunReport report;
};

/// Evaluate the query independently inside every partition (quads of that
/// partition only, replicas included), union the per-partition results and
/// drop duplicates. No data crosses partitions. The reported wall time is the
/// slowest partition's, mirroring a cluster where partitions run in parallel.
inline EvalResult evaluate_local(const Query& q, const PartitionedDataset& pd,
                                 unsigned workers = 1, bool forced = false) {
    std::vector<ResultSet> per_partition(pd.k());
    std::vector<double> part_ms(pd.k(), 0.0);

    detail::parallel_for(pd.k(), workers, [&](std::size_t p) {
        auto t0 = std::chrono::steady_clock::now();
        std::vector<EncodedTriple> triples;
        triples.reserve(pd.partition(static_cast<PartitionId>(p)).size());
        for (const Quad& quad : pd.partition(static_cast<PartitionId>(p)))
            triples.push_back(quad.triple);
        std::vector<RowSet> pattern_rows;
        pattern_rows.reserve(q.bgp.size());
        for (const TriplePattern& tp : q.bgp)
            pattern_rows.push_back(detail::match_pattern(triples, tp));
        std::vector<std::size_t> order = detail::greedy_order(pattern_rows);
        RowSet acc = detail::evaluate_ordered(pattern_rows, order);
        per_partition[p] = detail::project(acc, q.projection);
        part_ms[p] = detail::ms_since(t0);
    });

    EvalResult out;
    out.results.vars = q.projection;
    for (ResultSet& rs : per_partition) {
        for (Row& r : rs.rows) out.results.rows.push_back(std::move(r));
    }
    out.results.normalize();
    out.report.mode = RunMode::Local;
    out.report.forced = forced;
    out.report.result_count = out.results.rows.size();
    for (double ms : part_ms) out.report.wall_ms = std::max(out.report.wall_ms, ms);
    return out;
}

/// Iterative distributed hash-join plan over the original quads: match the
/// first pattern in place, then for every further pattern repartition both
/// the accumulated bindings and the pattern's matches by the hash of their
/// shared-variable tuple, counting each row that changes partition as one
/// exchanged tuple. Replicas are excluded so joins stay duplicate-free.
inline EvalResult evaluate_distributed(const Query& q, const PartitionedDataset& pd,
                                       std::uint64_t hash_seed = 0, unsigned workers = 1) {
    auto t0 = std::chrono::steady_clock::now();
    const std::uint32_t k = pd.k();

    std::vector<std::vector<EncodedTriple>> originals(k);
    for (PartitionId p = 0; p < k; ++p) {
        for (const Quad& quad : pd.partition(p)) {
            if (quad.prov == Provenance::Original) originals[p].push_back(quad.triple);
        }
    }

    EvalResult out;
    ShuffleStats& shuffle = out.report.shuffle;

    // per-partition accumulated bindings, all sharing one schema
    std::vector<std::string> acc_vars;
    std::vector<std::vector<Row>> acc(k);
    {
        std::vector<RowSet> first(k);
        detail::parallel_for(k, workers, [&](std::size_t p) {
            first[p] = detail::match_pattern(originals[p], q.bgp[0]);
        });
        acc_vars = first[0].vars;
        for (PartitionId p = 0; p < k; ++p) acc[p] = std::move(first[p].rows);
    }

    for (std::size_t j = 1; j < q.bgp.size(); ++j) {
        std::vector<RowSet> matches(k);
        detail::parallel_for(k, workers, [&](std::size_t p) {
            matches[p] = detail::match_pattern(originals[p], q.bgp[j]);
        });
        const std::vector<std::string>& pat_vars = matches[0].vars;

        std::vector<int> acc_key, pat_key;
        for (std::size_t a = 0; a < acc_vars.size(); ++a) {
            for (std::size_t b = 0; b < pat_vars.size(); ++b) {
                if (acc_vars[a] == pat_vars[b]) {
                    acc_key.push_back(static_cast<int>(a));
                    pat_key.push_back(static_cast<int>(b));
                }
            }
        }

        auto target_of = [&](const Row& row, const std::vector<int>& key) {
            std::uint64_t h = mix64(hash_seed + kHashPhi);
            for (int slot : key) h = mix64(h ^ (row[slot] + kHashPhi));
            return static_cast<PartitionId>(h % k);
        };

        // repartition accumulated bindings by join key
        std::vector<std::vector<Row>> acc_buckets(k);
        for (PartitionId p = 0; p < k; ++p) {
            for (Row& row : acc[p]) {
                PartitionId t = target_of(row, acc_key);
                if (t != p) shuffle.count_move(acc_vars.size());
                acc_buckets[t].push_back(std::move(row));
            }
        }
        // the pattern's matches are repartitioned the same way
        std::vector<std::vector<Row>> pat_buckets(k);
        for (PartitionId p = 0; p < k; ++p) {
            for (Row& row : matches[p].rows) {
                PartitionId t = target_of(row, pat_key);
                if (t != p) shuffle.count_move(pat_vars.size());
                pat_buckets[t].push_back(std::move(row));
            }
        }

        std::vector<RowSet> joined(k);
        detail::parallel_for(k, workers, [&](std::size_t p) {
            RowSet a{acc_vars, std::move(acc_buckets[p])};
            RowSet b{pat_vars, std::move(pat_buckets[p])};
            joined[p] = detail::join_rows(a, b);
        });
        acc_vars = joined[0].vars;
        for (PartitionId p = 0; p < k; ++p) acc[p] = std::move(joined[p].rows);
    }
    shuffle.stages = q.bgp.size() - 1;

    RowSet all{acc_vars, {}};
    for (PartitionId p = 0; p < k; ++p) {
        for (Row& row : acc[p]) all.rows.push_back(std::move(row));
    }
    out.results = detail::project(all, q.projection);
    out.report.mode = RunMode::Distributed;
    out.report.result_count = out.results.rows.size();
    out.report.wall_ms = detail::ms_since(t0);
    return out;
}

struct SuiteConfig {
    std::uint32_t repetitions = 3;
    std::uint64_t hash_seed = 0;
    unsigned workers = 1;
    std::uint32_t nhop = 2;
    std::vector<std::string> workload_keys;  // canonical keys covered by WARP/hybrid
};

/// Run each query against the dataset in the mode the classifier picks,
/// repeated `repetitions` times with the median wall time reported.
inline std::vector<QueryRunReport> run_suite(std::span<const Query> queries,
                                             const PartitionedDataset& pd, Strategy strategy,
                                             const SuiteConfig& cfg) {
    std::vector<QueryRunReport> reports;
    reports.reserve(queries.size());
    for (const Query& q : queries) {
        Locality loc = classify_locality(q, strategy, cfg.nhop, cfg.workload_keys);
        std::vector<double> times;
        EvalResult last;
        for (std::uint32_t r = 0; r < std::max<std::uint32_t>(1, cfg.repetitions); ++r) {
            last = loc == Locality::Local
                       ? evaluate_local(q, pd, cfg.workers)
                       : evaluate_distributed(q, pd, cfg.hash_seed, cfg.workers);
            times.push_back(last.report.wall_ms);
        }
        std::sort(times.begin(), times.end());
        last.report.query_id = q.id;
        last.report.wall_ms = times[times.size() / 2];
        reports.push_back(last.report);
    }
    return reports;
}

}  // namespace rdfpart

#endif  // RDFPART_ENGINE_HPP
