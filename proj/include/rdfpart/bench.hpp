#ifndef RDFPART_BENCH_HPP
#define RDFPART_BENCH_HPP

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdfpart/dictionary.hpp"
#include "rdfpart/engine.hpp"
#include "rdfpart/error.hpp"
#include "rdfpart/generator.hpp"
#include "rdfpart/metis_io.hpp"
#include "rdfpart/metrics.hpp"
#include "rdfpart/ntriples.hpp"
#include "rdfpart/partitioner.hpp"
#include "rdfpart/query.hpp"
#include "rdfpart/replication.hpp"
#include "rdfpart/storage.hpp"

namespace rdfpart {

struct BenchConfig {
    std::string dataset;  // N-Triples path; empty means "use the generator"
    std::uint32_t universities = 2;
    double hub_fraction = 0.0;
    std::vector<Strategy> strategies{Strategy::RandomHash,   Strategy::SubjectHash,
                                     Strategy::GraphSubject, Strategy::GraphNHop,
                                     Strategy::Warp,         Strategy::Hybrid};
    std::vector<std::uint32_t> k_list{4};
    std::uint32_t nhop = 2;
    std::uint32_t hybrid_prehop = 0;
    std::string workload;  // .rq file or directory of .rq files (+ prefixes.tsv)
    std::uint64_t seed = 0;
    std::uint32_t repetitions = 3;
    unsigned workers = 1;
    std::string metis_partition_file;
    std::filesystem::path out_dir = "bench-out";
};

namespace detail {

inline std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        if (comma > pos) out.push_back(s.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return out;
}

}  // namespace detail

/// Apply one "key=value" setting (the config-file vocabulary; flags reuse it).
inline void apply_bench_setting(BenchConfig& cfg, const std::string& key,
                                const std::string& value) {
    if (key == "dataset") {
        cfg.dataset = value;
    } else if (key == "universities") {
        cfg.universities = static_cast<std::uint32_t>(std::stoul(value));
    } else if (key == "hub-fraction") {
        cfg.hub_fraction = std::stod(value);
    } else if (key == "strategy" || key == "strategies") {
        cfg.strategies.clear();
        for (const std::string& name : detail::split_commas(value))
            cfg.strategies.push_back(strategy_from_name(name));
    } else if (key == "k") {
        cfg.k_list.clear();
        for (const std::string& v : detail::split_commas(value))
            cfg.k_list.push_back(static_cast<std::uint32_t>(std::stoul(v)));
    } else if (key == "n-hop") {
        cfg.nhop = static_cast<std::uint32_t>(std::stoul(value));
    } else if (key == "hybrid-prehop") {
        cfg.hybrid_prehop = static_cast<std::uint32_t>(std::stoul(value));
    } else if (key == "workload") {
        cfg.workload = value;
    } else if (key == "seed") {
        cfg.seed = std::stoull(value);
    } else if (key == "repetitions") {
        cfg.repetitions = static_cast<std::uint32_t>(std::stoul(value));
    } else if (key == "workers") {
        cfg.workers = static_cast<unsigned>(std::stoul(value));
    } else if (key == "metis-partition-file") {
        cfg.metis_partition_file = value;
    } else if (key == "out-dir") {
        cfg.out_dir = value;
    } else {
        throw Error("unknown config key: " + key);
    }
}

inline void load_bench_config(const std::filesystem::path& path, BenchConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw Error("bad config line: " + line);
        apply_bench_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
    }
}

/// Queries from a single .rq file or every .rq in a directory (sorted by
/// name), with prefixes.tsv looked up next to them.
inline std::vector<Query> load_workload(const std::filesystem::path& path,
                                        const DictionaryPair& dicts) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    fs::path prefix_file;
    if (fs::is_directory(path)) {
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.path().extension() == ".rq") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        prefix_file = path / "prefixes.tsv";
    } else {
        files.push_back(path);
        prefix_file = path.parent_path() / "prefixes.tsv";
    }
    PrefixMap prefixes;
    if (fs::exists(prefix_file)) prefixes = load_prefixes(prefix_file);
    std::vector<Query> workload;
    workload.reserve(files.size());
    for (const fs::path& f : files) workload.push_back(load_query_file(f, prefixes, dicts));
    return workload;
}

struct StrategyRun {
    Strategy strategy = Strategy::SubjectHash;
    std::uint32_t k = 1;
    double encode_ms = 0.0;
    std::vector<StageStat> stages;
    std::vector<std::size_t> partition_sizes;
    double size_stddev = 0.0;
    double replication_rate = 0.0;
    std::size_t originals = 0;
    std::size_t total_quads = 0;
    std::vector<QueryRunReport> queries;

    double prep_ms() const {
        double total = 0.0;
        for (const StageStat& s : stages) total += s.ms;
        return total;
    }
};

struct BenchReport {
    std::size_t input_triples = 0;
    double encode_ms = 0.0;
    std::vector<StrategyRun> runs;
};

namespace detail {

/// One benchmark process per output directory.
class DirLock {
public:
    explicit DirLock(const std::filesystem::path& dir) : path_(dir / ".lock") {
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0)
            throw Error("output directory is locked by another run: " + path_.string());
    }
    ~DirLock() {
        if (fd_ >= 0) {
            ::close(fd_);
            std::error_code ec;
            std::filesystem::remove(path_, ec);
        }
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

private:
    std::filesystem::path path_;
    int fd_ = -1;
};

inline void write_reports(const std::filesystem::path& dir, const BenchReport& report) {
    std::ofstream metrics(dir / "metrics.csv", std::ios::trunc);
    metrics << "strategy,k,encode_ms,graph_prep_ms,partition_ms,allocate_ms,replicate_ms,"
               "originals,total_quads,replication_rate,size_stddev\n";
    for (const StrategyRun& run : report.runs) {
        double graph_prep = 0, partition = 0, allocate = 0, replicate = 0;
        for (const StageStat& s : run.stages) {
            if (s.name == "graph-prep")
                graph_prep += s.ms;
            else if (s.name == "partition")
                partition += s.ms;
            else if (s.name == "allocate")
                allocate += s.ms;
            else
                replicate += s.ms;  // hop expansion and warp refinement
        }
        metrics << strategy_name(run.strategy) << ',' << run.k << ',' << run.encode_ms << ','
                << graph_prep << ',' << partition << ',' << allocate << ',' << replicate << ','
                << run.originals << ',' << run.total_quads << ',' << run.replication_rate << ','
                << run.size_stddev << '\n';
    }

    std::ofstream queries(dir / "queries.csv", std::ios::trunc);
    queries << "strategy,k,query,mode,results,tuples_exchanged,bytes_estimated,time_ms\n";
    for (const StrategyRun& run : report.runs) {
        for (const QueryRunReport& q : run.queries) {
            queries << strategy_name(run.strategy) << ',' << run.k << ',' << q.query_id << ','
                    << (q.mode == RunMode::Local ? "local" : "distributed") << ','
                    << q.result_count << ',' << q.shuffle.tuples_exchanged << ','
                    << q.shuffle.bytes_estimated << ',' << q.wall_ms << '\n';
        }
    }

    nlohmann::json j;
    j["input_triples"] = report.input_triples;
    j["encode_ms"] = report.encode_ms;
    j["runs"] = nlohmann::json::array();
    for (const StrategyRun& run : report.runs) {
        nlohmann::json r;
        r["strategy"] = strategy_name(run.strategy);
        r["k"] = run.k;
        r["encode_ms"] = run.encode_ms;
        r["stages"] = nlohmann::json::array();
        for (const StageStat& s : run.stages)
            r["stages"].push_back({{"name", s.name}, {"ms", s.ms}, {"quads_after", s.quads_after}});
        r["partition_sizes"] = run.partition_sizes;
        r["size_stddev"] = run.size_stddev;
        r["replication_rate"] = run.replication_rate;
        r["originals"] = run.originals;
        r["total_quads"] = run.total_quads;
        r["queries"] = nlohmann::json::array();
        for (const QueryRunReport& q : run.queries) {
            r["queries"].push_back({{"query", q.query_id},
                                    {"mode", q.mode == RunMode::Local ? "local" : "distributed"},
                                    {"results", q.result_count},
                                    {"tuples_exchanged", q.shuffle.tuples_exchanged},
                                    {"bytes_estimated", q.shuffle.bytes_estimated},
                                    {"stages", q.shuffle.stages},
                                    {"time_ms", q.wall_ms}});
        }
        j["runs"].push_back(std::move(r));
    }
    std::ofstream json_out(dir / "report.json", std::ios::trunc);
    json_out << j.dump(2) << '\n';

    // gnuplot-ready views of the three figure families
    std::ofstream prep(dir / "fig_prep_times.tsv", std::ios::trunc);
    prep << "strategy\tk\tprep_ms\n";
    for (const StrategyRun& run : report.runs)
        prep << strategy_name(run.strategy) << '\t' << run.k << '\t' << run.prep_ms() << '\n';

    std::ofstream dev(dir / "fig_size_stddev.tsv", std::ios::trunc);
    dev << "strategy\tk\tsize_stddev\n";
    for (const StrategyRun& run : report.runs)
        dev << strategy_name(run.strategy) << '\t' << run.k << '\t' << run.size_stddev << '\n';

    std::ofstream repl(dir / "table_replication.tsv", std::ios::trunc);
    repl << "strategy\tk\treplication_rate\n";
    for (const StrategyRun& run : report.runs)
        repl << strategy_name(run.strategy) << '\t' << run.k << '\t' << run.replication_rate
             << '\n';

    std::ofstream qt(dir / "fig_query_times.tsv", std::ios::trunc);
    qt << "strategy\tk\tquery\ttime_ms\ttuples_exchanged\n";
    for (const StrategyRun& run : report.runs) {
        for (const QueryRunReport& q : run.queries)
            qt << strategy_name(run.strategy) << '\t' << run.k << '\t' << q.query_id << '\t'
               << q.wall_ms << '\t' << q.shuffle.tuples_exchanged << '\n';
    }
}

}  // namespace detail

/// Full sweep: encode once, then for every (strategy, k) build the partitioned
/// dataset with per-stage timings, compute the comparison metrics, and run the
/// workload queries. Reports are written even when a stage fails.
inline BenchReport run_benchmark(const BenchConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    detail::DirLock lock(cfg.out_dir);

    std::string text = cfg.dataset.empty()
                           ? generate_synthetic({cfg.universities, cfg.seed, cfg.hub_fraction})
                           : load_text_auto(cfg.dataset);

    BenchReport report;
    auto t0 = std::chrono::steady_clock::now();
    std::vector<TermTriple> term_triples = parse_ntriples(text);
    DictionaryPair dicts;
    std::vector<EncodedTriple> triples = encode_triples(term_triples, dicts);
    report.encode_ms = detail::ms_since(t0);
    report.input_triples = triples.size();

    std::vector<Query> workload;
    if (!cfg.workload.empty()) workload = load_workload(cfg.workload, dicts);
    std::vector<std::string> workload_keys;
    for (const GeneralizedPattern& gp : warp_generalize(workload))
        workload_keys.push_back(gp.key);

    std::optional<PartitionMap> external_pm;

    try {
        for (Strategy strategy : cfg.strategies) {
            for (std::uint32_t k : cfg.k_list) {
                StrategyConfig sc;
                sc.k = k;
                sc.hash_seed = cfg.seed;
                sc.hop_count = cfg.nhop;
                sc.strategy = strategy;
                sc.hybrid_prehop = cfg.hybrid_prehop;

                const PartitionMap* pm = nullptr;
                if (!cfg.metis_partition_file.empty() &&
                    (strategy == Strategy::GraphSubject || strategy == Strategy::GraphNHop ||
                     strategy == Strategy::Warp)) {
                    external_pm = read_metis_partition_file(cfg.metis_partition_file,
                                                            dicts.nodes.size(), k);
                    pm = &*external_pm;
                }

                PipelineResult built = build_partitioned_dataset(triples, workload, sc, pm);

                StrategyRun run;
                run.strategy = strategy;
                run.k = k;
                run.encode_ms = report.encode_ms;
                run.stages = built.stages;
                run.partition_sizes = built.pd.partition_sizes();
                run.size_stddev = size_stddev(built.pd);
                run.replication_rate = replication_rate(built.pd);
                run.originals = built.pd.original_count();
                run.total_quads = built.pd.total_quads();

                SuiteConfig suite;
                suite.repetitions = cfg.repetitions;
                suite.hash_seed = cfg.seed;
                suite.workers = cfg.workers;
                suite.nhop = cfg.nhop;
                suite.workload_keys = workload_keys;
                run.queries = run_suite(workload, built.pd, strategy, suite);

                report.runs.push_back(std::move(run));
            }
        }
    } catch (...) {
        detail::write_reports(cfg.out_dir, report);  // flush partial results
        throw;
    }
    detail::write_reports(cfg.out_dir, report);
    return report;
}

}  // namespace rdfpart

#endif  // RDFPART_BENCH_HPP
