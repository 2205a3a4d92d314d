// Command-line workbench: generate, encode, partition, replicate, query and
// benchmark RDF datasets under the six distribution strategies.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <unordered_set>
#include <vector>

#include "rdfpart/bench.hpp"
#include "rdfpart/dataset.hpp"
#include "rdfpart/dictionary.hpp"
#include "rdfpart/engine.hpp"
#include "rdfpart/generator.hpp"
#include "rdfpart/graph.hpp"
#include "rdfpart/metis_io.hpp"
#include "rdfpart/metrics.hpp"
#include "rdfpart/ntriples.hpp"
#include "rdfpart/partitioner.hpp"
#include "rdfpart/query.hpp"
#include "rdfpart/replication.hpp"
#include "rdfpart/storage.hpp"

namespace fs = std::filesystem;
using namespace rdfpart;

namespace {

struct CommonOpts {
    std::string out_dir = "store";
    std::string strategy = "subject-hash";
    std::uint32_t k = 4;
    std::uint32_t nhop = 2;
    std::uint32_t hybrid_prehop = 0;
    std::uint64_t seed = 0;
    std::string workload;
    std::string metis_partition_file;
};

fs::path parts_dir(const CommonOpts& opts) {
    return fs::path(opts.out_dir) / "parts" /
           (opts.strategy + "-k" + std::to_string(opts.k));
}

std::vector<EncodedTriple> load_store_triples(const CommonOpts& opts) {
    return load_triples(fs::path(opts.out_dir) / "dataset.bin");
}

StrategyConfig strategy_config(const CommonOpts& opts) {
    StrategyConfig cfg;
    cfg.k = opts.k;
    cfg.hash_seed = opts.seed;
    cfg.hop_count = opts.nhop;
    cfg.strategy = strategy_from_name(opts.strategy);
    cfg.hybrid_prehop = opts.hybrid_prehop;
    cfg.validate();
    return cfg;
}

int run_generate(const std::string& out_file, std::uint32_t universities, std::uint64_t seed,
                 double hub_fraction) {
    std::string text = generate_synthetic({universities, seed, hub_fraction});
    std::ofstream out(out_file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + out_file);
    out << text;
    std::size_t lines = std::count(text.begin(), text.end(), '\n');
    std::cout << "wrote " << lines << " triples to " << out_file << "\n";
    return 0;
}

int run_encode(const std::string& input, const CommonOpts& opts, bool skip_malformed) {
    fs::create_directories(opts.out_dir);
    std::string text = load_text_auto(input);
    ParseStats stats;
    std::vector<TermTriple> term_triples =
        parse_ntriples(text, skip_malformed ? ParsePolicy::SkipAndCount : ParsePolicy::Abort,
                       &stats);
    DictionaryPair dicts;
    std::vector<EncodedTriple> triples = encode_triples(term_triples, dicts);
    save_triples(fs::path(opts.out_dir) / "dataset.bin", triples);
    save_dictionaries(opts.out_dir, dicts);
    std::cout << "encoded " << triples.size() << " triples (" << dicts.nodes.size() << " nodes, "
              << dicts.predicates.size() << " predicates";
    if (stats.skipped > 0) std::cout << ", " << stats.skipped << " malformed lines skipped";
    std::cout << ") into " << opts.out_dir << "\n";
    return 0;
}

int run_prep_graph(const CommonOpts& opts) {
    std::vector<EncodedTriple> triples = load_store_triples(opts);
    DictionaryPair dicts = load_dictionaries(opts.out_dir);
    UndirectedGraph g = to_undirected(triples, dicts.nodes.size());
    write_metis_file(fs::path(opts.out_dir) / "graph.metis", g);
    std::cout << "graph: " << g.vertex_count() << " vertices, " << g.edge_count << " edges -> "
              << (fs::path(opts.out_dir) / "graph.metis").string() << "\n";
    return 0;
}

int run_partition(const CommonOpts& opts, double epsilon) {
    std::vector<EncodedTriple> triples = load_store_triples(opts);
    DictionaryPair dicts = load_dictionaries(opts.out_dir);
    UndirectedGraph g = to_undirected(triples, dicts.nodes.size());
    StrategyConfig cfg = strategy_config(opts);
    cfg.balance_epsilon = epsilon;
    PartitionMap pm = multilevel_partition(g, cfg);
    write_metis_partition_file(fs::path(opts.out_dir) / "partition.txt", pm);
    std::cout << "partitioned " << g.vertex_count() << " vertices into " << opts.k
              << " parts, edge cut " << edge_cut(g, pm) << " of " << g.edge_count << " -> "
              << (fs::path(opts.out_dir) / "partition.txt").string() << "\n";
    return 0;
}

int run_replicate(const CommonOpts& opts) {
    std::vector<EncodedTriple> triples = load_store_triples(opts);
    DictionaryPair dicts = load_dictionaries(opts.out_dir);
    std::vector<Query> workload;
    if (!opts.workload.empty()) workload = load_workload(opts.workload, dicts);

    StrategyConfig cfg = strategy_config(opts);
    PartitionMap pm;
    const PartitionMap* external = nullptr;
    if (!opts.metis_partition_file.empty()) {
        pm = read_metis_partition_file(opts.metis_partition_file, dicts.nodes.size(), opts.k);
        external = &pm;
    }
    PipelineResult built = build_partitioned_dataset(triples, workload, cfg, external);
    fs::path dir = parts_dir(opts);
    save_partitioned(dir, built.pd);
    std::cout << "strategy " << opts.strategy << ", k=" << opts.k << ": "
              << built.pd.original_count() << " originals, " << built.pd.total_quads()
              << " quads, replication rate " << replication_rate(built.pd) << ", size stddev "
              << size_stddev(built.pd) << "\n";
    for (const StageStat& s : built.stages)
        std::printf("  %-12s %10.2f ms   quads %zu\n", s.name.c_str(), s.ms, s.quads_after);
    std::cout << "saved to " << dir.string() << "\n";
    return 0;
}

int run_query(const std::string& query_file, const CommonOpts& opts, const std::string& mode,
              bool print_rows) {
    DictionaryPair dicts = load_dictionaries(opts.out_dir);
    fs::path prefix_file = fs::path(query_file).parent_path() / "prefixes.tsv";
    PrefixMap prefixes;
    if (fs::exists(prefix_file)) prefixes = load_prefixes(prefix_file);
    Query q = load_query_file(query_file, prefixes, dicts);
    PartitionedDataset pd = load_partitioned(parts_dir(opts));

    std::vector<std::string> workload_keys;
    if (!opts.workload.empty()) {
        for (const GeneralizedPattern& gp :
             warp_generalize(load_workload(opts.workload, dicts)))
            workload_keys.push_back(gp.key);
    }

    Strategy strategy = strategy_from_name(opts.strategy);
    EvalResult result;
    if (mode == "local") {
        Locality loc = classify_locality(q, strategy, opts.nhop, workload_keys);
        result = evaluate_local(q, pd, 1, /*forced=*/loc != Locality::Local);
    } else if (mode == "distributed") {
        result = evaluate_distributed(q, pd, opts.seed);
    } else {
        Locality loc = classify_locality(q, strategy, opts.nhop, workload_keys);
        result = loc == Locality::Local ? evaluate_local(q, pd)
                                        : evaluate_distributed(q, pd, opts.seed);
    }

    if (print_rows) {
        for (const std::vector<std::string>& row : decode_rows(result.results, q, dicts)) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) std::cout << '\t';
                std::cout << row[i];
            }
            std::cout << '\n';
        }
    }
    const QueryRunReport& rep = result.report;
    std::cerr << q.id << ": mode=" << (rep.mode == RunMode::Local ? "local" : "distributed")
              << (rep.forced ? " (forced)" : "") << " results=" << rep.result_count
              << " tuples_exchanged=" << rep.shuffle.tuples_exchanged
              << " bytes_estimated=" << rep.shuffle.bytes_estimated << " time_ms=" << rep.wall_ms
              << "\n";
    return 0;
}

int run_verify(const CommonOpts& opts, bool check_nhop) {
    bool ok = true;
    auto check = [&ok](const std::string& name, bool pass, const std::string& detail = "") {
        std::cout << (pass ? "PASS  " : "FAIL  ") << name;
        if (!pass && !detail.empty()) std::cout << "  (" << detail << ")";
        std::cout << "\n";
        ok = ok && pass;
    };

    // structural invariants (duplicate pairs, replica provenance, meta counts)
    // are enforced while loading
    PartitionedDataset pd = load_partitioned(parts_dir(opts));
    check("partition files well-formed", true);

    std::vector<EncodedTriple> triples = load_store_triples(opts);
    std::unordered_set<EncodedTriple, TripleHash> distinct(triples.begin(), triples.end());
    check("original quads match encoded dataset", pd.original_count() == distinct.size(),
          std::to_string(pd.original_count()) + " vs " + std::to_string(distinct.size()));
    bool all_known = true;
    for (const EncodedTriple& t : pd.originals()) all_known &= distinct.contains(t);
    check("every original quad is an input triple", all_known);

    if (check_nhop) {
        NHopCheck hop = verify_nhop(pd, triples, opts.nhop);
        std::string detail;
        if (!hop.ok) {
            detail = "partition " + std::to_string(hop.violation.partition) + " misses path of " +
                     std::to_string(hop.violation.path.size()) + " triples";
        }
        check(std::to_string(opts.nhop) + "-hop guarantee", hop.ok, detail);
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RDF partitioning workbench"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    CommonOpts opts;
    app.add_option("--out-dir", opts.out_dir, "store directory (encoded data + partitions)");
    app.add_option("--strategy", opts.strategy,
                   "random-hash | subject-hash | graph-subject | graph-nhop | warp | hybrid");
    app.add_option("--k", opts.k, "number of partitions");
    auto* nhop_opt = app.add_option("--n-hop", opts.nhop, "n of the n-hop guarantee");
    app.add_option("--hybrid-prehop", opts.hybrid_prehop,
                   "optional hop stage before hybrid refinement");
    app.add_option("--seed", opts.seed, "hash / generator seed");
    app.add_option("--workload", opts.workload, "workload .rq file or directory");
    app.add_option("--metis-partition-file", opts.metis_partition_file,
                   "use an externally computed partition file");

    auto* generate = app.add_subcommand("generate", "emit a synthetic university dataset");
    std::string gen_out = "data.nt";
    std::uint32_t universities = 2;
    double hub_fraction = 0.0;
    generate->add_option("--out", gen_out, "output N-Triples file");
    generate->add_option("--universities", universities, "university count (size knob)");
    generate->add_option("--hub-fraction", hub_fraction,
                         "fraction of triples given to one hub subject");

    auto* encode = app.add_subcommand("encode", "parse + dictionary-encode an N-Triples file");
    std::string input;
    bool skip_malformed = false;
    encode->add_option("input", input, "N-Triples file (optionally gzip)")->required();
    encode->add_flag("--skip-malformed", skip_malformed, "count malformed lines instead of aborting");

    auto* prep = app.add_subcommand("prep-graph", "write the Metis graph of the encoded dataset");

    auto* partition = app.add_subcommand("partition", "run the internal multilevel partitioner");
    double epsilon = 0.03;
    partition->add_option("--epsilon", epsilon, "balance tolerance");

    auto* replicate =
        app.add_subcommand("replicate", "build a partitioned dataset under a strategy");

    auto* query = app.add_subcommand("query", "evaluate a query against a partitioned dataset");
    std::string query_file, mode = "auto";
    bool quiet = false;
    query->add_option("file", query_file, "query file (.rq)")->required();
    query->add_option("--mode", mode, "auto | local | distributed");
    query->add_flag("--count-only", quiet, "suppress result rows");

    auto* verify = app.add_subcommand("verify", "check partitioned-dataset invariants");

    auto* bench = app.add_subcommand("bench", "full sweep: build + metrics + queries");
    std::string config_file;
    BenchConfig bench_cfg;
    std::vector<std::string> bench_sets;
    bench->add_option("--config", config_file, "key=value config file");
    bench->add_option("--set", bench_sets, "override, e.g. --set k=5,10 --set universities=5");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return run_generate(gen_out, universities, opts.seed, hub_fraction);
        if (encode->parsed()) return run_encode(input, opts, skip_malformed);
        if (prep->parsed()) return run_prep_graph(opts);
        if (partition->parsed()) return run_partition(opts, epsilon);
        if (replicate->parsed()) return run_replicate(opts);
        if (query->parsed()) return run_query(query_file, opts, mode, !quiet);
        // the hop check only makes sense for datasets built with one, so it
        // runs when --n-hop was given explicitly
        if (verify->parsed()) return run_verify(opts, nhop_opt->count() > 0);
        if (bench->parsed()) {
            if (!config_file.empty()) load_bench_config(config_file, bench_cfg);
            for (const std::string& s : bench_sets) {
                std::size_t eq = s.find('=');
                if (eq == std::string::npos) throw Error("bad --set (want key=value): " + s);
                apply_bench_setting(bench_cfg, s.substr(0, eq), s.substr(eq + 1));
            }
            BenchReport report = run_benchmark(bench_cfg);
            std::cout << "benchmarked " << report.runs.size() << " (strategy, k) combinations on "
                      << report.input_triples << " triples; reports in "
                      << bench_cfg.out_dir.string() << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
