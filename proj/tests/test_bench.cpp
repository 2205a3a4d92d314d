#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "rdfpart/bench.hpp"

using namespace rdfpart;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("rdfpart-bench-" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("config files and overrides share one vocabulary") {
    fs::path dir = fresh_dir("config");
    fs::create_directories(dir);
    std::ofstream(dir / "bench.cfg") << "universities=3\nk=2,4\nstrategies=subject-hash,warp\n"
                                     << "seed=11\nrepetitions=1\n";
    BenchConfig cfg;
    load_bench_config(dir / "bench.cfg", cfg);
    CHECK(cfg.universities == 3);
    CHECK(cfg.k_list == std::vector<std::uint32_t>{2, 4});
    REQUIRE(cfg.strategies.size() == 2);
    CHECK(cfg.strategies[1] == Strategy::Warp);
    apply_bench_setting(cfg, "k", "5");
    CHECK(cfg.k_list == std::vector<std::uint32_t>{5});
    CHECK_THROWS_AS(apply_bench_setting(cfg, "nonsense", "1"), Error);
}

TEST_CASE("a small sweep produces all report files") {
    fs::path dir = fresh_dir("sweep");
    BenchConfig cfg;
    cfg.universities = 1;
    cfg.k_list = {2};
    cfg.strategies = {Strategy::RandomHash, Strategy::SubjectHash, Strategy::GraphSubject};
    cfg.repetitions = 1;
    cfg.out_dir = dir;
    BenchReport report = run_benchmark(cfg);

    REQUIRE(report.runs.size() == 3);
    CHECK(report.input_triples > 0);
    for (const StrategyRun& run : report.runs) {
        // allocation-only strategies store nothing twice
        CHECK(run.replication_rate == doctest::Approx(0.0));
        CHECK(run.originals == report.input_triples);
        CHECK(run.partition_sizes.size() == 2);
    }

    for (const char* f : {"metrics.csv", "queries.csv", "report.json", "fig_prep_times.tsv",
                          "fig_size_stddev.tsv", "table_replication.tsv", "fig_query_times.tsv"}) {
        CHECK(fs::exists(dir / f));
    }
    CHECK(!fs::exists(dir / ".lock"));  // released on exit

    std::ifstream in(dir / "report.json");
    nlohmann::json j = nlohmann::json::parse(in);
    CHECK(j["runs"].size() == 3);
}

TEST_CASE("the output directory is locked while a run is active") {
    fs::path dir = fresh_dir("locked");
    fs::create_directories(dir);
    std::ofstream(dir / ".lock") << "";
    BenchConfig cfg;
    cfg.universities = 1;
    cfg.out_dir = dir;
    CHECK_THROWS_AS(run_benchmark(cfg), Error);
}

TEST_CASE("a sweep with a workload runs warp and reports locality") {
    fs::path dir = fresh_dir("workload");

    // write the workload next to a prefix table
    fs::path wdir = dir / "queries";
    fs::create_directories(wdir);
    std::ofstream(wdir / "prefixes.tsv")
        << "ub\thttp://swat.cse.lehigh.edu/onto/univ-bench.owl#\n"
        << "rdf\thttp://www.w3.org/1999/02/22-rdf-syntax-ns#\n";
    std::ofstream(wdir / "q1.rq") << "SELECT ?x ?y ?z WHERE { ?x ub:advisor ?y . "
                                     "?y ub:worksFor ?z . ?z ub:subOrganizationOf ?t }\n";

    BenchConfig cfg;
    cfg.universities = 1;
    cfg.k_list = {3};
    cfg.strategies = {Strategy::SubjectHash, Strategy::Warp};
    cfg.workload = (wdir).string();
    cfg.repetitions = 1;
    cfg.out_dir = dir / "out";
    BenchReport report = run_benchmark(cfg);

    REQUIRE(report.runs.size() == 2);
    const StrategyRun& hash_run = report.runs[0];
    const StrategyRun& warp_run = report.runs[1];
    REQUIRE(hash_run.queries.size() == 1);
    REQUIRE(warp_run.queries.size() == 1);
    // the chain is distributed under plain hashing, local under warp
    CHECK(hash_run.queries[0].mode == RunMode::Distributed);
    CHECK(warp_run.queries[0].mode == RunMode::Local);
    CHECK(warp_run.queries[0].shuffle.tuples_exchanged == 0);
    CHECK(warp_run.queries[0].result_count == hash_run.queries[0].result_count);
    CHECK(warp_run.replication_rate > 0.0);
}
