// Command-line harness: `bench` reproduces the measurement methodology
// (same-work worst case, partitioned speedup, tabled path demo) and
// `verify` runs the concurrency stress scenarios with the structural
// validator as the gate.
//
// Exit codes: 0 success, 2 usage, 3 I/O, 4 post-run validation failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "lfht/config.hpp"

#include "bench.hpp"
#include "graph.hpp"
#include "scenarios.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitValidation = 4;

struct BenchArgs {
    std::string impl = "lfht";
    std::string mode = "same-work";
    std::string dist = "uniform";
    std::vector<unsigned> threads = {1, 2, 4, 8};
    std::size_t keys = 100000;
    unsigned fan = 4;
    std::uint64_t seed = 1;
    unsigned w = 3;
    unsigned threshold = 3;
    unsigned repeats = 5;
    std::string out;
    std::string graph;
    std::size_t grid = 0;
};

int run_bench(const BenchArgs& args) {
    lfht::BenchSpec spec;
    spec.impl = lfht::parse_impl(args.impl);
    spec.mode = lfht::parse_mode(args.mode);
    spec.dist = lfht::parse_dist(args.dist);
    spec.threads = args.threads;
    spec.keys = args.keys;
    spec.collider_fan = args.fan;
    spec.seed = args.seed;
    spec.config.bits_per_level = args.w;
    spec.config.threshold = args.threshold;
    spec.repeats = args.repeats;
    spec.graph_path = args.graph;
    spec.grid_side = args.grid;

    const lfht::BenchRun run = lfht::run_benchmark(spec);
    if (args.out.empty()) {
        lfht::write_csv(std::cout, run);
    } else {
        lfht::write_csv_file(args.out, run);
        std::cerr << "wrote " << args.out << "\n";
    }
    for (const auto& cell : run.cells) {
        std::cerr << lfht::to_string(spec.impl) << " " << lfht::to_string(spec.mode)
                  << " threads=" << cell.threads << " mean=" << cell.mean << "s";
        if (cell.overhead) std::cerr << " overhead=" << *cell.overhead;
        if (cell.speedup) std::cerr << " speedup=" << *cell.speedup;
        std::cerr << "\n";
    }
    return 0;
}

struct VerifyArgs {
    std::string scenario;
    unsigned threads = 8;
    std::uint64_t seed = 1;
    std::size_t ops = 0;  // scenario default
};

int run_verify(const VerifyArgs& args) {
    const lfht::ScenarioResult result =
        lfht::run_scenario(args.scenario, args.threads, args.ops, args.seed);
    result.print(std::cout);
    return result.ok() ? 0 : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lock-free hash trie workbench"};
    app.require_subcommand(1);

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "run a benchmark and emit CSV");
    bench->add_option("--impl", bench_args.impl, "map implementation")
        ->check(CLI::IsMember({"lfht", "lockbased"}));
    bench->add_option("--mode", bench_args.mode, "workload mode")
        ->check(CLI::IsMember({"same-work", "partitioned", "path-demo"}));
    bench->add_option("--threads", bench_args.threads, "thread counts, e.g. 1,2,4,8")
        ->delimiter(',');
    bench->add_option("--keys", bench_args.keys, "keys per run");
    bench->add_option("--dist", bench_args.dist, "key distribution")
        ->check(CLI::IsMember({"uniform", "collider"}));
    bench->add_option("--fan", bench_args.fan, "collider: number of first-level buckets hit");
    bench->add_option("--seed", bench_args.seed, "stream seed");
    bench->add_option("--w", bench_args.w, "bits per hash level");
    bench->add_option("--threshold", bench_args.threshold, "chain length expansion threshold");
    bench->add_option("--repeats", bench_args.repeats, "timed repeats per cell");
    bench->add_option("--out", bench_args.out, "CSV output path (default stdout)");
    bench->add_option("--graph", bench_args.graph, "graph file (path-demo)");
    bench->add_option("--grid", bench_args.grid, "generate a SIDE x SIDE grid instead (path-demo)");

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify", "run a stress scenario and validate");
    verify->add_option("--scenario", verify_args.scenario, "scenario name")
        ->required()
        ->check(CLI::IsMember(lfht::scenario_names()));
    verify->add_option("--threads", verify_args.threads, "worker threads");
    verify->add_option("--seed", verify_args.seed, "scenario seed");
    verify->add_option("--ops", verify_args.ops, "operation count (0 = scenario default)");

    try {
        app.parse(argc, argv);
        if (bench->parsed()) return run_bench(bench_args);
        return run_verify(verify_args);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints help / message
        return e.get_exit_code() == 0 ? 0 : kExitUsage;
    } catch (const lfht::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const lfht::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const lfht::GraphFormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const lfht::ValidationFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}
