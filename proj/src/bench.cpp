#include "bench.hpp"

#include <algorithm>
#include <barrier>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "lfht/hash_trie_map.hpp"
#include "lfht/locked_hash_map.hpp"
#include "lfht/validate.hpp"

#include "graph.hpp"
#include "path_demo.hpp"

namespace lfht {

namespace {

using BenchTrieMap =
    HashTrieMap<std::uint64_t, std::uint64_t, PluggableHash, std::equal_to<std::uint64_t>>;
using BenchLockedMap =
    LockedHashMap<std::uint64_t, std::uint64_t, PluggableHash, std::equal_to<std::uint64_t>>;
using Oracle = std::unordered_map<std::uint64_t, std::uint64_t>;

std::vector<std::uint64_t> make_stream(const BenchSpec& spec) {
    std::vector<std::uint64_t> keys(spec.keys);
    if (spec.dist == KeyDist::uniform) {
        std::mt19937_64 rng(spec.seed);
        for (auto& k : keys) k = rng();
    } else {
        // Round-robin over `fan` first-level buckets; the upper bits keep
        // the keys distinct and spread them below the expansion point.
        const unsigned w = spec.config.bits_per_level;
        const std::uint64_t fan = std::max(1u, spec.collider_fan);
        for (std::size_t i = 0; i < keys.size(); ++i)
            keys[i] = (i % fan) | ((i / fan) << w);
    }
    return keys;
}

Oracle make_oracle(const std::vector<std::uint64_t>& keys) {
    Oracle oracle;
    oracle.reserve(keys.size());
    for (auto k : keys) oracle.emplace(k, mix64(k));
    return oracle;
}

/// Spawn `threads` workers, release them together, and return the wall
/// time from release to the last join.
template <typename Work>
double timed_parallel(unsigned threads, Work&& work) {
    std::barrier gate(static_cast<std::ptrdiff_t>(threads) + 1);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            gate.arrive_and_wait();
            work(t);
        });
    }
    gate.arrive_and_wait();
    const auto start = std::chrono::steady_clock::now();
    for (auto& th : pool) th.join();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count();
}

template <typename MapT>
void insert_range(MapT& map, const std::vector<std::uint64_t>& keys, std::size_t begin,
                  std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) map.insert_or_get(keys[i], mix64(keys[i]));
}

void check_oracle_outcome(const BenchTrieMap& map, const Oracle& oracle) {
    const ValidationReport report = validate(map, &oracle);
    if (!report.ok()) {
        std::ostringstream os;
        report.print(os);
        throw ValidationFailure("post-run check failed (lfht): " + os.str());
    }
}

void check_oracle_outcome(const BenchLockedMap& map, const Oracle& oracle) {
    std::size_t walked = 0;
    std::string problem;
    map.for_each([&](const std::uint64_t& k, const std::uint64_t& v) {
        ++walked;
        auto it = oracle.find(k);
        if (it == oracle.end()) {
            problem = "unexpected key " + std::to_string(k);
        } else if (it->second != v) {
            problem = "wrong value for key " + std::to_string(k);
        }
    });
    if (problem.empty() && walked != oracle.size())
        problem = "key count " + std::to_string(walked) + " != expected " +
                  std::to_string(oracle.size());
    if (!problem.empty())
        throw ValidationFailure("post-run check failed (lockbased): " + problem);
}

template <typename MapT>
double run_insert_repeat(const BenchSpec& spec, unsigned threads,
                         const std::vector<std::uint64_t>& keys, const Oracle& oracle) {
    const PluggableHash hash{spec.dist == KeyDist::collider};
    MapT map = [&] {
        if constexpr (std::is_same_v<MapT, BenchTrieMap>) {
            return MapT{spec.config, hash};
        } else {
            return MapT{8, hash};
        }
    }();

    const double seconds = timed_parallel(threads, [&](unsigned t) {
        if (spec.mode == BenchMode::same_work) {
            insert_range(map, keys, 0, keys.size());
        } else {
            const std::size_t chunk = keys.size() / threads;
            const std::size_t begin = t * chunk;
            const std::size_t end = (t + 1 == threads) ? keys.size() : begin + chunk;
            insert_range(map, keys, begin, end);
        }
    });
    check_oracle_outcome(map, oracle);
    return seconds;
}

double run_path_repeat(const BenchSpec& spec, unsigned threads, const Graph& graph,
                       const std::vector<std::uint64_t>& sources,
                       const std::vector<std::pair<std::uint64_t, std::uint64_t>>& reference) {
    PathTableSpace tables(spec.config);
    const auto start = std::chrono::steady_clock::now();
    const auto pairs = tabled_path(graph, sources, threads, tables);
    const auto stop = std::chrono::steady_clock::now();

    ValidationReport report = validate(tables.subgoal_map());
    tables.for_each_subgoal([&](std::uint64_t s, const PathTableSpace::AnswerTable& table) {
        report.merge(validate(table.answer_map()), "answers(" + std::to_string(s) + ")/");
        if (!table.complete())
            report.add(ViolationCode::unreachable_key, "answers(" + std::to_string(s) + ")",
                       "table not marked complete");
    });
    if (!report.ok()) {
        std::ostringstream os;
        report.print(os);
        throw ValidationFailure("post-run check failed (path-demo): " + os.str());
    }
    if (pairs != reference)
        throw ValidationFailure("path-demo result differs from the single-thread reference");
    return std::chrono::duration<double>(stop - start).count();
}

}  // namespace

const char* to_string(BenchImpl impl) {
    return impl == BenchImpl::lfht ? "lfht" : "lockbased";
}
const char* to_string(BenchMode mode) {
    switch (mode) {
        case BenchMode::same_work: return "same-work";
        case BenchMode::partitioned: return "partitioned";
        case BenchMode::path_demo: return "path-demo";
    }
    return "?";
}
const char* to_string(KeyDist dist) {
    return dist == KeyDist::uniform ? "uniform" : "collider";
}

BenchImpl parse_impl(const std::string& name) {
    if (name == "lfht") return BenchImpl::lfht;
    if (name == "lockbased") return BenchImpl::lockbased;
    throw ConfigError("unknown impl: " + name);
}
BenchMode parse_mode(const std::string& name) {
    if (name == "same-work") return BenchMode::same_work;
    if (name == "partitioned") return BenchMode::partitioned;
    if (name == "path-demo") return BenchMode::path_demo;
    throw ConfigError("unknown mode: " + name);
}
KeyDist parse_dist(const std::string& name) {
    if (name == "uniform") return KeyDist::uniform;
    if (name == "collider") return KeyDist::collider;
    throw ConfigError("unknown distribution: " + name);
}

void BenchSpec::validate() const {
    config.validate();
    if (repeats < 1) throw ConfigError("repeats must be >= 1");
    if (threads.empty()) throw ConfigError("at least one thread count is required");
    for (unsigned t : threads)
        if (t < 1) throw ConfigError("thread counts must be >= 1");
    if (mode == BenchMode::path_demo) {
        if (graph_path.empty() && grid_side == 0)
            throw ConfigError("path-demo requires --graph or --grid");
        if (impl != BenchImpl::lfht)
            throw ConfigError("path-demo runs on the lfht table space only");
    } else if (keys == 0) {
        throw ConfigError("keys must be >= 1");
    }
}

BenchRun run_benchmark(const BenchSpec& spec) {
    spec.validate();
    BenchRun run{spec, {}};

    std::vector<std::uint64_t> keys;
    Oracle oracle;
    Graph graph;
    std::vector<std::uint64_t> sources;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> reference;
    if (spec.mode == BenchMode::path_demo) {
        graph = spec.grid_side > 0 ? make_grid(spec.grid_side) : read_graph_file(spec.graph_path);
        run.spec.keys = graph.node_count;  // the CSV keys column reports sources
        sources.resize(graph.node_count);
        std::iota(sources.begin(), sources.end(), 0);
        {
            PathTableSpace tables(spec.config);
            reference = tabled_path(graph, sources, 1, tables);
        }
    } else {
        keys = make_stream(spec);
        oracle = make_oracle(keys);
    }

    for (unsigned threads : spec.threads) {
        BenchCell cell;
        cell.threads = threads;
        for (unsigned rep = 0; rep <= spec.repeats; ++rep) {  // rep 0 is warm-up
            double seconds = 0;
            switch (spec.mode) {
                case BenchMode::path_demo:
                    seconds = run_path_repeat(spec, threads, graph, sources, reference);
                    break;
                case BenchMode::same_work:
                case BenchMode::partitioned:
                    seconds = spec.impl == BenchImpl::lfht
                                  ? run_insert_repeat<BenchTrieMap>(spec, threads, keys, oracle)
                                  : run_insert_repeat<BenchLockedMap>(spec, threads, keys, oracle);
                    break;
            }
            if (rep > 0) cell.seconds.push_back(seconds);
        }
        cell.mean = std::accumulate(cell.seconds.begin(), cell.seconds.end(), 0.0) /
                    static_cast<double>(cell.seconds.size());
        run.cells.push_back(std::move(cell));
    }

    // Ratios need the single-thread cell of this same run.
    const BenchCell* base = nullptr;
    for (const auto& cell : run.cells)
        if (cell.threads == 1) base = &cell;
    if (base && base->mean > 0) {
        for (auto& cell : run.cells) {
            if (spec.mode == BenchMode::same_work) {
                cell.overhead = cell.mean / base->mean;
            } else {
                cell.speedup = base->mean / cell.mean;
            }
        }
    }
    return run;
}

void write_csv(std::ostream& os, const BenchRun& run) {
    const BenchSpec& spec = run.spec;
    os << "impl,mode,threads,keys,w,threshold,repeat,seconds,overhead,speedup\n";
    const auto prefix = [&](std::ostream& row, unsigned threads) {
        row << to_string(spec.impl) << ',' << to_string(spec.mode) << ',' << threads << ','
            << spec.keys << ',' << spec.config.bits_per_level << ',' << spec.config.threshold
            << ',';
    };
    os << std::fixed;
    for (const auto& cell : run.cells) {
        for (std::size_t r = 0; r < cell.seconds.size(); ++r) {
            prefix(os, cell.threads);
            os << (r + 1) << ',' << std::setprecision(6) << cell.seconds[r] << ",,\n";
        }
        prefix(os, cell.threads);
        os << "mean," << std::setprecision(6) << cell.mean << ',';
        if (cell.overhead) os << std::setprecision(3) << *cell.overhead;
        os << ',';
        if (cell.speedup) os << std::setprecision(3) << *cell.speedup;
        os << '\n';
    }
}

void write_csv_file(const std::string& path, const BenchRun& run) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open output file: " + path);
    write_csv(out, run);
    if (!out) throw IoError("failed writing output file: " + path);
}

}  // namespace lfht
