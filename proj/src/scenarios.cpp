#include "scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <ostream>
#include <random>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "lfht/hash_trie_map.hpp"
#include "lfht/testing.hpp"

namespace lfht {

namespace {

using StressMap =
    HashTrieMap<std::uint64_t, std::uint64_t, PluggableHash, std::equal_to<std::uint64_t>,
                CountingStats>;
using Oracle = std::unordered_map<std::uint64_t, std::uint64_t>;

// Identity-hash family colliding on the first two w=3 chunks: depth-0
// bucket 1 and depth-1 bucket 5; members spread from depth 2 on.
constexpr std::uint64_t family_key(std::uint64_t j) {
    return 1u | (5u << 3) | (j << 6);
}

unsigned depth_of(const StressMap& map) {
    unsigned max_depth = 0;
    for (const auto& level : snapshot_structure(map).levels)
        max_depth = std::max(max_depth, level.depth);
    return max_depth;
}

void finalize(ScenarioResult& result, const StressMap& map, const Oracle& oracle) {
    result.distinct_keys = oracle.size();
    result.report = validate(map, &oracle);
    result.stats = map.debug_stats();
    result.max_level_depth = depth_of(map);
}

template <typename Work>
void run_threads(unsigned threads, Work&& work) {
    std::barrier gate(static_cast<std::ptrdiff_t>(threads));
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            gate.arrive_and_wait();
            work(t);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

ScenarioResult run_same_key_storm(unsigned threads, std::size_t keys, std::uint64_t seed) {
    ScenarioResult result;
    result.name = "same-key-storm";
    if (threads == 0) threads = 1;
    if (keys == 0) keys = 1000;

    std::vector<std::uint64_t> stream;
    {
        std::unordered_set<std::uint64_t> dedup;
        std::uint64_t i = 0;
        while (stream.size() < keys) {
            const std::uint64_t k = mix64(seed ^ i++);
            if (dedup.insert(k).second) stream.push_back(k);
        }
    }

    StressMap map{Config{3, 3}};
    std::vector<std::vector<std::uint64_t>> won(threads);  // per-thread won indices
    run_threads(threads, [&](unsigned t) {
        for (std::size_t i = 0; i < stream.size(); ++i) {
            const std::uint64_t value = (std::uint64_t{t} << 32) | i;
            if (map.insert_or_get(stream[i], value).inserted) won[t].push_back(i);
        }
    });

    std::vector<unsigned> winners(keys, 0);
    Oracle oracle;
    for (unsigned t = 0; t < threads; ++t) {
        for (std::uint64_t i : won[t]) {
            winners[i]++;
            oracle[stream[i]] = (std::uint64_t{t} << 32) | i;
        }
    }
    for (unsigned count : winners)
        if (count != 1) result.multi_winner_keys++;

    finalize(result, map, oracle);
    return result;
}

ScenarioResult run_reader_during_expansion(unsigned threads, std::size_t probes,
                                           std::uint64_t seed) {
    ScenarioResult result;
    result.name = "reader-during-expansion";
    if (threads < 2) threads = 2;
    if (probes == 0) probes = 1000000;
    const unsigned readers = threads / 2;
    const unsigned writers = threads - readers;
    constexpr std::size_t witness_count = 100;
    const std::size_t writer_keys = std::clamp<std::size_t>(probes / 10, 10000, 200000);

    StressMap map{Config{3, 3}, PluggableHash{true}};
    Oracle oracle;
    for (std::size_t j = 0; j < witness_count; ++j) {
        const std::uint64_t k = family_key(j);
        map.insert_or_get(k, k + 1);
        oracle[k] = k + 1;
    }
    for (std::size_t j = witness_count; j < witness_count + writer_keys; ++j) {
        oracle[family_key(j)] = family_key(j) + 1;
    }

    std::atomic<std::uint64_t> misses{0};
    std::atomic<std::uint64_t> done_probes{0};
    run_threads(threads, [&](unsigned t) {
        if (t < writers) {
            // Writers share the family; contention drives expansion races.
            for (std::size_t j = witness_count + t; j < witness_count + writer_keys;
                 j += writers) {
                const std::uint64_t k = family_key(j);
                map.insert_or_get(k, k + 1);
            }
        } else {
            std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (t + 1)));
            const std::size_t quota = probes / readers + (t - writers == 0 ? probes % readers : 0);
            std::uint64_t local_misses = 0;
            for (std::size_t p = 0; p < quota; ++p) {
                const std::uint64_t k = family_key(rng() % witness_count);
                if (!map.contains(k)) ++local_misses;
            }
            misses.fetch_add(local_misses, std::memory_order_relaxed);
            done_probes.fetch_add(quota, std::memory_order_relaxed);
        }
    });

    result.probes = done_probes.load();
    result.witness_misses = misses.load();
    finalize(result, map, oracle);
    return result;
}

ScenarioResult run_collider_cascade(unsigned threads, std::size_t keys, std::uint64_t seed) {
    ScenarioResult result;
    result.name = "collider-cascade";
    if (threads == 0) threads = 1;
    if (keys == 0) keys = 20000;
    (void)seed;  // the family is fixed; contention supplies the nondeterminism

    StressMap map{Config{3, 3}, PluggableHash{true}};
    Oracle oracle;
    for (std::size_t j = 0; j < keys; ++j) oracle[family_key(j)] = mix64(family_key(j));

    run_threads(threads, [&](unsigned) {
        for (std::size_t j = 0; j < keys; ++j) {
            const std::uint64_t k = family_key(j);
            map.insert_or_get(k, mix64(k));
        }
    });

    finalize(result, map, oracle);
    return result;
}

ScenarioResult run_mixed_random(unsigned threads, std::size_t ops, std::uint64_t seed) {
    ScenarioResult result;
    result.name = "mixed-random";
    if (threads == 0) threads = 1;
    if (ops == 0) ops = 100000;
    const std::size_t keyspace = std::max<std::size_t>(64, ops / 4);

    StressMap map{Config{3, 3}};
    run_threads(threads, [&](unsigned t) {
        std::mt19937_64 rng(mix64(seed) ^ t);
        const std::size_t quota = ops / threads + (t == 0 ? ops % threads : 0);
        for (std::size_t i = 0; i < quota; ++i) {
            const std::uint64_t r = rng();
            const std::uint64_t key = (r >> 8) % keyspace;
            if ((r & 0xff) < 180) {  // ~70% inserts
                map.insert_or_get(key, mix64(key));
            } else {
                (void)map.lookup(key);
            }
        }
    });

    // Sequential replay of the same streams.
    Oracle oracle;
    for (unsigned t = 0; t < threads; ++t) {
        std::mt19937_64 rng(mix64(seed) ^ t);
        const std::size_t quota = ops / threads + (t == 0 ? ops % threads : 0);
        for (std::size_t i = 0; i < quota; ++i) {
            const std::uint64_t r = rng();
            const std::uint64_t key = (r >> 8) % keyspace;
            if ((r & 0xff) < 180) oracle.emplace(key, mix64(key));
        }
    }

    result.probes = ops;
    finalize(result, map, oracle);
    return result;
}

ScenarioResult run_scenario(const std::string& name, unsigned threads, std::size_t ops,
                            std::uint64_t seed) {
    if (name == "same-key-storm") return run_same_key_storm(threads, ops, seed);
    if (name == "reader-during-expansion") return run_reader_during_expansion(threads, ops, seed);
    if (name == "collider-cascade") return run_collider_cascade(threads, ops, seed);
    if (name == "mixed-random") return run_mixed_random(threads, ops, seed);
    throw UnknownScenarioError(name);
}

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {
        "same-key-storm", "reader-during-expansion", "collider-cascade", "mixed-random"};
    return names;
}

void ScenarioResult::print(std::ostream& os) const {
    os << "scenario " << name << ": distinct_keys=" << distinct_keys;
    if (probes) os << " probes=" << probes;
    os << " witness_misses=" << witness_misses << " multi_winner_keys=" << multi_winner_keys
       << " max_level_depth=" << max_level_depth << "\n";
    os << "stats: expansions=" << stats.expansions << " cas_failures=" << stats.cas_failures
       << " restarts=" << stats.restarts << " max_bucket_writes=" << stats.max_bucket_writes
       << "\n";
    report.print(os);
}

}  // namespace lfht
