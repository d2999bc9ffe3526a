#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "lfht/validate.hpp"

namespace lfht {

class UnknownScenarioError : public std::runtime_error {
public:
    explicit UnknownScenarioError(const std::string& name)
        : std::runtime_error("unknown scenario: " + name) {}
};

/// Outcome of one stress scenario: the post-run structural/oracle report
/// plus the live tallies the scenario itself asserts on.
struct ScenarioResult {
    std::string name;
    ValidationReport report;
    StatsSnapshot stats;

    std::uint64_t distinct_keys = 0;
    std::uint64_t probes = 0;
    std::uint64_t witness_misses = 0;    // reader-during-expansion
    std::uint64_t multi_winner_keys = 0; // same-key-storm: keys without exactly one winner
    unsigned max_level_depth = 0;

    bool ok() const {
        return report.ok() && witness_misses == 0 && multi_winner_keys == 0;
    }

    void print(std::ostream& os) const;
};

/// All threads check/insert the same key stream with per-thread values;
/// exactly one inserted=true must be seen per key, and the quiescent map
/// must carry each winner's value.
ScenarioResult run_same_key_storm(unsigned threads, std::size_t keys, std::uint64_t seed);

/// Half the threads continuously look up a pre-inserted witness set while
/// the rest force expansions (and cascades) straight through the
/// witnesses' buckets with identity-hash colliding keys. Any failed
/// witness lookup is counted as a miss; the bound is zero.
ScenarioResult run_reader_during_expansion(unsigned threads, std::size_t probes,
                                           std::uint64_t seed);

/// All threads insert one identity-hash family that collides on the first
/// two hash chunks, driving repeated expansions through three and more
/// levels under contention.
ScenarioResult run_collider_cascade(unsigned threads, std::size_t keys, std::uint64_t seed);

/// Random mix of inserts and lookups over a shared keyspace; the
/// quiescent map must equal a sequential replay of all insert streams.
ScenarioResult run_mixed_random(unsigned threads, std::size_t ops, std::uint64_t seed);

/// Dispatch by scenario name ("same-key-storm", "reader-during-expansion",
/// "collider-cascade", "mixed-random"); ops == 0 picks per-scenario
/// defaults. Throws UnknownScenarioError.
ScenarioResult run_scenario(const std::string& name, unsigned threads, std::size_t ops,
                            std::uint64_t seed);

const std::vector<std::string>& scenario_names();

}  // namespace lfht
