#include <doctest.h>

#include <sstream>

#include "scenarios.hpp"

using namespace lfht;

// Desk-scale runs of each stress scenario; the acceptance suite runs the
// full-size versions.

TEST_CASE("same-key-storm: one winner per key and a clean report") {
    const auto result = run_same_key_storm(8, 500, 42);
    CHECK(result.multi_winner_keys == 0);
    CHECK(result.distinct_keys == 500);
    CHECK(result.report.ok());
    CHECK(result.stats.max_bucket_writes <= 2);
    CHECK(result.ok());
}

TEST_CASE("reader-during-expansion: no witness goes missing") {
    const auto result = run_reader_during_expansion(4, 50000, 7);
    CHECK(result.probes >= 50000);
    CHECK(result.witness_misses == 0);
    CHECK(result.report.ok());
    CHECK(result.max_level_depth >= 2);  // the cascade actually happened
    CHECK(result.stats.max_bucket_writes <= 2);
}

TEST_CASE("collider-cascade: deep expansion under contention stays sound") {
    const auto result = run_collider_cascade(4, 5000, 1);
    CHECK(result.report.ok());
    CHECK(result.max_level_depth >= 2);
    CHECK(result.stats.expansions > 0);
    CHECK(result.stats.max_bucket_writes <= 2);
}

TEST_CASE("mixed-random: quiescent state equals the sequential replay") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto result = run_mixed_random(4, 20000, seed);
        CHECK(result.report.ok());
        CHECK(result.distinct_keys > 0);
        CHECK(result.stats.max_bucket_writes <= 2);
    }
}

TEST_CASE("scenario dispatcher knows its names") {
    CHECK(scenario_names().size() == 4);
    CHECK_THROWS_AS(run_scenario("nope", 2, 10, 1), UnknownScenarioError);
    const auto result = run_scenario("mixed-random", 2, 5000, 9);
    CHECK(result.name == "mixed-random");
    CHECK(result.ok());

    std::ostringstream os;
    result.print(os);
    CHECK(os.str().find("mixed-random") != std::string::npos);
    CHECK(os.str().find("clean") != std::string::npos);
}
