#include <doctest.h>

#include <thread>
#include <unordered_map>

#include "lfht/hash_trie_map.hpp"
#include "lfht/testing.hpp"
#include "lfht/validate.hpp"

using namespace lfht;

namespace {
using IdMap = HashTrieMap<std::uint64_t, std::uint64_t, IdentityHash,
                          std::equal_to<std::uint64_t>, CountingStats>;
using Snap = StructureSnapshot<std::uint64_t>;
}  // namespace

TEST_CASE("the fourth colliding key expands the bucket one level down") {
    IdMap map{Config{3, 3}};
    // All in depth-0 bucket 1; depth-1 chunks 2, 5, 5, 6.
    const std::uint64_t keys[] = {1 | (2u << 3), 1 | (5u << 3), 1 | (5u << 3) | (1u << 6),
                                  1 | (6u << 3)};
    std::unordered_map<std::uint64_t, std::uint64_t> oracle;
    for (auto k : keys) {
        map.insert_or_get(k, k + 1);
        oracle.emplace(k, k + 1);
    }

    const auto snap = snapshot_structure(map);
    REQUIRE(snap.levels.size() == 2);
    CHECK(snap.levels[0].buckets[1].kind == Snap::Kind::child);  // grayed
    CHECK(snap.levels[1].depth == 1);
    // Every key sits in the depth-1 bucket its second chunk selects; the
    // tail-first remap lands the deepest chain node first.
    CHECK(snap.levels[1].buckets[2].keys == std::vector<std::uint64_t>{keys[0]});
    CHECK(snap.levels[1].buckets[5].keys == std::vector<std::uint64_t>{keys[2], keys[1]});
    CHECK(snap.levels[1].buckets[6].keys == std::vector<std::uint64_t>{keys[3]});
    CHECK(validate(map, &oracle).ok());
    CHECK(map.debug_stats().expansions == 1);
}

TEST_CASE("hash exhaustion: chains at max depth grow without expanding") {
    struct ConstHash {
        std::uint64_t operator()(std::uint64_t) const { return 42; }
    };
    HashTrieMap<std::uint64_t, std::uint64_t, ConstHash> map{Config{16, 3}};  // max_depth 4
    for (std::uint64_t k = 0; k < 20; ++k) map.insert_or_get(k, k);
    for (std::uint64_t k = 0; k < 20; ++k) CHECK(map.contains(k));
    CHECK(validate(map).ok());

    const auto snap = snapshot_structure(map);
    unsigned deepest = 0;
    for (const auto& level : snap.levels) deepest = std::max(deepest, level.depth);
    CHECK(deepest == 4);
    // Every expansion remaps the whole chain down, so with a constant
    // hash all keys end up chained at the deepest level, past threshold.
    const auto* bottom = snap.level_at_depth(4);
    REQUIRE(bottom != nullptr);
    std::size_t chained = 0;
    for (const auto& b : bottom->buckets) chained += b.keys.size();
    CHECK(chained == 20);
}

TEST_CASE("instrumentation counts bucket writes and expansions") {
    IdMap map{Config{3, 3}};
    auto fresh = map.debug_stats();
    CHECK(fresh.expansions == 0);
    CHECK(fresh.cas_failures == 0);
    CHECK(fresh.restarts == 0);
    CHECK(fresh.max_bucket_writes == 0);
    CHECK(fresh.bucket_writes.empty());

    map.insert_or_get(1, 1);
    auto one = map.debug_stats();
    REQUIRE(one.bucket_writes.size() == 1);
    CHECK(one.bucket_writes[0].writes == 1);
    CHECK(one.bucket_writes[0].index == 1);

    // Drive a few expansions; every bucket slot stays within two writes.
    for (std::uint64_t j = 0; j < 64; ++j) map.insert_or_get(1 | (j << 3), j);
    CHECK(map.debug_stats().expansions > 0);
    CHECK(map.debug_stats().max_bucket_writes <= 2);
    CHECK(validate(map).ok());
}

TEST_CASE("debug_stats throws for uninstrumented maps") {
    HashTrieMap<std::uint64_t, std::uint64_t> map;
    CHECK_THROWS_AS(map.debug_stats(), StatsDisabledError);
}

TEST_CASE("a lost expansion CAS aborts, discards its level, and the insert retries") {
    using ScriptMap = HashTrieMap<std::uint64_t, std::uint64_t, IdentityHash,
                                  std::equal_to<std::uint64_t>, CountingStats, ScriptedHooks>;
    InterleaveController ctl;
    ScriptMap map{Config{3, 3}, IdentityHash{}, {}, ScriptedHooks{&ctl}};
    for (std::uint64_t j = 0; j < 3; ++j) map.insert_or_get(1 | (j << 3), j);

    // The armed thread's insert of a fourth colliding key decides to
    // expand and is parked right before its CAS. A competing insert then
    // runs the whole expansion first, so the parked CAS must fail, the
    // pre-allocated level be discarded, and the insert continue into the
    // winner's level.
    //
    // (A *plain append* cannot beat an expansion CAS here: any walker that
    // reaches the tail of a threshold-length chain counts >= threshold
    // and goes for expansion itself, so the only realizable race on the
    // tail terminator is expansion vs expansion.)
    std::thread trigger([&] {
        ctl.arm_current_thread();
        CHECK(map.insert_or_get(1 | (3u << 3), 3).inserted);
    });

    const HookEvent parked = ctl.await_pause();
    CHECK(parked.point == ProtocolPoint::pre_expand_cas);
    CHECK(map.insert_or_get(1 | (4u << 3), 4).inserted);  // wins the expansion
    ctl.finish();
    trigger.join();

    std::unordered_map<std::uint64_t, std::uint64_t> oracle;
    for (std::uint64_t j = 0; j < 5; ++j) oracle.emplace(1 | (j << 3), j);
    CHECK(validate(map, &oracle).ok());
    const auto stats = map.debug_stats();
    CHECK(stats.cas_failures >= 1);   // the armed thread's lost CAS
    CHECK(stats.expansions == 1);     // only the winner's level was published
    CHECK(stats.max_bucket_writes <= 2);

    // Both threads reached the expansion point; only one won it.
    std::size_t pre_cas = 0, post_cas = 0;
    for (const auto& ev : ctl.trace()) {
        if (ev.point == ProtocolPoint::pre_expand_cas) ++pre_cas;
        if (ev.point == ProtocolPoint::post_expand_cas) ++post_cas;
    }
    CHECK(pre_cas == 2);
    CHECK(post_cas == 1);

    // Exactly one depth-1 level exists: the loser's never became visible.
    const auto snap = snapshot_structure(map);
    CHECK(snap.level_count_at_depth(1) == 1);
}
