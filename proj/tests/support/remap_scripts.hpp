#pragma once

// Scripted two/three-level remap interleavings, shared by the unit tests
// and the acceptance suite. A designated thread triggers an expansion and
// is parked at every protocol point; between steps the driver inspects
// the raw structure and injects concurrent inserts. Each step asserts the
// exact slot targets of the corresponding intermediate shape.

#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "lfht/hash_trie_map.hpp"
#include "lfht/testing.hpp"
#include "lfht/validate.hpp"

namespace lfht::testing {

struct ScriptCheck {
    std::vector<std::string> errors;
    bool ok() const { return errors.empty(); }
};

namespace script_detail {

using ScriptMap = HashTrieMap<std::uint64_t, std::uint64_t, IdentityHash,
                              std::equal_to<std::uint64_t>, CountingStats, ScriptedHooks>;
using Snap = StructureSnapshot<std::uint64_t>;

// w = 3, threshold = 3, identity hash. All keys share depth-0 bucket 1
// (the source bucket); at depth 1 they split between buckets 2 and 5; at
// depth 2 between buckets 1..4.
constexpr std::uint64_t kK1 = 1 | (2u << 3);                           // depth-1 bucket 2
constexpr std::uint64_t kK2 = 1 | (5u << 3) | (1u << 6);               // depth-1 b5, depth-2 b1
constexpr std::uint64_t kK3 = 1 | (5u << 3) | (1u << 6) | (1u << 9);   // depth-1 b5, depth-2 b1
constexpr std::uint64_t kK4 = 1 | (5u << 3) | (2u << 6);               // depth-1 b5, depth-2 b2
constexpr std::uint64_t kK5 = 1 | (2u << 3) | (1u << 6);               // depth-1 bucket 2
constexpr std::uint64_t kK6 = 1 | (5u << 3) | (3u << 6);               // depth-1 b5, depth-2 b3
constexpr std::uint64_t kK7 = 1 | (5u << 3) | (4u << 6);               // depth-1 b5, depth-2 b4
constexpr std::uint64_t kTrigger = 1 | (6u << 3);
constexpr std::size_t kSourceBucket = 1;  // depth 0: holds the chain being remapped
constexpr std::size_t kSplitBucket = 2;   // depth 1: K1/K5 land here
constexpr std::size_t kFullBucket = 5;    // depth 1: the bucket that fills up
constexpr std::size_t kDeepPair = 1;      // depth 2: K2/K3 land here in the cascade
constexpr std::size_t kDeepTail = 4;      // depth 2: K7 lands here

struct Script {
    ScriptMap map;
    InterleaveController ctl;
    std::thread armed;
    ScriptCheck check;

    Script() : map(Config{3, 3}, IdentityHash{}, {}, ScriptedHooks{&ctl}) {}

    void expect(bool cond, const std::string& what) {
        if (!cond) check.errors.push_back(what);
    }

    /// Park-and-verify: waits for the armed thread, checks the point.
    HookEvent pause_at(ProtocolPoint point, const std::string& step) {
        const HookEvent ev = ctl.await_pause();
        expect(ev.point == point, step + ": parked at a different protocol point");
        return ev;
    }

    const Snap::Bucket* bucket(const Snap& snap, unsigned depth, std::size_t index,
                               const std::string& step) {
        const auto* level = snap.level_at_depth(depth);
        if (!level) {
            expect(false, step + ": no level at depth " + std::to_string(depth));
            return nullptr;
        }
        return &level->buckets[index];
    }

    void expect_chain(const Snap& snap, unsigned depth, std::size_t index,
                      const std::vector<std::uint64_t>& keys, unsigned terminator_depth,
                      const std::string& step) {
        const auto* b = bucket(snap, depth, index, step);
        if (!b) return;
        expect(b->kind == Snap::Kind::chain, step + ": bucket is not a chain");
        expect(b->keys == keys, step + ": chain keys differ");
        expect(b->terminator_depth == terminator_depth,
               step + ": terminator at depth " + std::to_string(b->terminator_depth) +
                   ", expected " + std::to_string(terminator_depth));
    }

    void expect_child(const Snap& snap, unsigned depth, std::size_t index,
                      unsigned child_depth, const std::string& step) {
        const auto* b = bucket(snap, depth, index, step);
        if (!b) return;
        expect(b->kind == Snap::Kind::child, step + ": bucket is not a child reference");
        expect(b->child_depth == child_depth, step + ": child depth differs");
    }

    void expect_found(const std::vector<std::uint64_t>& keys, const std::string& step) {
        for (std::uint64_t k : keys)
            expect(map.contains(k), step + ": key " + std::to_string(k) + " not found");
    }

    void start_trigger() {
        armed = std::thread([this] {
            ctl.arm_current_thread();
            map.insert_or_get(kTrigger, kTrigger);
        });
    }

    ScriptCheck finish() {
        ctl.finish();
        armed.join();
        const auto report = validate(map);
        for (const auto& v : report.violations)
            check.errors.push_back(std::string("final validation: ") + violation_name(v.code) +
                                   " " + v.detail);
        const auto stats = map.debug_stats();
        expect(stats.max_bucket_writes <= 2, "bucket writes exceeded 2");
        return check;
    }
};

}  // namespace script_detail

/// Two-level expansion walked step by step: tail-first remap of K1..K3,
/// a concurrent insert landing in a half-remapped bucket, and the final
/// graying of the source bucket.
inline ScriptCheck run_two_level_remap_script() {
    using namespace script_detail;
    Script s;
    for (std::uint64_t k : {kK1, kK2, kK3}) s.map.insert_or_get(k, k);
    s.start_trigger();

    s.pause_at(ProtocolPoint::pre_expand_cas, "two-level/pre-cas");
    s.ctl.step();

    s.pause_at(ProtocolPoint::post_expand_cas, "two-level/cas won");
    {
        auto snap = snapshot_structure(s.map);
        // Chain unchanged, but now closed onto the published second level.
        s.expect_chain(snap, 0, kSourceBucket, {kK1, kK2, kK3}, 1, "two-level/cas won: source");
        s.expect(snap.level_count_at_depth(1) == 1,
                 "two-level/cas won: second level not discovered");
    }
    s.ctl.step();

    s.pause_at(ProtocolPoint::post_node_remap, "two-level/K3 placed");
    {
        auto snap = snapshot_structure(s.map);
        s.expect_chain(snap, 0, kSourceBucket, {kK1, kK2, kK3}, 1, "two-level/K3 placed: source");
        s.expect_chain(snap, 1, kFullBucket, {kK3}, 1, "two-level/K3 placed: target");
        s.expect_found({kK1, kK2, kK3}, "two-level/K3 placed");
    }
    s.ctl.step();

    s.pause_at(ProtocolPoint::post_chain_break, "two-level/K2 now tail");
    {
        auto snap = snapshot_structure(s.map);
        s.expect_chain(snap, 0, kSourceBucket, {kK1, kK2}, 1, "two-level/K2 now tail: source");
        s.expect_chain(snap, 1, kFullBucket, {kK3}, 1, "two-level/K2 now tail: target");
    }
    // Concurrent insert while the bucket is half remapped: K4 joins the
    // target chain ahead of the not-yet-moved K2.
    s.expect(s.map.insert_or_get(kK4, kK4).inserted, "two-level/K4 inject failed");
    s.ctl.step();

    s.pause_at(ProtocolPoint::post_node_remap, "two-level/K2 placed");
    {
        auto snap = snapshot_structure(s.map);
        s.expect_chain(snap, 1, kFullBucket, {kK3, kK4, kK2}, 1, "two-level/K2 placed: target");
        s.expect_chain(snap, 0, kSourceBucket, {kK1, kK2}, 1, "two-level/K2 placed: source");
        s.expect_found({kK1, kK2, kK3, kK4}, "two-level/K2 placed");
    }
    s.ctl.step();

    s.pause_at(ProtocolPoint::post_chain_break, "two-level/K1 now tail");
    {
        auto snap = snapshot_structure(s.map);
        s.expect_chain(snap, 0, kSourceBucket, {kK1}, 1, "two-level/K1 now tail: source");
    }
    s.expect(s.map.insert_or_get(kK5, kK5).inserted, "two-level/K5 inject failed");
    s.ctl.step();

    s.pause_at(ProtocolPoint::post_node_remap, "two-level/K1 placed");
    {
        auto snap = snapshot_structure(s.map);
        s.expect_chain(snap, 1, kSplitBucket, {kK5, kK1}, 1, "two-level/K1 placed: target");
        s.expect_chain(snap, 0, kSourceBucket, {kK1}, 1, "two-level/K1 placed: source");
    }
    s.ctl.step();

    s.pause_at(ProtocolPoint::pre_bucket_gray, "two-level/pre-gray");
    auto check = s.finish();

    {
        auto snap = snapshot_structure(s.map);
        Script& v = s;  // final shape
        v.expect_child(snap, 0, kSourceBucket, 1, "two-level/final: source gray");
        v.expect_chain(snap, 1, kSplitBucket, {kK5, kK1}, 1, "two-level/final: split bucket");
        v.expect_chain(snap, 1, kFullBucket, {kK3, kK4, kK2}, 1, "two-level/final: full bucket");
        v.expect_chain(snap, 1, 6, {kTrigger}, 1, "two-level/final: trigger bucket");
        v.expect_found({kK1, kK2, kK3, kK4, kK5, kTrigger}, "two-level/final");
        check = v.check;
    }
    return check;
}

/// Third-level cascade walked step by step: the remap of K3 finds its
/// destination bucket full, expands it into a third level mid-remap, and
/// the old chain keeps closing onto the second level throughout. Also
/// probes reader visibility inside the cascade windows.
inline ScriptCheck run_cascade_remap_script() {
    using namespace script_detail;
    Script s;
    for (std::uint64_t k : {kK1, kK2, kK3}) s.map.insert_or_get(k, k);
    s.start_trigger();

    s.pause_at(ProtocolPoint::pre_expand_cas, "cascade/pre-cas");
    s.ctl.step();
    s.pause_at(ProtocolPoint::post_expand_cas, "cascade/second level up");
    // Fill the destination bucket to the threshold and put a witness in
    // the split bucket before the remapping of K1..K3 begins.
    for (std::uint64_t k : {kK4, kK6, kK7, kK5})
        s.expect(s.map.insert_or_get(k, k).inserted, "cascade/setup insert failed");
    {
        auto snap = snapshot_structure(s.map);
        s.expect_chain(snap, 1, kFullBucket, {kK4, kK6, kK7}, 1, "cascade/setup: full bucket");
        s.expect_chain(snap, 1, kSplitBucket, {kK5}, 1, "cascade/setup: split bucket");
    }
    s.ctl.step();

    // K3 is scheduled into the full bucket: nested expansion.
    s.pause_at(ProtocolPoint::pre_expand_cas, "cascade/third level pre-allocated");
    {
        auto snap = snapshot_structure(s.map);
        s.expect(snap.level_count_at_depth(2) == 0,
                 "cascade/third level visible before its CAS");
        s.expect_chain(snap, 1, kFullBucket, {kK4, kK6, kK7}, 1, "cascade/pre-alloc: full bucket");
        s.expect_chain(snap, 0, kSourceBucket, {kK1, kK2, kK3}, 1, "cascade/pre-alloc: source");
    }
    s.ctl.step();

    s.pause_at(ProtocolPoint::post_expand_cas, "cascade/third level published");
    {
        auto snap = snapshot_structure(s.map);
        s.expect_chain(snap, 1, kFullBucket, {kK4, kK6, kK7}, 2,
                       "cascade/published: full bucket closes one deeper");
        s.expect_chain(snap, 0, kSourceBucket, {kK1, kK2, kK3}, 1,
                       "cascade/published: source untouched");
    }
    s.ctl.step();

    // Nested remap of the full bucket's own chain: K7, K6, K4 move down.
    s.pause_at(ProtocolPoint::post_node_remap, "cascade/nested K7 placed");
    s.ctl.step();
    s.pause_at(ProtocolPoint::post_chain_break, "cascade/nested K6 now tail");
    s.ctl.step();
    s.pause_at(ProtocolPoint::post_node_remap, "cascade/nested K6 placed");
    s.ctl.step();
    s.pause_at(ProtocolPoint::post_chain_break, "cascade/nested K4 now tail");
    s.ctl.step();
    s.pause_at(ProtocolPoint::post_node_remap, "cascade/nested K4 placed");
    s.ctl.step();
    s.pause_at(ProtocolPoint::pre_bucket_gray, "cascade/full bucket about to gray");
    {
        auto snap = snapshot_structure(s.map);
        s.expect_chain(snap, 2, kDeepTail, {kK7}, 2, "cascade/nested done: K7 bucket");
        s.expect_chain(snap, 2, 3, {kK6}, 2, "cascade/nested done: K6 bucket");
        s.expect_chain(snap, 2, 2, {kK4}, 2, "cascade/nested done: K4 bucket");
        // Old chain still terminates on the second level, not the third.
        s.expect_chain(snap, 0, kSourceBucket, {kK1, kK2, kK3}, 1,
                       "cascade/nested done: source");
        s.expect_found({kK1, kK2, kK3, kK4, kK5, kK6, kK7}, "cascade/nested done");
    }
    s.ctl.step();

    // K3 rescheduled into the third level. While it is linked from both
    // chains its old-chain terminator points two levels down — the reader
    // rule must still reach the witness through the level in between.
    s.pause_at(ProtocolPoint::post_node_remap, "cascade/K3 rescheduled");
    {
        auto snap = snapshot_structure(s.map);
        s.expect_child(snap, 1, kFullBucket, 2, "cascade/K3 rescheduled: full bucket gray");
        s.expect_chain(snap, 2, kDeepPair, {kK3}, 2, "cascade/K3 rescheduled: deep bucket");
        s.expect_chain(snap, 0, kSourceBucket, {kK1, kK2, kK3}, 2,
                       "cascade/K3 rescheduled: source closes two levels down");
        s.expect_found({kK5, kK1, kK2, kK3, kK7}, "cascade/K3 window");
    }
    s.ctl.step();

    s.pause_at(ProtocolPoint::post_chain_break, "cascade/K2 now tail");
    {
        auto snap = snapshot_structure(s.map);
        // The last remaining nodes keep closing onto the second level.
        s.expect_chain(snap, 0, kSourceBucket, {kK1, kK2}, 1,
                       "cascade/K2 now tail: source back one deep");
    }
    s.ctl.step();

    s.pause_at(ProtocolPoint::post_node_remap, "cascade/K2 rescheduled");
    {
        auto snap = snapshot_structure(s.map);
        s.expect_chain(snap, 2, kDeepPair, {kK3, kK2}, 2, "cascade/K2 rescheduled: deep bucket");
        s.expect_chain(snap, 0, kSourceBucket, {kK1, kK2}, 2,
                       "cascade/K2 rescheduled: window via K2");
        s.expect_found({kK5, kK1, kK2, kK3}, "cascade/K2 window");
    }
    s.ctl.step();

    s.pause_at(ProtocolPoint::post_chain_break, "cascade/K1 now tail");
    {
        auto snap = snapshot_structure(s.map);
        s.expect_chain(snap, 0, kSourceBucket, {kK1}, 1,
                       "cascade/K1 now tail: still refers one deep");
    }
    s.ctl.step();

    s.pause_at(ProtocolPoint::post_node_remap, "cascade/K1 placed");
    {
        auto snap = snapshot_structure(s.map);
        s.expect_chain(snap, 1, kSplitBucket, {kK5, kK1}, 1, "cascade/K1 placed: split bucket");
    }
    s.ctl.step();

    s.pause_at(ProtocolPoint::pre_bucket_gray, "cascade/source about to gray");
    auto check = s.finish();

    {
        auto snap = snapshot_structure(s.map);
        Script& v = s;
        v.expect_child(snap, 0, kSourceBucket, 1, "cascade/final: source gray");
        v.expect_child(snap, 1, kFullBucket, 2, "cascade/final: full bucket gray");
        v.expect_chain(snap, 2, kDeepPair, {kK3, kK2}, 2, "cascade/final: deep pair");
        v.expect_chain(snap, 2, kDeepTail, {kK7}, 2, "cascade/final: deep tail");
        // The deep lookup path: source gray -> second level -> gray ->
        // third level -> chain.
        v.expect_found({kK1, kK2, kK3, kK4, kK5, kK6, kK7, kTrigger}, "cascade/final");
        check = v.check;
    }
    return check;
}

}  // namespace lfht::testing
