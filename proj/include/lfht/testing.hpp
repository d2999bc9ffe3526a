#pragma once

#include <cassert>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lfht/hash_trie_map.hpp"

// Deterministic-interleaving support: a controller that parks an armed
// thread at protocol points, a hooks policy that forwards to it, raw
// structure snapshots, and a test-only backdoor for building corrupted
// fixtures. Everything here is for tests and the verification tooling;
// production map types use NoHooks and none of this is instantiated.

namespace lfht {

/// Parks armed threads at protocol points and hands control to a driving
/// thread between steps. One armed thread at a time.
class InterleaveController {
public:
    /// Called by a worker before it runs map operations that should pause.
    void arm_current_thread() {
        std::lock_guard lock(mu_);
        armed_.insert(std::this_thread::get_id());
    }

    void on_point(const HookEvent& event) {
        std::unique_lock lock(mu_);
        trace_.push_back(event);
        if (open_ || armed_.find(std::this_thread::get_id()) == armed_.end()) return;
        current_ = event;
        const std::uint64_t ticket = ++pause_count_;
        cv_.notify_all();
        cv_.wait(lock, [&] { return resume_count_ >= ticket || open_; });
    }

    /// Driver: blocks until the armed thread parks; returns the event.
    HookEvent await_pause() {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return pause_count_ > resume_count_; });
        return current_;
    }

    /// Driver: releases the parked thread to run to the next point.
    void step() {
        std::lock_guard lock(mu_);
        assert(pause_count_ > resume_count_);
        ++resume_count_;
        cv_.notify_all();
    }

    /// Driver: stop pausing; releases everything, current and future.
    void finish() {
        std::lock_guard lock(mu_);
        open_ = true;
        resume_count_ = pause_count_;
        cv_.notify_all();
    }

    std::vector<HookEvent> trace() const {
        std::lock_guard lock(mu_);
        return trace_;
    }

private:
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::unordered_set<std::thread::id> armed_;
    std::vector<HookEvent> trace_;
    HookEvent current_{};
    std::uint64_t pause_count_ = 0;
    std::uint64_t resume_count_ = 0;
    bool open_ = false;
};

/// Hooks policy forwarding to a shared controller.
struct ScriptedHooks {
    static constexpr bool enabled = true;
    InterleaveController* controller = nullptr;

    void on_point(const HookEvent& event) const {
        if (controller) controller->on_point(event);
    }
};

/// Raw shape of a map at one instant: every discovered level with the
/// exact slot contents. Built through the structural visitor; readable
/// while a remapper is parked, since parked threads hold no locks.
template <typename Key>
struct StructureSnapshot {
    enum class Kind { empty, chain, child };

    struct Bucket {
        Kind kind = Kind::empty;
        const void* child = nullptr;
        unsigned child_depth = 0;
        std::vector<Key> keys;
        std::vector<const void*> nodes;
        const void* terminator = nullptr;
        unsigned terminator_depth = 0;
    };

    struct Level {
        const void* id = nullptr;
        const void* parent = nullptr;
        unsigned depth = 0;
        std::vector<Bucket> buckets;
    };

    std::vector<Level> levels;  // BFS discovery order from the root

    const Level* level_with_id(const void* id) const {
        for (const auto& l : levels)
            if (l.id == id) return &l;
        return nullptr;
    }

    /// First discovered level at `depth` (scripts build at most one).
    const Level* level_at_depth(unsigned depth) const {
        for (const auto& l : levels)
            if (l.depth == depth) return &l;
        return nullptr;
    }

    std::size_t level_count_at_depth(unsigned depth) const {
        std::size_t n = 0;
        for (const auto& l : levels)
            if (l.depth == depth) ++n;
        return n;
    }
};

template <typename Map>
StructureSnapshot<typename Map::key_type> snapshot_structure(const Map& map) {
    using Key = typename Map::key_type;
    using Snap = StructureSnapshot<Key>;
    Snap snap;

    struct Builder {
        Snap& snap;
        std::size_t slot_count;

        typename Snap::Level* current = nullptr;

        void on_level(const typename Map::LevelInfo& info) {
            snap.levels.push_back({info.id, info.parent, info.depth, {}});
            current = &snap.levels.back();
            current->buckets.resize(slot_count);
        }
        void on_bucket(const typename Map::BucketInfo& b) {
            auto& bucket = current->buckets[b.index];
            switch (b.kind) {
                case Map::SlotKind::empty: bucket.kind = Snap::Kind::empty; break;
                case Map::SlotKind::chain: bucket.kind = Snap::Kind::chain; break;
                case Map::SlotKind::child_level:
                    bucket.kind = Snap::Kind::child;
                    bucket.child = b.child;
                    bucket.child_depth = b.child_depth;
                    break;
            }
        }
        void on_node(const typename Map::NodeInfo& n) {
            auto& bucket = current->buckets[n.bucket];
            bucket.keys.push_back(*n.key);
            bucket.nodes.push_back(n.id);
        }
        void on_chain_end(const typename Map::ChainEndInfo& c) {
            auto& bucket = current->buckets[c.bucket];
            bucket.terminator = c.terminator;
            bucket.terminator_depth = c.terminator_depth;
        }
    };

    Builder builder{snap, map.config().bucket_count()};
    map.visit(builder);
    return snap;
}

/// Test-only backdoor used to build deliberately broken fixtures for the
/// validator and to reach raw nodes. Quiescent maps only.
template <typename Map>
struct MapTestAccess {
    using Node = typename Map::Node;
    using Level = typename Map::Level;
    using Key = typename Map::key_type;
    using Value = typename Map::mapped_type;

    static const void* root_id(const Map& map) { return map.root_; }

    static Node* mutable_node(Map& map, const Key& key) {
        return const_cast<Node*>(map.find_node(key));
    }

    /// Points a node's next at an arbitrary level, bypassing the protocol.
    static void set_terminator(Map&, Node* node, const void* level_id) {
        Level* level = static_cast<Level*>(const_cast<void*>(level_id));
        node->next.store(Map::ref_level(level), std::memory_order_release);
    }

    /// Plants a pre-linked chain into an empty bucket, bypassing the
    /// protocol (and its expansion trigger and instrumentation).
    static void plant_chain(Map& map, const void* level_id, std::size_t bucket,
                            const std::vector<std::pair<Key, Value>>& pairs) {
        Level* level = static_cast<Level*>(const_cast<void*>(level_id));
        auto& slot = level->slots()[bucket];
        assert(Map::is_level(slot.load(std::memory_order_relaxed)));
        std::uintptr_t next = Map::ref_level(level);
        for (std::size_t i = pairs.size(); i-- > 0;) {
            Node* node = new (map.arena_.allocate(sizeof(Node)))
                Node(pairs[i].first, pairs[i].second, next);
            next = Map::ref_node(node);
        }
        slot.store(next, std::memory_order_release);
    }

    /// Points an empty bucket at an arbitrary level, bypassing the protocol.
    static void set_bucket_level(Map&, const void* level_id, std::size_t bucket,
                                 const void* target_id) {
        Level* level = static_cast<Level*>(const_cast<void*>(level_id));
        Level* target = static_cast<Level*>(const_cast<void*>(target_id));
        level->slots()[bucket].store(Map::ref_level(target), std::memory_order_release);
    }

    /// Forges an instrumentation counter (instrumented maps only).
    static void force_bucket_write_count(Map& map, const void* level_id, std::size_t bucket,
                                         std::uint32_t count) {
        Level* level = static_cast<Level*>(const_cast<void*>(level_id));
        level->write_counts(map.config().bucket_count())[bucket].store(
            count, std::memory_order_relaxed);
    }
};

}  // namespace lfht
