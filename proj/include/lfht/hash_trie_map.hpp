#pragma once

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cstdint>
#include <functional>
#include <mutex>
#include <new>
#include <queue>
#include <stdexcept>
#include <type_traits>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lfht/config.hpp"
#include "lfht/hash.hpp"

namespace lfht {

/// Protocol points a hooks policy may observe. Used by the interleaving
/// test driver to park a thread mid-remap; release builds use NoHooks and
/// the calls vanish.
enum class ProtocolPoint {
    pre_expand_cas,    // fresh level allocated, expansion CAS not yet tried
    post_expand_cas,   // expansion CAS won; this thread is the sole remapper
    post_node_remap,   // a chain node finished its move into the new level
    post_chain_break,  // predecessor's next now refers to the new level
    pre_bucket_gray,   // about to write the final bucket -> new level ref
};

struct HookEvent {
    ProtocolPoint point;
    const void* level;     // the level being expanded into
    unsigned level_depth;
    const void* node;      // the node concerned, when meaningful
};

struct NoHooks {
    static constexpr bool enabled = false;
    void on_point(const HookEvent&) const noexcept {}
};

struct NoStats {
    static constexpr bool enabled = false;
};

/// Counters behind debug_stats(). Per-bucket write counts live next to each
/// level's slot array and exist only for instrumented map types.
struct CountingStats {
    static constexpr bool enabled = true;
    std::atomic<std::uint64_t> expansions{0};
    std::atomic<std::uint64_t> cas_failures{0};
    std::atomic<std::uint64_t> restarts{0};
};

class StatsDisabledError : public std::logic_error {
public:
    StatsDisabledError() : std::logic_error("map was built without instrumentation") {}
};

struct BucketWriteCount {
    const void* level;
    unsigned depth;
    std::size_t index;
    std::uint32_t writes;
};

struct StatsSnapshot {
    std::uint64_t expansions = 0;
    std::uint64_t cas_failures = 0;
    std::uint64_t restarts = 0;
    std::uint32_t max_bucket_writes = 0;
    std::vector<BucketWriteCount> bucket_writes;  // non-zero entries only
};

template <typename Map>
struct MapTestAccess;

namespace detail {

/// Slab allocator backing one map's nodes and levels. Nothing is freed
/// until the map is destroyed — the no-delete design recovers space
/// wholesale. Discarded objects (insert-race and expansion-race losers)
/// are destroyed in place and their bytes sit idle until teardown.
///
/// Threads carve private chunks out of the shared slabs and bump inside
/// them without synchronization, which also keeps one thread's nodes off
/// other threads' cache lines. The thread cache is keyed by a never-reused
/// arena id, so a stale entry from a destroyed map can never match.
class Arena {
public:
    Arena() : id_(next_id()) {}
    Arena(const Arena&) = delete;
    Arena& operator=(const Arena&) = delete;

    ~Arena() {
        Slab* slab = slabs_;
        while (slab) {
            Slab* next = slab->next;
            ::operator delete(slab);
            slab = next;
        }
    }

    void* allocate(std::size_t bytes) {
        bytes = (bytes + 7u) & ~std::size_t{7};
        for (ThreadChunk& chunk : cache().entries) {
            if (chunk.arena_id == id_ &&
                static_cast<std::size_t>(chunk.end - chunk.cur) >= bytes) {
                char* p = chunk.cur;
                chunk.cur += bytes;
                return p;
            }
        }
        return allocate_slow(bytes);
    }

private:
    static constexpr std::size_t kChunk = 8192;

    struct Slab {
        Slab* next;
        std::size_t capacity;
        std::atomic<std::size_t> used{0};
        char* data() noexcept { return reinterpret_cast<char*>(this + 1); }
    };

    struct ThreadChunk {
        std::uint64_t arena_id = 0;
        char* cur = nullptr;
        char* end = nullptr;
    };
    // Two entries cover the common nesting (an outer map plus the inner
    // map currently being filled) without chunk churn.
    struct ThreadCache {
        ThreadChunk entries[2];
        unsigned victim = 0;
    };
    static ThreadCache& cache() {
        static thread_local ThreadCache tc;
        return tc;
    }

    static std::uint64_t next_id() {
        static std::atomic<std::uint64_t> counter{1};
        return counter.fetch_add(1, std::memory_order_relaxed);
    }

    void* allocate_slow(std::size_t bytes) {
        if (bytes >= kChunk / 2) return shared_allocate(bytes);  // oversized: no chunking
        char* chunk = static_cast<char*>(shared_allocate(kChunk));
        ThreadCache& tc = cache();
        ThreadChunk& slot = tc.entries[tc.victim];
        tc.victim ^= 1u;
        slot = ThreadChunk{id_, chunk + bytes, chunk + kChunk};
        return chunk;
    }

    void* shared_allocate(std::size_t bytes) {
        for (;;) {
            Slab* slab = current_.load(std::memory_order_acquire);
            if (slab) {
                const std::size_t offset =
                    slab->used.fetch_add(bytes, std::memory_order_relaxed);
                if (offset + bytes <= slab->capacity) return slab->data() + offset;
            }
            grow(slab, bytes);
        }
    }

    void grow(Slab* seen, std::size_t bytes) {
        std::lock_guard lock(grow_mutex_);
        if (current_.load(std::memory_order_relaxed) != seen) return;  // someone else grew
        const std::size_t capacity = std::max(next_capacity_, bytes);
        next_capacity_ = std::min<std::size_t>(next_capacity_ * 2, std::size_t{1} << 22);
        void* mem = ::operator new(sizeof(Slab) + capacity);
        Slab* slab = new (mem) Slab{slabs_, capacity};
        slabs_ = slab;
        current_.store(slab, std::memory_order_release);
    }

    const std::uint64_t id_;
    std::atomic<Slab*> current_{nullptr};
    std::mutex grow_mutex_;
    Slab* slabs_ = nullptr;         // all slabs, newest first (guarded by grow_mutex_)
    std::size_t next_capacity_ = 16384;
};

}  // namespace detail

/// Concurrent insert-only hash trie map.
///
/// A hierarchy of fixed 2^w-slot hash levels; collisions chain behind a
/// bucket until `threshold` nodes accumulate, then the bucket grows a
/// deeper level and the chain is remapped into it tail-first. Every chain
/// is closed by a reference back to the hash level that owns it, which is
/// how traversals detect both end-of-chain and a remap in progress. All
/// concurrent mutation is single-word CAS; lookups never wait.
///
/// Thread-safe for any mix of lookup / insert_or_get / for_each.
/// Destruction requires external quiescence. Keys are never removed.
template <typename Key, typename Value,
          typename Hash = DefaultHash<Key>,
          typename KeyEqual = std::equal_to<Key>,
          typename Stats = NoStats,
          typename Hooks = NoHooks>
class HashTrieMap {
public:
    using key_type = Key;
    using mapped_type = Value;
    static constexpr bool stats_enabled = Stats::enabled;

    struct Node;

    /// Result of a check/insert. `leaf` is the unique node for the key:
    /// every caller, on every thread, gets the same one.
    struct Outcome {
        const Node* leaf;
        bool inserted;
    };

    struct Node {
        const Key key;
        const Value value;
        std::atomic<std::uintptr_t> next;

        Node(const Key& k, Value v, std::uintptr_t terminator)
            : key(k), value(std::move(v)), next(terminator) {}
    };

    explicit HashTrieMap(Config config = {}, Hash hash = {}, KeyEqual eq = {},
                         Hooks hooks = {})
        : cfg_(config),
          hash_(std::move(hash)),
          eq_(std::move(eq)),
          hooks_(std::move(hooks)) {
        cfg_.validate();
        slot_count_ = cfg_.bucket_count();
        max_depth_ = cfg_.max_depth();
        root_ = make_level(0, nullptr);
    }

    ~HashTrieMap() {
        // Nodes live in the arena; a destructor walk is only needed when
        // keys or values own resources. Levels never do.
        if constexpr (!std::is_trivially_destructible_v<Node>) destroy_level(root_);
    }

    HashTrieMap(const HashTrieMap&) = delete;
    HashTrieMap& operator=(const HashTrieMap&) = delete;

    const Config& config() const noexcept { return cfg_; }
    const Hash& hash_function() const noexcept { return hash_; }
    const KeyEqual& key_equal() const noexcept { return eq_; }

    /// Approximate number of keys inserted so far (exact at quiescence).
    std::uint64_t size() const noexcept { return count_.load(std::memory_order_relaxed); }

    Outcome insert_or_get(const Key& key, Value value) {
        const std::uint64_t h = hash_(key);
        Level* level = root_;
        Node* fresh = nullptr;
        for (;;) {
            const std::size_t index = chunk_index(h, level->depth, cfg_.bits_per_level);
            Slot& slot = level->slots()[index];
            std::uintptr_t cur = slot.load(std::memory_order_acquire);
            if (is_level(cur)) {
                Level* target = as_level(cur);
                if (target != level) {
                    level = target;  // gray bucket: the chain moved one level down
                    continue;
                }
                // Empty bucket. Close the new node onto this level, then publish.
                if (!fresh) {
                    fresh = make_node(key, std::move(value), cur);
                } else {
                    fresh->next.store(cur, std::memory_order_relaxed);
                }
                if (slot.compare_exchange_strong(cur, ref_node(fresh),
                                                 std::memory_order_acq_rel,
                                                 std::memory_order_acquire)) {
                    note_bucket_write(level, index);
                    count_.fetch_add(1, std::memory_order_relaxed);
                    return {fresh, true};
                }
                note_cas_failure();
                continue;
            }

            Node* n = as_node(cur);
            std::size_t chain_len = 0;
            bool level_changed = false;
            while (!level_changed) {
                if (eq_(n->key, key)) {
                    discard_node(fresh);  // lost the race (or key pre-existed)
                    return {n, false};
                }
                ++chain_len;
                std::uintptr_t nx = n->next.load(std::memory_order_acquire);
                if (!is_level(nx)) {
                    n = as_node(nx);
                    continue;
                }
                Level* term = as_level(nx);
                if (term != level) {
                    level = resume_level(term, level);
                    level_changed = true;
                    break;
                }
                if (chain_len >= cfg_.threshold && level->depth < max_depth_) {
                    if (Level* grown = try_expand(slot, index, level, n)) {
                        level = grown;  // we remapped; our key now belongs below
                        level_changed = true;
                        break;
                    }
                    // Expansion aborted: someone appended or expanded first.
                    nx = n->next.load(std::memory_order_acquire);
                    if (!is_level(nx)) {
                        n = as_node(nx);
                        continue;
                    }
                    term = as_level(nx);
                    assert(term != level);
                    level = resume_level(term, level);
                    level_changed = true;
                    break;
                }
                // Append at the tail; the node closes onto this level first.
                if (!fresh) {
                    fresh = make_node(key, std::move(value), nx);
                } else {
                    fresh->next.store(nx, std::memory_order_relaxed);
                }
                std::uintptr_t expected = nx;
                if (n->next.compare_exchange_strong(expected, ref_node(fresh),
                                                    std::memory_order_acq_rel,
                                                    std::memory_order_acquire)) {
                    count_.fetch_add(1, std::memory_order_relaxed);
                    return {fresh, true};
                }
                note_cas_failure();
                if (!is_level(expected)) {
                    n = as_node(expected);
                    continue;
                }
                term = as_level(expected);
                assert(term != level);
                level = resume_level(term, level);
                level_changed = true;
            }
        }
    }

    /// Pointer to the stored value, or nullptr. Never blocks on writers.
    const Value* lookup(const Key& key) const {
        const Node* n = find_node(key);
        return n ? &n->value : nullptr;
    }

    bool contains(const Key& key) const { return find_node(key) != nullptr; }

    const Node* find_node(const Key& key) const {
        const std::uint64_t h = hash_(key);
        const Level* level = root_;
        for (;;) {
            const Slot& slot = level->slots()[chunk_index(h, level->depth, cfg_.bits_per_level)];
            std::uintptr_t cur = slot.load(std::memory_order_acquire);
            if (is_level(cur)) {
                const Level* target = as_level(cur);
                if (target == level) return nullptr;  // empty bucket
                level = target;
                continue;
            }
            const Node* n = as_node(cur);
            for (;;) {
                if (eq_(n->key, key)) return n;
                std::uintptr_t nx = n->next.load(std::memory_order_acquire);
                if (!is_level(nx)) {
                    n = as_node(nx);
                    continue;
                }
                const Level* term = as_level(nx);
                if (term == level) return nullptr;  // closed chain, key absent
                level = resume_level(term, level);
                break;
            }
        }
    }

    /// Visits every key/value pair. Pairs inserted before the call are
    /// always seen; pairs racing with the call may or may not be. While a
    /// remap is in flight a node can be reported twice (it is briefly
    /// reachable from both its old chain and its new bucket); at
    /// quiescence the enumeration is exact and duplicate-free.
    template <typename F>
    void for_each(F&& f) const {
        walk_subtree(root_, f);
    }

    std::vector<std::pair<Key, Value>> snapshot() const {
        std::vector<std::pair<Key, Value>> out;
        for_each([&](const Key& k, const Value& v) { out.emplace_back(k, v); });
        return out;
    }

    // --- structural introspection ------------------------------------
    //
    // visit() reports the raw shape of the trie to a visitor with:
    //   void on_level(const LevelInfo&);
    //   void on_bucket(const BucketInfo&);
    //   void on_node(const NodeInfo&);
    //   void on_chain_end(const ChainEndInfo&);
    // Exact only at quiescence; consumed by the validator and by tests.

    enum class SlotKind { empty, chain, child_level };

    struct LevelInfo {
        const void* id;
        const void* parent;  // nullptr at root
        unsigned depth;
    };
    struct BucketInfo {
        const void* level;
        unsigned depth;
        std::size_t index;
        SlotKind kind;
        const void* child;     // set when kind == child_level
        unsigned child_depth;  // ditto
    };
    struct NodeInfo {
        const void* level;
        unsigned depth;
        std::size_t bucket;
        std::size_t position;  // 0-based within the chain
        const void* id;
        const Key* key;
        const Value* value;
    };
    struct ChainEndInfo {
        const void* level;
        unsigned depth;
        std::size_t bucket;
        std::size_t length;
        const void* terminator;
        unsigned terminator_depth;
    };

    template <typename V>
    void visit(V&& v) const {
        std::queue<const Level*> pending;
        std::unordered_set<const Level*> seen;
        pending.push(root_);
        seen.insert(root_);
        while (!pending.empty()) {
            const Level* level = pending.front();
            pending.pop();
            v.on_level(LevelInfo{level, level->prev, level->depth});
            for (std::size_t i = 0; i < slot_count_; ++i) {
                std::uintptr_t cur = level->slots()[i].load(std::memory_order_acquire);
                if (is_level(cur)) {
                    const Level* target = as_level(cur);
                    if (target == level) {
                        v.on_bucket(BucketInfo{level, level->depth, i, SlotKind::empty,
                                               nullptr, 0});
                    } else {
                        v.on_bucket(BucketInfo{level, level->depth, i, SlotKind::child_level,
                                               target, target->depth});
                        if (seen.insert(target).second) pending.push(target);
                    }
                    continue;
                }
                v.on_bucket(BucketInfo{level, level->depth, i, SlotKind::chain, nullptr, 0});
                const Node* n = as_node(cur);
                std::size_t pos = 0;
                for (;;) {
                    v.on_node(NodeInfo{level, level->depth, i, pos++, n, &n->key, &n->value});
                    std::uintptr_t nx = n->next.load(std::memory_order_acquire);
                    if (!is_level(nx)) {
                        n = as_node(nx);
                        continue;
                    }
                    const Level* term = as_level(nx);
                    v.on_chain_end(ChainEndInfo{level, level->depth, i, pos, term, term->depth});
                    if (term != level) {
                        const Level* below = ancestor_below(term, level);
                        if (seen.insert(below).second) pending.push(below);
                    }
                    break;
                }
            }
        }
    }

    /// Counter snapshot; only meaningful at quiescence. Throws
    /// StatsDisabledError for uninstrumented map types.
    StatsSnapshot debug_stats() const {
        if constexpr (!Stats::enabled) {
            throw StatsDisabledError{};
        } else {
            StatsSnapshot snap;
            snap.expansions = stats_.expansions.load(std::memory_order_relaxed);
            snap.cas_failures = stats_.cas_failures.load(std::memory_order_relaxed);
            snap.restarts = stats_.restarts.load(std::memory_order_relaxed);
            std::queue<const Level*> pending;
            std::unordered_set<const Level*> seen;
            pending.push(root_);
            seen.insert(root_);
            while (!pending.empty()) {
                const Level* level = pending.front();
                pending.pop();
                for (std::size_t i = 0; i < slot_count_; ++i) {
                    std::uint32_t w =
                        level->write_counts(slot_count_)[i].load(std::memory_order_relaxed);
                    if (w > 0) {
                        snap.bucket_writes.push_back({level, level->depth, i, w});
                        if (w > snap.max_bucket_writes) snap.max_bucket_writes = w;
                    }
                    std::uintptr_t cur = level->slots()[i].load(std::memory_order_acquire);
                    if (is_level(cur)) {
                        const Level* target = as_level(cur);
                        if (target != level && seen.insert(target).second) pending.push(target);
                    } else {
                        const Node* n = as_node(cur);
                        for (;;) {
                            std::uintptr_t nx = n->next.load(std::memory_order_acquire);
                            if (!is_level(nx)) {
                                n = as_node(nx);
                                continue;
                            }
                            const Level* term = as_level(nx);
                            if (term != level) {
                                const Level* below = ancestor_below(term, level);
                                if (seen.insert(below).second) pending.push(below);
                            }
                            break;
                        }
                    }
                }
            }
            return snap;
        }
    }

private:
    template <typename>
    friend struct MapTestAccess;

    using Slot = std::atomic<std::uintptr_t>;

    // A hash level: header + 2^w slots in one allocation (+ write counters
    // when instrumented). Levels are never freed while the map lives.
    struct Level {
        Level* const prev;
        const unsigned depth;

        Level(Level* p, unsigned d) : prev(p), depth(d) {}

        Slot* slots() noexcept { return reinterpret_cast<Slot*>(this + 1); }
        const Slot* slots() const noexcept { return reinterpret_cast<const Slot*>(this + 1); }
        std::atomic<std::uint32_t>* write_counts(std::size_t nslots) noexcept {
            return reinterpret_cast<std::atomic<std::uint32_t>*>(slots() + nslots);
        }
        const std::atomic<std::uint32_t>* write_counts(std::size_t nslots) const noexcept {
            return reinterpret_cast<const std::atomic<std::uint32_t>*>(slots() + nslots);
        }
    };

    // Tagged single-word reference: bit 0 set = level, clear = node.
    static constexpr std::uintptr_t kLevelTag = 1;

    static std::uintptr_t ref_level(const Level* l) noexcept {
        return reinterpret_cast<std::uintptr_t>(l) | kLevelTag;
    }
    static std::uintptr_t ref_node(const Node* n) noexcept {
        return reinterpret_cast<std::uintptr_t>(n);
    }
    static bool is_level(std::uintptr_t r) noexcept { return (r & kLevelTag) != 0; }
    static Level* as_level(std::uintptr_t r) noexcept {
        return reinterpret_cast<Level*>(r & ~kLevelTag);
    }
    static Node* as_node(std::uintptr_t r) noexcept { return reinterpret_cast<Node*>(r); }

    Level* make_level(unsigned depth, Level* prev) {
        std::size_t bytes = sizeof(Level) + slot_count_ * sizeof(Slot);
        if constexpr (Stats::enabled) {
            bytes += slot_count_ * sizeof(std::atomic<std::uint32_t>);
        }
        Level* level = new (arena_.allocate(bytes)) Level(prev, depth);
        const std::uintptr_t self = ref_level(level);
        Slot* slots = level->slots();
        for (std::size_t i = 0; i < slot_count_; ++i) {
            new (&slots[i]) Slot(self);
        }
        if constexpr (Stats::enabled) {
            auto* counts = level->write_counts(slot_count_);
            for (std::size_t i = 0; i < slot_count_; ++i) {
                new (&counts[i]) std::atomic<std::uint32_t>(0);
            }
        }
        return level;
    }

    Node* make_node(const Key& key, Value&& value, std::uintptr_t terminator) {
        return new (arena_.allocate(sizeof(Node))) Node(key, std::move(value), terminator);
    }

    // Losers' objects: destroy in place, the arena reclaims at teardown.
    static void discard_node(Node* node) {
        if (node) node->~Node();
    }
    static void discard_level(Level* level) { level->~Level(); }

    // Teardown walk for key/value types with real destructors.
    void destroy_level(Level* level) {
        Slot* slots = level->slots();
        for (std::size_t i = 0; i < slot_count_; ++i) {
            std::uintptr_t cur = slots[i].load(std::memory_order_relaxed);
            if (is_level(cur)) {
                Level* target = as_level(cur);
                if (target != level) destroy_level(target);
                continue;
            }
            Node* n = as_node(cur);
            for (;;) {
                std::uintptr_t nx = n->next.load(std::memory_order_relaxed);
                n->~Node();
                if (is_level(nx)) break;
                n = as_node(nx);
            }
        }
    }

    /// Where to continue after a chain closed onto `term` instead of
    /// `from`: the level `from`'s bucket expanded into, i.e. term's
    /// ancestor one below `from`. Usually term itself; during a cascaded
    /// remap the terminator can sit deeper (a node is rescheduled into a
    /// third level while still linked from its old chain), and resuming
    /// at the terminator would skip the level in between.
    template <typename L>
    static L* ancestor_below(L* term, const Level* from) {
        assert(term->depth > from->depth);
        while (term->depth > from->depth + 1) term = term->prev;
        return term;
    }

    template <typename L>
    L* resume_level(L* term, const Level* from) const {
        note_restart();
        return ancestor_below(term, from);
    }

    /// Expansion: pre-allocate the deeper level and try to swing the tail
    /// terminator onto it. Loser discards the never-published level and
    /// returns nullptr; winner remaps the (now frozen) chain and returns
    /// the new level.
    Level* try_expand(Slot& bucket_slot, std::size_t bucket_index, Level* level, Node* tail) {
        Level* fresh_level = make_level(level->depth + 1, level);
        hook(ProtocolPoint::pre_expand_cas, fresh_level, tail);
        std::uintptr_t expected = ref_level(level);
        if (!tail->next.compare_exchange_strong(expected, ref_level(fresh_level),
                                                std::memory_order_acq_rel,
                                                std::memory_order_acquire)) {
            discard_level(fresh_level);
            note_cas_failure();
            return nullptr;
        }
        hook(ProtocolPoint::post_expand_cas, fresh_level, tail);
        note_expansion();
        // The CAS closed the old chain to appends: new traffic descends
        // through fresh_level, so the chain under the bucket is frozen and
        // exactly the set of nodes to move.
        std::uintptr_t head = bucket_slot.load(std::memory_order_acquire);
        assert(!is_level(head));
        remap_from(as_node(head), fresh_level);
        hook(ProtocolPoint::pre_bucket_gray, fresh_level, nullptr);
        bucket_slot.store(ref_level(fresh_level), std::memory_order_release);
        note_bucket_write(level, bucket_index);
        return fresh_level;
    }

    /// Tail-first remap, by recursing to the tail and working on the
    /// unwind (chain length is bounded by the threshold). Each node is
    /// inserted into the new level before its predecessor's next is
    /// rewritten, so a key is reachable from the old chain or the new
    /// level (or both) at every instant.
    void remap_from(Node* node, Level* new_level) {
        std::uintptr_t nx = node->next.load(std::memory_order_acquire);
        if (!is_level(nx)) {
            remap_from(as_node(nx), new_level);
            // Detach the just-placed successor; this node is now the old
            // chain's tail and closes onto the new level.
            node->next.store(ref_level(new_level), std::memory_order_release);
            hook(ProtocolPoint::post_chain_break, new_level, node);
        }
        place_node(new_level, node);
        hook(ProtocolPoint::post_node_remap, new_level, node);
    }

    /// Re-insert an existing node under `level`. Same walk as
    /// insert_or_get minus the key comparisons: the node *is* the key's
    /// unique leaf, nothing to find. May cascade into further expansions
    /// when a destination chain is already full.
    void place_node(Level* level, Node* node) {
        const std::uint64_t h = hash_(node->key);
        for (;;) {
            const std::size_t index = chunk_index(h, level->depth, cfg_.bits_per_level);
            Slot& slot = level->slots()[index];
            std::uintptr_t cur = slot.load(std::memory_order_acquire);
            if (is_level(cur)) {
                Level* target = as_level(cur);
                if (target != level) {
                    level = target;
                    continue;
                }
                node->next.store(ref_level(level), std::memory_order_release);
                if (slot.compare_exchange_strong(cur, ref_node(node),
                                                 std::memory_order_acq_rel,
                                                 std::memory_order_acquire)) {
                    note_bucket_write(level, index);
                    return;
                }
                note_cas_failure();
                continue;
            }
            Node* n = as_node(cur);
            std::size_t chain_len = 0;
            bool level_changed = false;
            while (!level_changed) {
                ++chain_len;
                std::uintptr_t nx = n->next.load(std::memory_order_acquire);
                if (!is_level(nx)) {
                    n = as_node(nx);
                    continue;
                }
                Level* term = as_level(nx);
                if (term != level) {
                    level = resume_level(term, level);
                    break;
                }
                if (chain_len >= cfg_.threshold && level->depth < max_depth_) {
                    if (Level* grown = try_expand(slot, index, level, n)) {
                        level = grown;
                        break;
                    }
                    nx = n->next.load(std::memory_order_acquire);
                    if (!is_level(nx)) {
                        n = as_node(nx);
                        continue;
                    }
                    term = as_level(nx);
                    assert(term != level);
                    level = resume_level(term, level);
                    break;
                }
                node->next.store(ref_level(level), std::memory_order_release);
                std::uintptr_t expected = nx;
                if (n->next.compare_exchange_strong(expected, ref_node(node),
                                                    std::memory_order_acq_rel,
                                                    std::memory_order_acquire)) {
                    return;
                }
                note_cas_failure();
                if (!is_level(expected)) {
                    n = as_node(expected);
                    continue;
                }
                term = as_level(expected);
                assert(term != level);
                level = resume_level(term, level);
                break;
            }
        }
    }

    template <typename F>
    void walk_subtree(const Level* level, F& f) const {
        for (std::size_t i = 0; i < slot_count_; ++i) {
            std::uintptr_t cur = level->slots()[i].load(std::memory_order_acquire);
            if (is_level(cur)) {
                const Level* target = as_level(cur);
                if (target != level) walk_subtree(target, f);
                continue;
            }
            const Node* n = as_node(cur);
            for (;;) {
                f(n->key, n->value);
                std::uintptr_t nx = n->next.load(std::memory_order_acquire);
                if (!is_level(nx)) {
                    n = as_node(nx);
                    continue;
                }
                const Level* term = as_level(nx);
                // Mid-remap terminator: the moved nodes live below; follow
                // them so nothing inserted before the call is missed.
                if (term != level) walk_subtree(ancestor_below(term, level), f);
                break;
            }
        }
    }

    void hook(ProtocolPoint p, const Level* level, const Node* node) {
        if constexpr (Hooks::enabled) {
            hooks_.on_point(HookEvent{p, level, level ? level->depth : 0, node});
        }
    }

    void note_bucket_write(Level* level, std::size_t index) {
        if constexpr (Stats::enabled) {
            level->write_counts(slot_count_)[index].fetch_add(1, std::memory_order_relaxed);
        }
    }
    void note_expansion() {
        if constexpr (Stats::enabled) {
            stats_.expansions.fetch_add(1, std::memory_order_relaxed);
        }
    }
    void note_cas_failure() {
        if constexpr (Stats::enabled) {
            stats_.cas_failures.fetch_add(1, std::memory_order_relaxed);
        }
    }
    void note_restart() const {
        if constexpr (Stats::enabled) {
            stats_.restarts.fetch_add(1, std::memory_order_relaxed);
        }
    }

    Config cfg_;
    std::size_t slot_count_ = 0;
    unsigned max_depth_ = 0;
    Hash hash_;
    KeyEqual eq_;
    Hooks hooks_;
    mutable Stats stats_;
    detail::Arena arena_;
    Level* root_ = nullptr;
    std::atomic<std::uint64_t> count_{0};
};

}  // namespace lfht
