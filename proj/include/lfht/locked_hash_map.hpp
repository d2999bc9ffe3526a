#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <utility>
#include <vector>

#include "lfht/config.hpp"
#include "lfht/hash.hpp"

namespace lfht {

/// Lock-based comparison map: chained buckets, one lock per bucket, and a
/// global resize lock taken exclusively while the table doubles. Mirrors
/// the earlier lock-based table design the hash trie is measured against.
/// Same key/value/hash/equality plugs and check/insert contract as
/// HashTrieMap; operations may block.
///
/// Lock order is always table lock before bucket lock.
template <typename Key, typename Value,
          typename Hash = DefaultHash<Key>,
          typename KeyEqual = std::equal_to<Key>>
class LockedHashMap {
public:
    using key_type = Key;
    using mapped_type = Value;
    static constexpr bool stats_enabled = false;

    struct Node {
        const Key key;
        const Value value;
        Node* next;

        Node(const Key& k, Value v, Node* n) : key(k), value(std::move(v)), next(n) {}
    };

    struct Outcome {
        const Node* leaf;
        bool inserted;
    };

    explicit LockedHashMap(std::size_t initial_buckets = 8, Hash hash = {}, KeyEqual eq = {})
        : hash_(std::move(hash)), eq_(std::move(eq)) {
        if (initial_buckets == 0 || (initial_buckets & (initial_buckets - 1)) != 0)
            throw ConfigError("initial bucket count must be a power of two");
        heads_.assign(initial_buckets, nullptr);
        locks_ = std::make_unique<std::mutex[]>(initial_buckets);
    }

    ~LockedHashMap() {
        for (Node* n : heads_) {
            while (n) {
                Node* next = n->next;
                delete n;
                n = next;
            }
        }
    }

    LockedHashMap(const LockedHashMap&) = delete;
    LockedHashMap& operator=(const LockedHashMap&) = delete;

    Outcome insert_or_get(const Key& key, Value value) {
        bool grow = false;
        Outcome out{};
        {
            std::shared_lock table(table_lock_);
            const std::size_t index = bucket_index(key);
            std::lock_guard bucket(locks_[index]);
            if (const Node* hit = find_in_chain(heads_[index], key)) {
                return {hit, false};
            }
            Node* fresh = new Node(key, std::move(value), heads_[index]);
            heads_[index] = fresh;
            const std::uint64_t n = count_.fetch_add(1, std::memory_order_relaxed) + 1;
            grow = n > heads_.size();
            out = {fresh, true};
        }
        if (grow) resize();
        return out;
    }

    const Value* lookup(const Key& key) const {
        std::shared_lock table(table_lock_);
        const std::size_t index = bucket_index(key);
        std::lock_guard bucket(locks_[index]);
        const Node* hit = find_in_chain(heads_[index], key);
        return hit ? &hit->value : nullptr;
    }

    bool contains(const Key& key) const { return lookup(key) != nullptr; }

    std::uint64_t size() const noexcept { return count_.load(std::memory_order_relaxed); }

    std::size_t bucket_count() const {
        std::shared_lock table(table_lock_);
        return heads_.size();
    }

    template <typename F>
    void for_each(F&& f) const {
        std::shared_lock table(table_lock_);
        for (std::size_t i = 0; i < heads_.size(); ++i) {
            std::lock_guard bucket(locks_[i]);
            for (const Node* n = heads_[i]; n; n = n->next) f(n->key, n->value);
        }
    }

    std::vector<std::pair<Key, Value>> snapshot() const {
        std::vector<std::pair<Key, Value>> out;
        for_each([&](const Key& k, const Value& v) { out.emplace_back(k, v); });
        return out;
    }

private:
    const Node* find_in_chain(const Node* n, const Key& key) const {
        for (; n; n = n->next)
            if (eq_(n->key, key)) return n;
        return nullptr;
    }

    std::size_t bucket_index(const Key& key) const {
        return static_cast<std::size_t>(hash_(key)) & (heads_.size() - 1);
    }

    void resize() {
        std::unique_lock table(table_lock_);
        if (count_.load(std::memory_order_relaxed) <= heads_.size()) return;  // raced
        const std::size_t grown = heads_.size() * 2;
        std::vector<Node*> fresh(grown, nullptr);
        for (Node* n : heads_) {
            while (n) {
                Node* next = n->next;
                const std::size_t index = static_cast<std::size_t>(hash_(n->key)) & (grown - 1);
                n->next = fresh[index];
                fresh[index] = n;
                n = next;
            }
        }
        heads_.swap(fresh);
        locks_ = std::make_unique<std::mutex[]>(grown);
    }

    mutable std::shared_mutex table_lock_;
    std::vector<Node*> heads_;
    mutable std::unique_ptr<std::mutex[]> locks_;
    std::atomic<std::uint64_t> count_{0};
    Hash hash_;
    KeyEqual eq_;
};

}  // namespace lfht
