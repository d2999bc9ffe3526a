#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "lfht/config.hpp"
#include "lfht/hash.hpp"
#include "lfht/hash_trie_map.hpp"

namespace lfht {

/// Answer payload carrier: answer identity lives entirely in the key.
struct Unit {
    friend constexpr bool operator==(Unit, Unit) noexcept { return true; }
};

/// Two-level table space: an outer trie maps call keys to per-call answer
/// tries. Both levels are the lock-free map, so any number of workers can
/// check/insert calls and answers concurrently.
template <typename SubgoalKey, typename AnswerKey,
          typename SubgoalHash = DefaultHash<SubgoalKey>,
          typename SubgoalEqual = std::equal_to<SubgoalKey>,
          typename AnswerHash = DefaultHash<AnswerKey>,
          typename AnswerEqual = std::equal_to<AnswerKey>>
class TableSpace {
public:
    class AnswerTable {
    public:
        explicit AnswerTable(Config config, AnswerHash hash = {}, AnswerEqual eq = {})
            : answers_(config, std::move(hash), std::move(eq)) {}

        /// Check/insert. False means the answer was already present — the
        /// caller's derivation is redundant and can be pruned.
        bool add_answer(const AnswerKey& answer) {
            return answers_.insert_or_get(answer, Unit{}).inserted;
        }

        bool contains(const AnswerKey& answer) const { return answers_.contains(answer); }

        std::uint64_t size() const noexcept { return answers_.size(); }

        bool complete() const noexcept { return complete_.load(std::memory_order_acquire); }

        /// Latches once evaluation of the owning call reaches fixpoint.
        void mark_complete() noexcept { complete_.store(true, std::memory_order_release); }

        template <typename F>
        void for_each_answer(F&& f) const {
            answers_.for_each([&](const AnswerKey& k, const Unit&) { f(k); });
        }

        std::vector<AnswerKey> answer_keys() const {
            std::vector<AnswerKey> out;
            for_each_answer([&](const AnswerKey& k) { out.push_back(k); });
            return out;
        }

        const auto& answer_map() const noexcept { return answers_; }

    private:
        HashTrieMap<AnswerKey, Unit, AnswerHash, AnswerEqual> answers_;
        std::atomic<bool> complete_{false};
    };

    using AnswerTablePtr = std::shared_ptr<AnswerTable>;

    explicit TableSpace(Config config = {}) : config_(config), subgoals_(config) {}

    /// Check/insert on the call level. Every thread asking for the same
    /// key receives the identical table; exactly one caller sees
    /// created == true. The loser's eagerly built table is dropped.
    std::pair<AnswerTablePtr, bool> get_or_create(const SubgoalKey& subgoal) {
        auto fresh = std::make_shared<AnswerTable>(config_);
        auto out = subgoals_.insert_or_get(subgoal, std::move(fresh));
        return {out.leaf->value, out.inserted};
    }

    AnswerTablePtr find(const SubgoalKey& subgoal) const {
        const AnswerTablePtr* hit = subgoals_.lookup(subgoal);
        return hit ? *hit : nullptr;
    }

    std::uint64_t subgoal_count() const noexcept { return subgoals_.size(); }

    template <typename F>
    void for_each_subgoal(F&& f) const {
        subgoals_.for_each([&](const SubgoalKey& k, const AnswerTablePtr& t) { f(k, *t); });
    }

    const Config& config() const noexcept { return config_; }
    const auto& subgoal_map() const noexcept { return subgoals_; }

private:
    Config config_;
    HashTrieMap<SubgoalKey, AnswerTablePtr, SubgoalHash, SubgoalEqual> subgoals_;
};

}  // namespace lfht
