#pragma once

#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lfht/config.hpp"
#include "lfht/hash_trie_map.hpp"

namespace lfht {

/// One code per structural claim the trie makes about itself.
enum class ViolationCode {
    chain_open,        // chain terminator is not the owning level
    wrong_bucket,      // node's hash chunk does not select its bucket
    chain_too_long,    // chain above threshold below max depth
    duplicate_key,     // key reachable at two positions
    unreachable_key,   // expected mapping absent or wrong (oracle compare)
    bucket_overwrite,  // instrumented bucket slot written more than twice
    depth_regression,  // bucket refers to a level that is not its child
};

inline const char* violation_name(ViolationCode code) {
    switch (code) {
        case ViolationCode::chain_open: return "CHAIN_OPEN";
        case ViolationCode::wrong_bucket: return "WRONG_BUCKET";
        case ViolationCode::chain_too_long: return "CHAIN_TOO_LONG";
        case ViolationCode::duplicate_key: return "DUPLICATE_KEY";
        case ViolationCode::unreachable_key: return "UNREACHABLE_KEY";
        case ViolationCode::bucket_overwrite: return "BUCKET_OVERWRITE";
        case ViolationCode::depth_regression: return "DEPTH_REGRESSION";
    }
    return "?";
}

struct Violation {
    ViolationCode code;
    std::string location;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }

    std::size_t count(ViolationCode code) const {
        std::size_t n = 0;
        for (const auto& v : violations)
            if (v.code == code) ++n;
        return n;
    }

    void add(ViolationCode code, std::string location, std::string detail) {
        violations.push_back({code, std::move(location), std::move(detail)});
    }

    void merge(const ValidationReport& other, const std::string& prefix) {
        for (const auto& v : other.violations)
            violations.push_back({v.code, prefix + v.location, v.detail});
    }

    void print(std::ostream& os) const {
        if (ok()) {
            os << "validation: clean\n";
            return;
        }
        os << "validation: " << violations.size() << " violation(s)\n";
        for (const auto& v : violations)
            os << "  " << violation_name(v.code) << " at " << v.location << ": " << v.detail
               << "\n";
    }
};

namespace detail {

inline std::string slot_location(const void* level, unsigned depth, std::size_t bucket) {
    std::ostringstream os;
    os << "level(" << level << ",d" << depth << ").bucket[" << bucket << "]";
    return os.str();
}

template <typename T>
std::string printable(const T& v) {
    if constexpr (std::is_integral_v<T>) {
        return std::to_string(static_cast<std::uint64_t>(v));
    } else {
        return "<key>";
    }
}

}  // namespace detail

/// Walks the whole trie and checks every quiescent structural invariant:
/// chains closed onto their own level, nodes in the bucket their hash
/// chunk selects, chain lengths within threshold (below max depth), keys
/// unique, bucket children exactly one level deeper, and — when the map
/// is instrumented — at most two successful writes per bucket slot. With
/// an oracle, additionally checks the key→value mapping both through the
/// walk and through lookup(). The map must be externally quiescent.
///
/// Violations are data, not errors: the report is always returned.
template <typename Map>
ValidationReport validate(const Map& map,
                          const std::unordered_map<typename Map::key_type,
                                                   typename Map::mapped_type>* oracle = nullptr) {
    using Key = typename Map::key_type;
    using Value = typename Map::mapped_type;

    ValidationReport report;
    using HashT = std::remove_cvref_t<decltype(map.hash_function())>;
    using EqT = std::remove_cvref_t<decltype(map.key_equal())>;
    const HashT& hash = map.hash_function();
    const EqT& eq = map.key_equal();
    const unsigned w = map.config().bits_per_level;
    const unsigned threshold = map.config().threshold;
    const unsigned max_depth = map.config().max_depth();

    struct KeyEntry {
        std::string location;
        const Value* value;
    };
    struct HashAdapter {
        const HashT* h;
        std::size_t operator()(const Key& k) const { return static_cast<std::size_t>((*h)(k)); }
    };
    struct EqAdapter {
        const EqT* e;
        bool operator()(const Key& a, const Key& b) const { return (*e)(a, b); }
    };
    std::unordered_map<Key, KeyEntry, HashAdapter, EqAdapter> seen(
        16, HashAdapter{&hash}, EqAdapter{&eq});

    struct Collector {
        ValidationReport& report;
        std::unordered_map<Key, KeyEntry, HashAdapter, EqAdapter>& keys;
        const HashT& hash;
        unsigned w;
        unsigned threshold;
        unsigned max_depth;

        void on_level(const typename Map::LevelInfo&) {}

        void on_bucket(const typename Map::BucketInfo& b) {
            if (b.kind == Map::SlotKind::child_level && b.child_depth != b.depth + 1) {
                report.add(ViolationCode::depth_regression,
                           detail::slot_location(b.level, b.depth, b.index),
                           "bucket refers to level at depth " + std::to_string(b.child_depth));
            }
        }

        void on_node(const typename Map::NodeInfo& n) {
            const std::size_t expected = chunk_index(hash(*n.key), n.depth, w);
            const std::string loc = detail::slot_location(n.level, n.depth, n.bucket) +
                                    ".node#" + std::to_string(n.position);
            if (expected != n.bucket) {
                report.add(ViolationCode::wrong_bucket, loc,
                           "key " + detail::printable(*n.key) + " selects bucket " +
                               std::to_string(expected));
            }
            auto [it, fresh] = keys.try_emplace(*n.key, KeyEntry{loc, n.value});
            if (!fresh) {
                report.add(ViolationCode::duplicate_key, loc,
                           "key " + detail::printable(*n.key) + " already reachable at " +
                               it->second.location);
            }
        }

        void on_chain_end(const typename Map::ChainEndInfo& c) {
            if (c.terminator != c.level) {
                report.add(ViolationCode::chain_open,
                           detail::slot_location(c.level, c.depth, c.bucket),
                           "chain closes onto level at depth " +
                               std::to_string(c.terminator_depth) + " instead of its own");
            }
            if (c.length > threshold && c.depth < max_depth) {
                report.add(ViolationCode::chain_too_long,
                           detail::slot_location(c.level, c.depth, c.bucket),
                           "chain holds " + std::to_string(c.length) + " nodes, threshold " +
                               std::to_string(threshold));
            }
        }
    };

    Collector collector{report, seen, hash, w, threshold, max_depth};
    map.visit(collector);

    if (oracle) {
        for (const auto& [key, value] : *oracle) {
            const std::string keystr = detail::printable(key);
            auto it = seen.find(key);
            if (it == seen.end()) {
                report.add(ViolationCode::unreachable_key, "walk",
                           "expected key " + keystr + " not reachable");
            } else if (!(*it->second.value == value)) {
                report.add(ViolationCode::unreachable_key, it->second.location,
                           "key " + keystr + " carries an unexpected value");
            }
            const Value* via_lookup = map.lookup(key);
            if (!via_lookup) {
                report.add(ViolationCode::unreachable_key, "lookup",
                           "expected key " + keystr + " not found by lookup");
            } else if (!(*via_lookup == value)) {
                report.add(ViolationCode::unreachable_key, "lookup",
                           "lookup of key " + keystr + " returned an unexpected value");
            }
        }
        if (seen.size() != oracle->size()) {
            for (const auto& [key, entry] : seen) {
                if (!oracle->count(key)) {
                    report.add(ViolationCode::unreachable_key, entry.location,
                               "key " + detail::printable(key) +
                                   " present in map but not in the expected set");
                }
            }
        }
    }

    if constexpr (Map::stats_enabled) {
        const StatsSnapshot stats = map.debug_stats();
        for (const auto& bw : stats.bucket_writes) {
            if (bw.writes > 2) {
                report.add(ViolationCode::bucket_overwrite,
                           detail::slot_location(bw.level, bw.depth, bw.index),
                           std::to_string(bw.writes) + " successful writes (bound is 2)");
            }
        }
    }

    return report;
}

}  // namespace lfht
