#pragma once

#include <cstdint>
#include <functional>

namespace lfht {

// 64-bit finalizer from splitmix64 (Steele et al.). Full-avalanche: every
// input bit flips every output bit with probability ~1/2, so consecutive
// w-bit chunks are independently usable as bucket indices.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

/// Default key hasher: std::hash to get a word, then mix64 to spread it.
/// std::hash for integers is the identity on most ABIs, which is useless
/// for chunked indexing on its own.
template <typename Key>
struct DefaultHash {
    std::uint64_t operator()(const Key& key) const {
        return mix64(static_cast<std::uint64_t>(std::hash<Key>{}(key)));
    }
};

/// Test hasher: h(k) = k. Lets a test choose every chunk of the hash path
/// and build collision chains deterministically.
struct IdentityHash {
    std::uint64_t operator()(std::uint64_t key) const noexcept { return key; }
};

/// Runtime-switchable hasher used by surfaces that pick the hash by name
/// (CLI, python bindings).
struct PluggableHash {
    bool identity = false;
    std::uint64_t operator()(std::uint64_t key) const noexcept {
        return identity ? key : mix64(key);
    }
};

}  // namespace lfht
