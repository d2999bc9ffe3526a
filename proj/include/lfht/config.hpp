#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lfht {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Shape parameters shared by every hash level of one map.
///
/// Each level is a fixed array of 2^bits_per_level slots; a chain that
/// reaches `threshold` nodes is expanded into a fresh deeper level.
struct Config {
    static constexpr unsigned hash_bits = 64;

    unsigned bits_per_level = 3;  // w
    unsigned threshold = 3;       // MAX_NODES

    constexpr std::size_t bucket_count() const noexcept {
        return std::size_t{1} << bits_per_level;
    }

    /// Deepest level that can exist. Levels at max_depth keep chaining
    /// without further expansion: no hash chunks are left to consume.
    constexpr unsigned max_depth() const noexcept {
        return hash_bits / bits_per_level;
    }

    void validate() const {
        if (bits_per_level == 0)
            throw ConfigError("bits_per_level must be >= 1");
        if (bits_per_level > hash_bits)
            throw ConfigError("bits_per_level must be <= " + std::to_string(hash_bits));
        if (threshold == 0)
            throw ConfigError("threshold must be >= 1");
    }
};

/// Bits [w*depth, w*(depth+1)) of h: the bucket index at `depth`.
constexpr std::size_t chunk_index(std::uint64_t h, unsigned depth, unsigned w) noexcept {
    const unsigned shift = depth * w;
    if (shift >= 64)
        return 0;
    const std::uint64_t mask = (w >= 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << w) - 1);
    return static_cast<std::size_t>((h >> shift) & mask);
}

}  // namespace lfht
