#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lfht/config.hpp"
#include "lfht/hash.hpp"

using namespace lfht;

TEST_CASE("chunk_index slices w-bit chunks from the low end") {
    CHECK(chunk_index(0b101110, 0, 3) == 6);
    CHECK(chunk_index(0b101110, 1, 3) == 5);
    CHECK(chunk_index(0, 0, 3) == 0);
    CHECK(chunk_index(0, 17, 3) == 0);
    // Past the hash width every chunk is zero.
    CHECK(chunk_index(~std::uint64_t{0}, 22, 3) == 0);
    CHECK(chunk_index(~std::uint64_t{0}, 21, 3) == 1);  // one real bit left
}

TEST_CASE("identity hash plug is the identity") {
    CHECK(IdentityHash{}(5) == 5);
    CHECK(PluggableHash{true}(5) == 5);
    CHECK(PluggableHash{false}(5) == mix64(5));
}

TEST_CASE("mix64 is deterministic") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t k = rng();
        CHECK(mix64(k) == mix64(k));
    }
    CHECK(mix64(1) != mix64(2));
}

// Frozen from a pre-build probe of the mixer: 1e5 seeded random keys,
// depth-0 histogram over 8 bins stays within 3 sigma of uniform and the
// chi-square statistic is far below the df=7, p=0.999 cut (24.32; the
// probe measured 1.19 at depth 0).
TEST_CASE("mix64 chunk histogram is uniform within 3 sigma") {
    constexpr std::size_t n = 100000;
    constexpr unsigned w = 3, bins = 8;
    for (unsigned depth : {0u, 1u, 7u}) {
        std::vector<std::size_t> hist(bins, 0);
        std::mt19937_64 rng(12345);
        for (std::size_t i = 0; i < n; ++i) ++hist[chunk_index(mix64(rng()), depth, w)];
        const double mean = double(n) / bins;
        const double sigma = std::sqrt(n * (1.0 / bins) * (1.0 - 1.0 / bins));
        double chi2 = 0;
        for (std::size_t count : hist) {
            const double dev = double(count) - mean;
            CHECK(std::abs(dev) <= 3.0 * sigma);
            chi2 += dev * dev / mean;
        }
        CHECK(chi2 < 24.32);
    }
}

TEST_CASE("config rejects out-of-range shapes") {
    CHECK_THROWS_AS((Config{0, 3}.validate()), ConfigError);
    CHECK_THROWS_AS((Config{3, 0}.validate()), ConfigError);
    CHECK_THROWS_AS((Config{65, 3}.validate()), ConfigError);
    CHECK_NOTHROW((Config{3, 3}.validate()));
    CHECK(Config{3, 3}.max_depth() == 21);
    CHECK(Config{1, 1}.bucket_count() == 2);
}
