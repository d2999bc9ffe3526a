#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lfht/config.hpp"

namespace lfht {

enum class BenchImpl { lfht, lockbased };
enum class BenchMode { same_work, partitioned, path_demo };
enum class KeyDist { uniform, collider };

const char* to_string(BenchImpl impl);
const char* to_string(BenchMode mode);
const char* to_string(KeyDist dist);
BenchImpl parse_impl(const std::string& name);   // ConfigError on unknown
BenchMode parse_mode(const std::string& name);   // ConfigError on unknown
KeyDist parse_dist(const std::string& name);     // ConfigError on unknown

/// One benchmark request. same-work runs the identical key stream on
/// every thread (the worst-case contention methodology); partitioned
/// splits the stream; path-demo times the tabled transitive-closure demo
/// on a graph file. Repeats are preceded by one untimed warm-up.
struct BenchSpec {
    BenchImpl impl = BenchImpl::lfht;
    BenchMode mode = BenchMode::same_work;
    std::size_t keys = 100000;
    KeyDist dist = KeyDist::uniform;
    unsigned collider_fan = 4;
    std::uint64_t seed = 1;
    std::vector<unsigned> threads = {1, 2, 4, 8};
    unsigned repeats = 5;
    Config config{};
    std::string graph_path;
    std::size_t grid_side = 0;  // path-demo: generate a grid instead of reading a file

    void validate() const;  // ConfigError on nonsense
};

struct BenchCell {
    unsigned threads = 1;
    std::vector<double> seconds;  // one entry per timed repeat
    double mean = 0.0;
    std::optional<double> overhead;  // mean(T) / mean(1), same-work only
    std::optional<double> speedup;   // mean(1) / mean(T), partitioned / path-demo
};

struct BenchRun {
    BenchSpec spec;
    std::vector<BenchCell> cells;  // in the order of spec.threads
};

/// Raised when the post-run correctness gate fails; no timing row for a
/// run that cannot prove its quiescent state.
class ValidationFailure : public std::runtime_error {
public:
    explicit ValidationFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Runs every (threads) cell of the spec: warm-up, timed repeats, and a
/// structural/oracle check after each timed run. Timing covers only the
/// concurrent work, not map construction or validation.
BenchRun run_benchmark(const BenchSpec& spec);

/// Header: impl,mode,threads,keys,w,threshold,repeat,seconds,overhead,speedup
/// One row per repeat plus one `mean` row per cell, cells in spec order.
void write_csv(std::ostream& os, const BenchRun& run);
void write_csv_file(const std::string& path, const BenchRun& run);  // IoError

}  // namespace lfht
