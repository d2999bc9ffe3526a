#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lfht/table_space.hpp"

#include "graph.hpp"

namespace lfht {

using PathTableSpace = TableSpace<std::uint64_t, std::uint64_t>;

/// Multithreaded transitive-closure demo over the table space.
///
/// Each source query s derives the pairs (s, t) with a path of length >= 1
/// from s to t — so (s, s) appears exactly when s lies on a cycle. Worker
/// threads pull sources from a shared pool behind a mutex (the naive
/// scheduler); per-source answers are derived to fixpoint into that
/// source's answer table, whose check/insert prunes duplicate derivations.
/// The resulting pair set is sorted and independent of the thread count.
std::vector<std::pair<std::uint64_t, std::uint64_t>> tabled_path(
    const Graph& graph, const std::vector<std::uint64_t>& sources, unsigned threads,
    PathTableSpace& tables);

/// Convenience: fresh table space, all nodes as sources.
std::vector<std::pair<std::uint64_t, std::uint64_t>> tabled_path_all(const Graph& graph,
                                                                     unsigned threads,
                                                                     Config config = {});

}  // namespace lfht
