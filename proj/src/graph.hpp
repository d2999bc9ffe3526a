#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lfht {

class GraphFormatError : public std::runtime_error {
public:
    explicit GraphFormatError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Directed graph over node ids [0, node_count).
struct Graph {
    std::size_t node_count = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;

    std::vector<std::vector<std::uint64_t>> adjacency() const;
};

/// Text format: first line "nodes N", then one "u v" directed edge per line.
/// Blank lines and lines starting with '#' are skipped.
Graph read_graph(std::istream& in);

/// Throws IoError when the file cannot be opened.
Graph read_graph_file(const std::string& path);

void write_graph(std::ostream& out, const Graph& graph);

/// side x side grid, 4-neighbour edges in both directions.
Graph make_grid(std::size_t side);

}  // namespace lfht
