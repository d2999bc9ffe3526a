#include "graph.hpp"

#include <fstream>
#include <sstream>

namespace lfht {

std::vector<std::vector<std::uint64_t>> Graph::adjacency() const {
    std::vector<std::vector<std::uint64_t>> adj(node_count);
    for (const auto& [u, v] : edges) adj[u].push_back(v);
    return adj;
}

Graph read_graph(std::istream& in) {
    Graph graph;
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        if (!have_header) {
            std::string tag;
            ls >> tag >> graph.node_count;
            if (tag != "nodes" || ls.fail())
                throw GraphFormatError("line " + std::to_string(line_no) +
                                       ": expected \"nodes N\"");
            have_header = true;
            continue;
        }
        std::uint64_t u, v;
        ls >> u >> v;
        if (ls.fail())
            throw GraphFormatError("line " + std::to_string(line_no) + ": expected \"u v\"");
        if (u >= graph.node_count || v >= graph.node_count)
            throw GraphFormatError("line " + std::to_string(line_no) + ": node id out of range");
        graph.edges.emplace_back(u, v);
    }
    if (!have_header) throw GraphFormatError("missing \"nodes N\" header");
    return graph;
}

Graph read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open graph file: " + path);
    return read_graph(in);
}

void write_graph(std::ostream& out, const Graph& graph) {
    out << "nodes " << graph.node_count << "\n";
    for (const auto& [u, v] : graph.edges) out << u << " " << v << "\n";
}

Graph make_grid(std::size_t side) {
    Graph graph;
    graph.node_count = side * side;
    const auto id = [side](std::size_t r, std::size_t c) {
        return static_cast<std::uint64_t>(r * side + c);
    };
    for (std::size_t r = 0; r < side; ++r) {
        for (std::size_t c = 0; c < side; ++c) {
            if (c + 1 < side) {
                graph.edges.emplace_back(id(r, c), id(r, c + 1));
                graph.edges.emplace_back(id(r, c + 1), id(r, c));
            }
            if (r + 1 < side) {
                graph.edges.emplace_back(id(r, c), id(r + 1, c));
                graph.edges.emplace_back(id(r + 1, c), id(r, c));
            }
        }
    }
    return graph;
}

}  // namespace lfht
