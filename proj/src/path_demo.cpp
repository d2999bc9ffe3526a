#include "path_demo.hpp"

#include <algorithm>
#include <mutex>
#include <thread>

namespace lfht {

namespace {

void derive_from(std::uint64_t source, const std::vector<std::vector<std::uint64_t>>& adj,
                 PathTableSpace& tables) {
    auto [table, created] = tables.get_or_create(source);
    if (!created) return;  // someone else owns this query
    std::vector<std::uint64_t> worklist;
    for (std::uint64_t m : adj[source])
        if (table->add_answer(m)) worklist.push_back(m);
    while (!worklist.empty()) {
        const std::uint64_t u = worklist.back();
        worklist.pop_back();
        for (std::uint64_t t : adj[u])
            if (table->add_answer(t)) worklist.push_back(t);
    }
    table->mark_complete();
}

}  // namespace

std::vector<std::pair<std::uint64_t, std::uint64_t>> tabled_path(
    const Graph& graph, const std::vector<std::uint64_t>& sources, unsigned threads,
    PathTableSpace& tables) {
    const auto adj = graph.adjacency();

    std::mutex pool_lock;  // the naive scheduler's only synchronization
    std::size_t next = 0;
    auto worker = [&] {
        for (;;) {
            std::uint64_t source;
            {
                std::lock_guard lock(pool_lock);
                if (next == sources.size()) return;
                source = sources[next++];
            }
            derive_from(source, adj, tables);
        }
    };

    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
    for (std::uint64_t s : sources) {
        if (auto table = tables.find(s)) {
            table->for_each_answer([&](std::uint64_t t) { pairs.emplace_back(s, t); });
        }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    return pairs;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> tabled_path_all(const Graph& graph,
                                                                     unsigned threads,
                                                                     Config config) {
    PathTableSpace tables(config);
    std::vector<std::uint64_t> sources(graph.node_count);
    for (std::size_t i = 0; i < sources.size(); ++i) sources[i] = i;
    return tabled_path(graph, sources, threads, tables);
}

}  // namespace lfht
