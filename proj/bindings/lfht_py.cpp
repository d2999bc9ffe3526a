#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "lfht/hash_trie_map.hpp"
#include "lfht/locked_hash_map.hpp"
#include "lfht/validate.hpp"

#include "graph.hpp"
#include "path_demo.hpp"
#include "scenarios.hpp"

namespace py = pybind11;

namespace {

using Key = std::uint64_t;
using Value = std::uint64_t;
// The python-facing map is always instrumented; this surface is for
// inspection and experiments, not peak throughput.
using PyTrieMap =
    lfht::HashTrieMap<Key, Value, lfht::PluggableHash, std::equal_to<Key>, lfht::CountingStats>;
using PyLockedMap = lfht::LockedHashMap<Key, Value, lfht::PluggableHash, std::equal_to<Key>>;
using PyTableSpace = lfht::PathTableSpace;
using PyAnswerTable = PyTableSpace::AnswerTable;

std::vector<std::string> format_report(const lfht::ValidationReport& report) {
    std::vector<std::string> lines;
    lines.reserve(report.violations.size());
    for (const auto& v : report.violations)
        lines.push_back(std::string(lfht::violation_name(v.code)) + " at " + v.location + ": " +
                        v.detail);
    return lines;
}

py::dict stats_dict(const lfht::StatsSnapshot& stats) {
    py::dict d;
    d["expansions"] = stats.expansions;
    d["cas_failures"] = stats.cas_failures;
    d["restarts"] = stats.restarts;
    d["max_bucket_writes"] = stats.max_bucket_writes;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "concurrent lock-free hash trie map, lock-based baseline, and tabling demo";

    py::class_<PyTrieMap>(m, "HashTrieMap")
        .def(py::init([](unsigned w, unsigned threshold, bool identity_hash) {
                 return std::make_unique<PyTrieMap>(lfht::Config{w, threshold},
                                                    lfht::PluggableHash{identity_hash});
             }),
             py::arg("w") = 3, py::arg("threshold") = 3, py::arg("identity_hash") = false)
        .def(
            "insert_or_get",
            [](PyTrieMap& map, Key key, Value value) {
                const auto out = map.insert_or_get(key, value);
                return py::make_tuple(out.leaf->value, out.inserted);
            },
            py::arg("key"), py::arg("value"),
            "check/insert; returns (stored_value, inserted)")
        .def(
            "lookup",
            [](const PyTrieMap& map, Key key) -> std::optional<Value> {
                const Value* v = map.lookup(key);
                return v ? std::optional<Value>(*v) : std::nullopt;
            },
            py::arg("key"))
        .def("contains", &PyTrieMap::contains, py::arg("key"))
        .def("__contains__", &PyTrieMap::contains)
        .def("__len__", [](const PyTrieMap& map) { return map.size(); })
        .def("items", [](const PyTrieMap& map) { return map.snapshot(); })
        .def(
            "validate",
            [](const PyTrieMap& map,
               const std::optional<std::unordered_map<Key, Value>>& expected) {
                return format_report(expected ? lfht::validate(map, &*expected)
                                              : lfht::validate(map));
            },
            py::arg("expected") = std::nullopt,
            "structural check (quiescent maps); returns violation strings, empty when clean")
        .def("stats", [](const PyTrieMap& map) { return stats_dict(map.debug_stats()); });

    py::class_<PyLockedMap>(m, "LockedHashMap")
        .def(py::init([](std::size_t initial_buckets, bool identity_hash) {
                 return std::make_unique<PyLockedMap>(initial_buckets,
                                                      lfht::PluggableHash{identity_hash});
             }),
             py::arg("initial_buckets") = 8, py::arg("identity_hash") = false)
        .def(
            "insert_or_get",
            [](PyLockedMap& map, Key key, Value value) {
                const auto out = map.insert_or_get(key, value);
                return py::make_tuple(out.leaf->value, out.inserted);
            },
            py::arg("key"), py::arg("value"))
        .def(
            "lookup",
            [](const PyLockedMap& map, Key key) -> std::optional<Value> {
                const Value* v = map.lookup(key);
                return v ? std::optional<Value>(*v) : std::nullopt;
            },
            py::arg("key"))
        .def("contains", &PyLockedMap::contains, py::arg("key"))
        .def("__contains__", &PyLockedMap::contains)
        .def("__len__", [](const PyLockedMap& map) { return map.size(); })
        .def("bucket_count", &PyLockedMap::bucket_count)
        .def("items", [](const PyLockedMap& map) { return map.snapshot(); });

    py::class_<PyAnswerTable, std::shared_ptr<PyAnswerTable>>(m, "AnswerTable")
        .def("add_answer", &PyAnswerTable::add_answer, py::arg("answer"),
             "check/insert; False means the answer already existed")
        .def("contains", &PyAnswerTable::contains, py::arg("answer"))
        .def("__len__", [](const PyAnswerTable& t) { return t.size(); })
        .def("answers", &PyAnswerTable::answer_keys)
        .def_property_readonly("complete", &PyAnswerTable::complete)
        .def("mark_complete", &PyAnswerTable::mark_complete);

    py::class_<PyTableSpace>(m, "TableSpace")
        .def(py::init([](unsigned w, unsigned threshold) {
                 return std::make_unique<PyTableSpace>(lfht::Config{w, threshold});
             }),
             py::arg("w") = 3, py::arg("threshold") = 3)
        .def(
            "get_or_create",
            [](PyTableSpace& ts, Key subgoal) {
                auto [table, created] = ts.get_or_create(subgoal);
                return py::make_tuple(table, created);
            },
            py::arg("subgoal"), "returns (answer_table, created)")
        .def("find", [](const PyTableSpace& ts, Key subgoal) { return ts.find(subgoal); },
             py::arg("subgoal"))
        .def("__len__", [](const PyTableSpace& ts) { return ts.subgoal_count(); });

    m.def("mix64", &lfht::mix64, py::arg("x"), "the default 64-bit hash finalizer");

    m.def(
        "grid_graph",
        [](std::size_t side) {
            const lfht::Graph g = lfht::make_grid(side);
            return py::make_tuple(g.node_count, g.edges);
        },
        py::arg("side"), "4-neighbour bidirectional grid; returns (node_count, edges)");

    m.def(
        "tabled_path",
        [](std::size_t node_count, const std::vector<std::pair<Key, Key>>& edges,
           const std::vector<Key>& sources, unsigned threads, unsigned w, unsigned threshold) {
            lfht::Graph g{node_count, edges};
            lfht::PathTableSpace tables(lfht::Config{w, threshold});
            py::gil_scoped_release release;
            return lfht::tabled_path(g, sources, threads, tables);
        },
        py::arg("node_count"), py::arg("edges"), py::arg("sources"), py::arg("threads") = 1,
        py::arg("w") = 3, py::arg("threshold") = 3,
        "multithreaded memoized reachability; returns sorted (source, target) pairs");

    m.def(
        "run_scenario",
        [](const std::string& name, unsigned threads, std::size_t ops, std::uint64_t seed) {
            lfht::ScenarioResult result;
            {
                py::gil_scoped_release release;
                result = lfht::run_scenario(name, threads, ops, seed);
            }
            py::dict d;
            d["name"] = result.name;
            d["ok"] = result.ok();
            d["violations"] = format_report(result.report);
            d["distinct_keys"] = result.distinct_keys;
            d["probes"] = result.probes;
            d["witness_misses"] = result.witness_misses;
            d["multi_winner_keys"] = result.multi_winner_keys;
            d["max_level_depth"] = result.max_level_depth;
            d["stats"] = stats_dict(result.stats);
            return d;
        },
        py::arg("name"), py::arg("threads") = 4, py::arg("ops") = 0, py::arg("seed") = 1,
        "run a concurrency stress scenario and validate the result");

    m.def("scenario_names", [] { return lfht::scenario_names(); });

    m.attr("__version__") = "0.1.0";
}
