"""Concurrent lock-free hash trie map with a tabling layer.

Thin wrapper over the C++ core: a fixed-fanout hash trie with CAS-only
chain insertion and threshold-triggered expansion, a lock-based baseline
map, the two-level table space, and the verification scenarios.
"""

from lfht._core import (
    AnswerTable,
    HashTrieMap,
    LockedHashMap,
    TableSpace,
    grid_graph,
    mix64,
    run_scenario,
    scenario_names,
    tabled_path,
    __version__,
)

__all__ = [
    "AnswerTable",
    "HashTrieMap",
    "LockedHashMap",
    "TableSpace",
    "grid_graph",
    "mix64",
    "run_scenario",
    "scenario_names",
    "tabled_path",
    "__version__",
]
