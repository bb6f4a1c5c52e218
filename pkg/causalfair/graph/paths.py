# Copyright 2024 The causalfair Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
Directed paths, blocking and graph surgery.

Path enumeration is exhaustive and therefore exponential in the worst case. Graphs are expert
specified (tens of nodes), which keeps the number of simple paths manageable.
"""

from collections.abc import Iterable
from dataclasses import dataclass

import networkx as nx

from ..errors import EndpointInBlockerSet
from .causal_graph import CausalGraph


@dataclass(frozen=True)
class DirectedPath:
    nodes: tuple[str, ...]

    def __post_init__(self):
        assert len(self.nodes) >= 2, f"a directed path needs at least two nodes, got {self.nodes}"
        assert len(set(self.nodes)) == len(self.nodes), f"path nodes must be distinct, got {self.nodes}"

    @property
    def source(self) -> str:
        return self.nodes[0]

    @property
    def target(self) -> str:
        return self.nodes[-1]

    @property
    def interior(self) -> tuple[str, ...]:
        return self.nodes[1:-1]

    def __len__(self) -> int:
        return len(self.nodes)

    def __str__(self) -> str:
        return "->".join(self.nodes)


def directed_paths(g: CausalGraph, source: str, target: str) -> list[DirectedPath]:
    """All directed paths from `source` to `target`, sorted lexicographically by node sequence."""
    g.check_node(source)
    g.check_node(target)
    if source == target:
        return []

    paths = nx.all_simple_paths(g.successors_graph(), source, target)
    return [DirectedPath(tuple(path)) for path in sorted(tuple(path) for path in paths)]


def is_blocked(path: DirectedPath, blockers: Iterable[str]) -> bool:
    """A path is blocked by a node set if one of its interior nodes is in the set."""
    blockers = set(blockers)
    for endpoint in (path.source, path.target):
        if endpoint in blockers:
            raise EndpointInBlockerSet(endpoint)

    return any(node in blockers for node in path.interior)


def intervene(g: CausalGraph, targets: Iterable[str]) -> CausalGraph:
    """Graph surgery: remove every edge into a target. Targets become roots, everything else is unchanged."""
    targets = {g.check_node(target) for target in targets}
    return g.with_edges(edge for edge in g.edges if edge[1] not in targets)


def terminal_ancestors(g: CausalGraph, v: str) -> list[str]:
    """Ancestors of `v` that are roots of `g`, `v` itself included when it is a root."""
    candidates = g.ancestors(v) + [v]
    return [name for name in g.names if name in candidates and g.is_root(name)]
