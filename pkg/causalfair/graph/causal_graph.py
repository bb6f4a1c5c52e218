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
Role-labeled causal DAG over named variables.
A CausalGraph is immutable once built; every operation returns a new graph.
"""

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

import networkx as nx

from ..errors import (
    CycleDetected,
    DuplicateNode,
    InvalidRole,
    MissingProtected,
    MultipleProtected,
    UnknownEndpoint,
    UnknownNode,
)


class NodeRole(str, Enum):
    """
    Using an enumeration class to avoid spelling errors in role labels
    """

    PROTECTED = "protected"
    PROXY = "proxy"
    RESOLVING = "resolving"
    FEATURE = "feature"
    OUTCOME = "outcome"
    PREDICTOR = "predictor"
    LATENT = "latent"


NodeDecl = Union[str, tuple[str, Union[str, NodeRole]]]


@dataclass(frozen=True)
class CausalGraph:
    """
    A causal graph is a tuple of (name, role) pairs in declaration order and a tuple of (parent, child)
    edges. Construction validates the graph; use `build_graph` for loosely typed declarations.
    """

    nodes: tuple[tuple[str, NodeRole], ...]
    edges: tuple[tuple[str, str], ...] = ()
    _dag: nx.DiGraph = field(init=False, repr=False, compare=False)
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.check_consistency()
        dag = nx.DiGraph()
        dag.add_nodes_from(name for name, _ in self.nodes)
        dag.add_edges_from(self.edges)
        object.__setattr__(self, "_dag", nx.freeze(dag))
        object.__setattr__(self, "_index", {name: i for i, (name, _) in enumerate(self.nodes)})
        self._check_acyclic()
        for name in self.nodes_with_role(NodeRole.PREDICTOR):
            if self._dag.out_degree(name) != 0:
                raise InvalidRole(f"Predictor {name} must be childless, it has children {self.children(name)}.")

    def check_consistency(self) -> None:
        seen = set()
        protected = []
        for name, role in self.nodes:
            assert isinstance(role, NodeRole), f"role of {name} must be a NodeRole, got {role!r}"
            if name in seen:
                raise DuplicateNode(name)

            seen.add(name)
            if role == NodeRole.PROTECTED:
                protected.append(name)

        if len(protected) > 1:
            raise MultipleProtected(protected)

        for parent, child in self.edges:
            for endpoint in (parent, child):
                if endpoint not in seen:
                    raise UnknownEndpoint(parent, child, endpoint)

            if parent == child:
                raise CycleDetected([parent, child])

    def _check_acyclic(self) -> None:
        try:
            cycle = nx.find_cycle(self._dag)
        except nx.NetworkXNoCycle:
            return

        raise CycleDetected([edge[0] for edge in cycle] + [cycle[0][0]])

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.nodes]

    @property
    def protected(self) -> str:
        names = self.nodes_with_role(NodeRole.PROTECTED)
        if not names:
            raise MissingProtected()

        return names[0]

    @property
    def has_protected(self) -> bool:
        return bool(self.nodes_with_role(NodeRole.PROTECTED))

    def check_node(self, name: str) -> str:
        if name not in self._index:
            raise UnknownNode(name)

        return name

    def index(self, name: str) -> int:
        return self._index[self.check_node(name)]

    def role_of(self, name: str) -> NodeRole:
        return self.nodes[self.index(name)][1]

    def nodes_with_role(self, role: Union[str, NodeRole]) -> list[str]:
        role = NodeRole(role)
        return [name for name, node_role in self.nodes if node_role == role]

    def _ordered(self, names: Iterable[str]) -> list[str]:
        return sorted(names, key=self._index.__getitem__)

    def parents(self, name: str) -> list[str]:
        return self._ordered(self._dag.predecessors(self.check_node(name)))

    def children(self, name: str) -> list[str]:
        return self._ordered(self._dag.successors(self.check_node(name)))

    def ancestors(self, name: str) -> list[str]:
        return self._ordered(nx.ancestors(self._dag, self.check_node(name)))

    def descendants(self, name: str) -> list[str]:
        return self._ordered(nx.descendants(self._dag, self.check_node(name)))

    def is_root(self, name: str) -> bool:
        return self._dag.in_degree(self.check_node(name)) == 0

    def roots(self) -> list[str]:
        return [name for name in self.names if self._dag.in_degree(name) == 0]

    def has_directed_path(self, source: str, target: str) -> bool:
        return source != target and nx.has_path(self._dag, self.check_node(source), self.check_node(target))

    def topological_order(self) -> list[str]:
        """Deterministic order: among ready nodes, the earliest declared goes first."""
        return list(nx.lexicographical_topological_sort(self._dag, key=self._index.__getitem__))

    def successors_graph(self) -> nx.DiGraph:
        """A read-only networkx view for algorithms that need one."""
        return self._dag

    def with_edges(self, edges: Iterable[tuple[str, str]]) -> "CausalGraph":
        return CausalGraph(nodes=self.nodes, edges=tuple(edges))

    def to_dict(self) -> dict:
        return {
            "nodes": [{"name": name, "role": role.value} for name, role in self.nodes],
            "edges": [[parent, child] for parent, child in self.edges],
        }


def build_graph(
    nodes: Union[Iterable[NodeDecl], Mapping[str, Union[str, NodeRole]]],
    edges: Iterable[tuple[str, str]] = (),
) -> CausalGraph:
    """Build and validate a graph from loosely typed declarations.

    Args:
        nodes: names (role `feature`), `(name, role)` pairs or a `{name: role}` mapping, in declaration order.
        edges: `(parent, child)` pairs. Duplicates are dropped, first occurrence wins.

    Returns:
        CausalGraph: the validated graph.
    """
    if isinstance(nodes, Mapping):
        nodes = list(nodes.items())

    node_list = []
    for decl in nodes:
        if isinstance(decl, str):
            node_list.append((decl, NodeRole.FEATURE))
        else:
            name, role = decl
            try:
                node_list.append((name, NodeRole(role)))
            except ValueError:
                raise InvalidRole(f"Unknown role {role!r} for node {name}.") from None

    edge_list = list(dict.fromkeys((parent, child) for parent, child in edges))
    return CausalGraph(nodes=tuple(node_list), edges=tuple(edge_list))
