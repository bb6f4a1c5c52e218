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

import numpy as np
import pytest

from causalfair.errors import (
    CycleDetected,
    DuplicateNode,
    EndpointInBlockerSet,
    InvalidRole,
    MultipleProtected,
    ProxyInInputSet,
    RoleMismatch,
    UnknownEndpoint,
    UnknownNode,
)
from causalfair.graph import (
    DirectedPath,
    NodeRole,
    adjustment_identifiable,
    audit_graph,
    build_graph,
    directed_paths,
    intervene,
    is_blocked,
    potential_proxy_discrimination,
    terminal_ancestors,
    unawareness_safe,
    unresolved_discrimination,
)


def _fig1():
    return build_graph(
        [("A", "protected"), ("X", "resolving"), ("R", "predictor")],
        [("A", "X"), ("A", "R"), ("X", "R")],
    )


def _fig2_left():
    nodes = [("A", "protected"), ("X1", "resolving"), ("Y", "outcome"), ("X2", "feature"), ("Rstar", "predictor")]
    edges = [("A", "X1"), ("X1", "Y"), ("A", "X2"), ("X1", "X2"), ("X1", "Rstar")]
    return build_graph(nodes, edges)


def _fig2_right():
    nodes = [("A", "protected"), ("Y", "outcome"), ("X2", "feature"), ("X1", "resolving"), ("Rstar", "predictor")]
    edges = [("A", "Y"), ("Y", "X2"), ("X2", "Rstar"), ("A", "Rstar"), ("A", "X1"), ("X2", "X1")]
    return build_graph(nodes, edges)


def _fig3():
    nodes = [("A", "protected"), ("P", "proxy"), ("X", "feature"), ("R", "predictor")]
    edges = [("A", "P"), ("A", "X"), ("P", "X"), ("P", "R"), ("X", "R")]
    return build_graph(nodes, edges)


def _paths(g, source, target):
    return [str(path) for path in directed_paths(g, source, target)]


def _random_dag(seed: int, max_nodes: int = 8):
    rng = np.random.default_rng(seed)
    num_nodes = int(rng.integers(2, max_nodes + 1))
    names = ["A"] + [f"V{i}" for i in range(1, num_nodes)]
    edges = [(names[j], names[i]) for i in range(num_nodes) for j in range(i) if rng.random() < 0.4]
    return build_graph([("A", "protected")] + names[1:], edges), edges


def _dfs_paths(edges, source, target):
    children = {}
    for parent, child in edges:
        children.setdefault(parent, []).append(child)

    found = []

    def visit(path):
        if path[-1] == target:
            found.append(tuple(path))
            return

        for child in children.get(path[-1], []):
            if child not in path:
                visit(path + [child])

    if source != target:
        visit([source])

    return sorted(found)


def test_build_graph():
    g = _fig1()
    assert g.names == ["A", "X", "R"]
    assert g.protected == "A"
    assert g.role_of("X") == NodeRole.RESOLVING
    assert g.parents("R") == ["A", "X"]
    assert g.children("A") == ["X", "R"]
    assert g.roots() == ["A"]
    assert g.topological_order() == ["A", "X", "R"]

    g = build_graph(["B", "C"])
    assert g.role_of("B") == NodeRole.FEATURE
    assert _paths(g, "B", "C") == []


def test_build_graph_errors():
    with pytest.raises(CycleDetected):
        build_graph(["A", "B"], [("A", "B"), ("B", "A")])

    with pytest.raises(CycleDetected):
        build_graph(["A"], [("A", "A")])

    with pytest.raises(DuplicateNode):
        build_graph(["A", "A"])

    with pytest.raises(UnknownEndpoint):
        build_graph(["A"], [("A", "B")])

    with pytest.raises(MultipleProtected):
        build_graph([("A", "protected"), ("B", "protected")])

    with pytest.raises(InvalidRole):
        build_graph([("A", "protcted")])

    with pytest.raises(InvalidRole):
        build_graph([("R", "predictor"), ("X", "feature")], [("R", "X")])


def test_topological_order_tie_break():
    g = build_graph(["C", "B", "A"], [("C", "A")])
    assert g.topological_order() == ["C", "B", "A"]


def test_directed_paths():
    assert _paths(_fig2_right(), "A", "Rstar") == ["A->Rstar", "A->Y->X2->Rstar"]
    assert _paths(_fig2_left(), "A", "Rstar") == ["A->X1->Rstar"]
    assert _paths(_fig1(), "A", "A") == []
    with pytest.raises(UnknownNode):
        directed_paths(_fig1(), "A", "Z")


@pytest.mark.parametrize("seed", range(20))
def test_directed_paths_random_dags(seed: int):
    g, edges = _random_dag(seed)
    for source in g.names:
        for target in g.names:
            paths = [path.nodes for path in directed_paths(g, source, target)]
            assert paths == _dfs_paths(edges, source, target)


def test_is_blocked():
    assert is_blocked(DirectedPath(("A", "X", "R")), {"X"})
    assert not is_blocked(DirectedPath(("A", "R")), {"X"})
    assert not is_blocked(DirectedPath(("A", "Y", "X2", "Rstar")), {"X1"})
    with pytest.raises(EndpointInBlockerSet):
        is_blocked(DirectedPath(("A", "X", "R")), {"A"})


def test_intervene():
    g = intervene(_fig3(), ["P"])
    assert ("A", "P") not in g.edges
    assert g.is_root("P")
    assert set(g.edges) == {("A", "X"), ("P", "X"), ("P", "R"), ("X", "R")}
    assert intervene(_fig3(), []) == _fig3()


def test_terminal_ancestors():
    nodes = [("A", "protected"), ("N_P", "latent"), ("P", "proxy"), ("N_X", "latent"), ("X", "feature")]
    edges = [("A", "P"), ("N_P", "P"), ("A", "X"), ("P", "X"), ("N_X", "X")]
    g = intervene(build_graph(nodes, edges), ["P"])
    assert terminal_ancestors(g, "X") == ["A", "P", "N_X"]
    assert terminal_ancestors(g, "A") == ["A"]


def test_unresolved_discrimination():
    left = unresolved_discrimination(_fig2_left(), "Rstar")
    assert not left
    assert left.witnesses == ()

    right = unresolved_discrimination(_fig2_right(), "Rstar")
    assert right.verdict
    assert [str(path) for path in right.witnesses] == ["A->Rstar", "A->Y->X2->Rstar"]

    assert unresolved_discrimination(_fig1(), "R", resolving=()).verdict
    assert not unresolved_discrimination(_fig1(), "X").verdict


@pytest.mark.parametrize("seed", range(20))
def test_unresolved_discrimination_monotone(seed: int):
    g, _ = _random_dag(seed)
    order = [str(name) for name in np.random.default_rng(seed).permutation([n for n in g.names if n != "A"])]
    for v in g.names:
        verdicts = [unresolved_discrimination(g, v, resolving=order[:size]).verdict for size in range(len(order) + 1)]
        assert verdicts == sorted(verdicts, reverse=True)


def test_potential_proxy_discrimination():
    nodes = [("A", "protected"), ("P", "proxy"), ("X", "feature"), ("R", "predictor")]
    g = build_graph(nodes, [("A", "P"), ("P", "X"), ("A", "X"), ("X", "R")])
    verdict = potential_proxy_discrimination(g, "X")
    assert verdict.verdict
    assert [str(path) for path in verdict.witnesses] == ["A->P->X"]
    assert not potential_proxy_discrimination(g, "P").verdict
    assert not potential_proxy_discrimination(_fig1(), "R").verdict


@pytest.mark.parametrize("seed", range(20))
def test_no_proxy_no_potential_proxy_discrimination(seed: int):
    g, _ = _random_dag(seed)
    assert not g.nodes_with_role(NodeRole.PROXY)
    for v in g.names:
        verdict = potential_proxy_discrimination(g, v)
        assert not verdict.verdict
        assert verdict.witnesses == ()


def test_unawareness_safe():
    g = _fig3()
    assert not unawareness_safe(g, ["X"])
    assert unawareness_safe(g, [])
    with pytest.raises(ProxyInInputSet):
        unawareness_safe(g, ["P"])

    nodes = [("A", "protected"), ("P", "proxy"), ("Z", "feature"), ("R", "predictor")]
    g = build_graph(nodes, [("A", "P"), ("A", "Z"), ("Z", "R")])
    assert unawareness_safe(g, ["Z"])


def test_adjustment_identifiable():
    assert not adjustment_identifiable(_fig3(), "P", "X")
    chain = build_graph([("A", "protected"), ("P", "proxy"), ("X", "feature")], [("A", "P"), ("P", "X")])
    assert adjustment_identifiable(chain, "P", "X")
    with pytest.raises(RoleMismatch):
        adjustment_identifiable(chain, "X", "P")


def test_audit_graph():
    audit = audit_graph(_fig2_right(), ["Rstar"])
    assert audit.violation
    result = audit.to_dict()
    assert result["targets"]["Rstar"]["unresolved_discrimination"]["witnesses"] == ["A->Rstar", "A->Y->X2->Rstar"]

    audit = audit_graph(_fig3())
    assert audit.unawareness["R"] == {"inputs": ["X"], "safe": False}
    assert audit.adjustment == [{"proxy": "P", "feature": "X", "identifiable": False}]
    assert audit.targets["R"]["potential_proxy_discrimination"].verdict
