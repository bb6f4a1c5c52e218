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
Graph level discrimination audits: unresolved discrimination, potential proxy discrimination,
the unawareness condition and the graph condition under which observational adjustment equals
interventional adjustment.
"""

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Any, Optional

from ..errors import ProxyInInputSet, RoleMismatch
from .causal_graph import CausalGraph, NodeRole
from .paths import DirectedPath, directed_paths, is_blocked


@dataclass(frozen=True)
class AuditVerdict:
    """A verdict with the witness paths that justify it; witnesses are empty iff the verdict is false."""

    criterion: str
    target: str
    verdict: bool
    witnesses: tuple[DirectedPath, ...] = ()
    blockers: tuple[str, ...] = ()

    def __post_init__(self):
        assert self.verdict == bool(self.witnesses), "witnesses must be non-empty iff the verdict is true"

    def __bool__(self) -> bool:
        return self.verdict

    def to_dict(self) -> dict[str, Any]:
        return {
            "criterion": self.criterion,
            "target": self.target,
            "verdict": self.verdict,
            "blockers": list(self.blockers),
            "witnesses": [str(path) for path in self.witnesses],
        }


def unresolved_discrimination(g: CausalGraph, v: str, resolving: Optional[Iterable[str]] = None) -> AuditVerdict:
    """`v` exhibits unresolved discrimination if it is non-resolving and some directed path from the
    protected node to `v` is not blocked by a resolving node.

    Args:
        resolving: overrides the graph's resolving labels, e.g. `()` for the causal analog of demographic
            parity or the outcome node for the causal analog of equalized odds.
    """
    protected = g.protected
    g.check_node(v)
    resolving_set = tuple(g.nodes_with_role(NodeRole.RESOLVING) if resolving is None else resolving)
    for name in resolving_set:
        g.check_node(name)

    if v in resolving_set:
        return AuditVerdict("unresolved_discrimination", v, False, blockers=resolving_set)

    blockers = [name for name in resolving_set if name not in (protected, v)]
    witnesses = tuple(path for path in directed_paths(g, protected, v) if not is_blocked(path, blockers))
    return AuditVerdict("unresolved_discrimination", v, bool(witnesses), witnesses, resolving_set)


def potential_proxy_discrimination(g: CausalGraph, v: str) -> AuditVerdict:
    """`v` exhibits potential proxy discrimination if it is not a proxy and some directed path from the
    protected node to `v` is blocked by a proxy."""
    protected = g.protected
    g.check_node(v)
    proxies = tuple(g.nodes_with_role(NodeRole.PROXY))
    if v in proxies:
        return AuditVerdict("potential_proxy_discrimination", v, False, blockers=proxies)

    witnesses = tuple(path for path in directed_paths(g, protected, v) if is_blocked(path, proxies))
    return AuditVerdict("potential_proxy_discrimination", v, bool(witnesses), witnesses, proxies)


def unawareness_safe(g: CausalGraph, inputs: Iterable[str]) -> bool:
    """True iff no proxy has a directed path to any input. A predictor that reads only such inputs
    exhibits no proxy discrimination."""
    inputs = [g.check_node(name) for name in inputs]
    proxies = g.nodes_with_role(NodeRole.PROXY)
    for name in inputs:
        if name in proxies:
            raise ProxyInInputSet(name)

    return not any(g.has_directed_path(proxy, name) for proxy in proxies for name in inputs)


def adjustment_identifiable(g: CausalGraph, p: str, x: str) -> bool:
    """True iff every directed path from every ancestor of `p` to `x` is blocked by `p`.
    Then E[X|do(P)] equals E[X|P] and the adjustment can be learned from observational data."""
    for name, role in ((p, NodeRole.PROXY), (x, NodeRole.FEATURE)):
        actual = g.role_of(name)
        if actual != role:
            raise RoleMismatch(name, role.value, actual.value)

    for ancestor in g.ancestors(p):
        for path in directed_paths(g, ancestor, x):
            if p not in path.interior:
                return False

    return True


@dataclass
class GraphAudit:
    targets: dict[str, dict[str, AuditVerdict]] = field(default_factory=dict)
    unawareness: dict[str, dict[str, Any]] = field(default_factory=dict)
    adjustment: list[dict[str, Any]] = field(default_factory=list)

    @property
    def violation(self) -> bool:
        return any(verdict.verdict for verdicts in self.targets.values() for verdict in verdicts.values())

    def to_dict(self) -> dict[str, Any]:
        return {
            "violation": self.violation,
            "targets": {
                target: {name: verdict.to_dict() for name, verdict in verdicts.items()}
                for target, verdicts in self.targets.items()
            },
            "unawareness": self.unawareness,
            "adjustment_identifiable": self.adjustment,
        }


def audit_graph(
    g: CausalGraph,
    targets: Optional[Sequence[str]] = None,
    predictor_inputs: Optional[dict[str, Sequence[str]]] = None,
) -> GraphAudit:
    """Run every graph audit at once.

    Args:
        targets: nodes to audit, defaults to all predictor nodes.
        predictor_inputs: `{predictor: inputs}`, defaults to the parents of each predictor.
    """
    if targets is None:
        targets = g.nodes_with_role(NodeRole.PREDICTOR)

    audit = GraphAudit()
    for target in targets:
        audit.targets[target] = {
            "unresolved_discrimination": unresolved_discrimination(g, target),
            "potential_proxy_discrimination": potential_proxy_discrimination(g, target),
        }

    if predictor_inputs is None:
        predictor_inputs = {name: g.parents(name) for name in g.nodes_with_role(NodeRole.PREDICTOR)}

    proxies = g.nodes_with_role(NodeRole.PROXY)
    for predictor, inputs in predictor_inputs.items():
        unaware_inputs = [name for name in inputs if name not in proxies]
        audit.unawareness[predictor] = {
            "inputs": unaware_inputs,
            "safe": unawareness_safe(g, unaware_inputs),
        }

    for proxy in proxies:
        for feature in g.nodes_with_role(NodeRole.FEATURE):
            if g.has_directed_path(proxy, feature):
                audit.adjustment.append(
                    {"proxy": proxy, "feature": feature, "identifiable": adjustment_identifiable(g, proxy, feature)}
                )

    return audit
