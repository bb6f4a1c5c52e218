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
Derivation of non-discrimination constraints on a linear hypothesis class.

Proxy procedure: intervene on the proxy, expand R_theta over the roots of the intervened graph and require
the coefficient of the proxy to vanish. Resolving procedure: replace every resolving node by an independent
draw from its marginal, expand, and require the coefficient of the protected node to vanish.

Since R_theta is linear in theta, the coefficient of every root in its expansion is a linear form in theta,
obtained from the expansions of the individual inputs.
"""

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, Optional, Union

import numpy as np

from ..errors import Inexpressible, ProtectedNotRoot, ProxyNotInput, RoleMismatch
from ..graph import CausalGraph, NodeRole, directed_paths, intervene, is_blocked
from ..sem import RootForm, SEModel, root_form
from .constraint import ZERO_TOL, LinearConstraint, format_linear
from .hypothesis import INTERCEPT, HypothesisClass, theta_name


@dataclass(frozen=True)
class SymbolicRootForm:
    """Root form of R_theta: every root key maps to its coefficient vector over theta."""

    target: str
    theta_names: tuple[str, ...]
    constant: tuple[float, ...]
    terms: dict[str, tuple[float, ...]]
    intervened: dict[str, tuple[float, ...]]
    noise: dict[str, tuple[float, ...]]

    def coefficient(self, key: str) -> tuple[float, ...]:
        for mapping in (self.intervened, self.terms, self.noise):
            if key in mapping:
                return mapping[key]

        return tuple(0.0 for _ in self.theta_names)

    def render(self, key: str) -> str:
        return format_linear(self.coefficient(key), self.theta_names)

    def to_dict(self) -> dict[str, Any]:
        def named(vector: Sequence[float]) -> dict[str, float]:
            return {name: value for name, value in zip(self.theta_names, vector) if abs(value) >= ZERO_TOL}

        return {
            "target": self.target,
            "constant": named(self.constant),
            "intervened": {key: named(vector) for key, vector in self.intervened.items()},
            "terms": {key: named(vector) for key, vector in self.terms.items()},
            "noise": {key: named(vector) for key, vector in self.noise.items()},
        }


def symbolic_root_form(m: SEModel, h: HypothesisClass, interventions: Iterable[str]) -> SymbolicRootForm:
    interventions = list(interventions)
    forms: list[RootForm] = [root_form(m, name, interventions) for name in h.inputs]
    dim = h.dim

    def collect(attribute: str) -> dict[str, tuple[float, ...]]:
        keys = []
        for form in forms:
            keys.extend(key for key in getattr(form, attribute) if key not in keys)

        vectors = {}
        for key in keys:
            vector = [getattr(form, attribute).get(key, 0.0) for form in forms]
            vectors[key] = tuple(vector + [0.0] * (dim - len(vector)))

        return vectors

    constant = [form.constant for form in forms]
    if h.intercept:
        constant.append(1.0)

    intervened = {name: tuple(0.0 for _ in range(dim)) for name in interventions}
    intervened.update(collect("intervened"))
    return SymbolicRootForm(
        target=h.predictor,
        theta_names=tuple(h.theta_names),
        constant=tuple(constant),
        terms=collect("terms"),
        intervened=intervened,
        noise=collect("noise"),
    )


@dataclass
class DerivationReport:
    kind: str
    predictor: str
    interventions: tuple[str, ...]
    intervened_graph: CausalGraph
    rootform: SymbolicRootForm
    theta0: dict[str, Optional[float]]
    constraint: LinearConstraint
    expressible: bool
    theta_tilde: dict[str, str] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    @property
    def theta_names(self) -> list[str]:
        return list(self.constraint.theta_names)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "predictor": self.predictor,
            "interventions": list(self.interventions),
            "theta_names": self.theta_names,
            "constraint_rows": [{"coefficients": list(coefs), "rhs": rhs} for coefs, rhs in self.constraint.rows],
            "description": self.constraint.description,
            "theta0": {name: ("free" if value is None else value) for name, value in self.theta0.items()},
            "expressible": self.expressible,
            "theta_tilde": self.theta_tilde,
            "free_parameters": self.constraint.free_parameters(),
            "warnings": list(self.warnings),
            "rootform": self.rootform.to_dict(),
            "intervened_graph": self.intervened_graph.to_dict(),
        }


def _reparameterization(h: HypothesisClass, form: SymbolicRootForm, proxies: Sequence[str]) -> dict[str, str]:
    """theta_tilde in terms of theta: the proxy components read their root form coefficient, every other
    component is unchanged."""
    theta_tilde = {}
    for node in h.inputs:
        name = theta_name(node)
        theta_tilde[name] = form.render(node) if node in proxies else name

    if h.intercept:
        theta_tilde[INTERCEPT] = INTERCEPT

    return theta_tilde


def _proxies(m: SEModel, h: HypothesisClass, p: Union[str, Sequence[str]]) -> list[str]:
    proxies = [p] if isinstance(p, str) else list(p)
    assert proxies, "at least one proxy is required"
    for name in proxies:
        role = m.graph.role_of(name)
        if role != NodeRole.PROXY:
            raise RoleMismatch(name, NodeRole.PROXY.value, role.value)

        if name not in h.inputs:
            raise ProxyNotInput(name)

    return proxies


def check_expressibility(m: SEModel, h: HypothesisClass, p: Union[str, Sequence[str]]) -> tuple[bool, dict[str, str]]:
    """Whether `h` can be rewritten over theta_tilde, the coefficients of the proxy-free root form.

    With linear structural equations every linear class is expressible, so the verdict is always True and the
    returned mapping gives each theta_tilde component in terms of theta.

    Raises:
        NonlinearEquation: the root form of an input is not linear, for instance a sigmoid of a parent.
    """
    h.check(m.graph)
    proxies = _proxies(m, h, p)
    form = symbolic_root_form(m, h, proxies)
    return True, _reparameterization(h, form, proxies)


def derive_proxy_constraint(
    m: SEModel,
    h: HypothesisClass,
    p: Union[str, Sequence[str]],
    theta0: Optional[Mapping[str, Optional[float]]] = None,
) -> DerivationReport:
    """Constraint under which R_theta exhibits no proxy discrimination with respect to `p`.

    Args:
        p: one proxy, or several for simultaneous point interventions (one row per proxy).
        theta0: reference values for components of theta_tilde. Every listed component adds the row
            `theta_tilde_j = theta0_j`; proxy components default to 0 and must be 0, otherwise the reference
            predictor depends on the proxy.
    """
    h.check(m.graph)
    proxies = _proxies(m, h, p)
    form = symbolic_root_form(m, h, proxies)
    reference: dict[str, Optional[float]] = {name: None for name in h.theta_names}
    for name in proxies:
        reference[theta_name(name)] = 0.0

    for name, value in (theta0 or {}).items():
        if name not in reference:
            raise Inexpressible(f"theta0 names unknown parameter {name}, expected one of {h.theta_names}.")

        reference[name] = None if value is None else float(value)

    for name in proxies:
        if reference[theta_name(name)] != 0.0:
            raise Inexpressible(
                f"theta0 sets {theta_name(name)} = {reference[theta_name(name)]}; "
                f"the reference predictor must not depend on {name}."
            )

    rows = []
    for node in h.inputs:
        value = reference[theta_name(node)]
        if value is None:
            continue

        if node in proxies:
            rows.append((form.coefficient(node), value))
        else:
            rows.append((np.eye(h.dim)[h.inputs.index(node)], value))

    if h.intercept and reference[INTERCEPT] is not None:
        rows.append((np.eye(h.dim)[-1], reference[INTERCEPT]))

    warnings = []
    if len(proxies) > 1:
        warnings.append(
            f"{len(proxies)} proxies ({', '.join(proxies)}) are intervened on simultaneously, one row per proxy."
        )

    return DerivationReport(
        kind="proxy",
        predictor=h.predictor,
        interventions=tuple(proxies),
        intervened_graph=intervene(m.graph, proxies),
        rootform=form,
        theta0=reference,
        constraint=LinearConstraint.build(h.theta_names, rows),
        expressible=True,
        theta_tilde=_reparameterization(h, form, proxies),
        warnings=warnings,
    )


def derive_unresolved_constraint(
    m: SEModel, h: HypothesisClass, resolving: Optional[Iterable[str]] = None
) -> DerivationReport:
    """Constraint under which R_theta exhibits no unresolved discrimination.

    Every resolving node is replaced by an independent draw from its marginal, so the protected node only
    reaches R_theta along unresolved paths; the constraint zeroes its coefficient.

    Args:
        resolving: defaults to the graph's resolving labels. `()` constrains the total effect of the
            protected node.
    """
    g = m.graph
    h.check(g)
    protected = g.protected
    if resolving is None:
        resolving = g.nodes_with_role(NodeRole.RESOLVING)
    else:
        resolving = [g.check_node(name) for name in resolving]
        if protected in resolving:
            raise RoleMismatch(protected, NodeRole.RESOLVING.value, NodeRole.PROTECTED.value)

    intervened_graph = intervene(g, resolving)
    if not intervened_graph.is_root(protected):
        raise ProtectedNotRoot(protected, intervened_graph.parents(protected))

    form = symbolic_root_form(m, h, resolving)
    row = form.coefficient(protected)
    constraint = LinearConstraint.build(h.theta_names, [(row, 0.0)])

    warnings = []
    if protected not in h.inputs and not constraint.empty:
        for node, coef in zip(h.inputs, row):
            if abs(coef) < ZERO_TOL:
                continue

            for path in directed_paths(g, protected, node):
                if is_blocked(path, [name for name in resolving if name not in (protected, node)]):
                    warnings.append(
                        f"constraint on {theta_name(node)} also cancels the resolved path {path}->{h.predictor}; "
                        f"without {protected} as an input, resolved influence cannot be kept"
                    )

    if resolving:
        warnings.append("resolving nodes are replaced by independent draws from their marginal, per row")
    return DerivationReport(
        kind="unresolved",
        predictor=h.predictor,
        interventions=tuple(resolving),
        intervened_graph=intervened_graph,
        rootform=form,
        theta0={name: None for name in h.theta_names},
        constraint=constraint,
        expressible=True,
        theta_tilde={name: name for name in h.theta_names},
        warnings=warnings,
    )
