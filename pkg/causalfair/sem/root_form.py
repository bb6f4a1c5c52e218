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
Symbolic expansion of a node into a linear function of the roots of the (intervened) graph.

Substitution is memoized per node, so each equation is expanded once per call. Implicit noise inside a
non-root equation, e.g. `Y = X + normal(0, 0.5)`, becomes a pseudo root named `Y~0`.
"""

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
from numpy.typing import NDArray

from ..errors import NonlinearEquation
from ..graph import intervene
from .expression import (
    BernoulliPM,
    Const,
    Expression,
    Gaussian,
    Mixture2,
    Sigmoid,
    Sum,
    Term,
    Var,
    constant_value,
    expected_value,
)
from .model import SEModel


@dataclass
class _Linear:
    coefs: dict[str, float] = field(default_factory=dict)
    constant: float = 0.0
    noise: dict[str, float] = field(default_factory=dict)

    def add(self, other: "_Linear", scale: float = 1.0) -> None:
        self.constant += scale * other.constant
        for key, value in other.coefs.items():
            self.coefs[key] = self.coefs.get(key, 0.0) + scale * value

        for key, value in other.noise.items():
            self.noise[key] = self.noise.get(key, 0.0) + scale * value


@dataclass(frozen=True)
class NoiseTerm:
    mean: float
    std: Optional[float] = None
    """standard deviation when the term is Gaussian, None otherwise"""


@dataclass(frozen=True)
class RootForm:
    """`target = constant + sum(terms) + sum(intervened) + sum(noise)`, every key a root of the intervened graph."""

    target: str
    terms: dict[str, float]
    constant: float = 0.0
    intervened: dict[str, float] = field(default_factory=dict)
    noise: dict[str, float] = field(default_factory=dict)
    noise_terms: dict[str, NoiseTerm] = field(default_factory=dict)

    def coefficient(self, name: str) -> float:
        for mapping in (self.intervened, self.terms, self.noise):
            if name in mapping:
                return mapping[name]

        return 0.0

    def evaluate(self, columns: Mapping[str, NDArray], noise: Optional[Mapping[str, NDArray]] = None) -> NDArray:
        """Evaluate on root columns. Implicit noise values must be supplied unless the form has none."""
        if self.noise and noise is None:
            raise ValueError(f"Root form of {self.target} has implicit noise {sorted(self.noise)}, pass `noise`.")

        size = len(next(iter(columns.values()))) if columns else 1
        total = np.full(size, self.constant, dtype=np.float64)
        for mapping, source in ((self.terms, columns), (self.intervened, columns), (self.noise, noise or {})):
            for name, coef in mapping.items():
                total = total + coef * np.asarray(source[name], dtype=np.float64)

        return total

    def to_dict(self) -> dict[str, Any]:
        return {
            "target": self.target,
            "constant": self.constant,
            "terms": dict(self.terms),
            "intervened": dict(self.intervened),
            "noise": dict(self.noise),
        }


class _Expander:
    def __init__(self, m: SEModel, interventions: frozenset[str]):
        self.model = m
        self.interventions = interventions
        self.graph = intervene(m.graph, interventions) if interventions else m.graph
        self.cache: dict[str, _Linear] = {}
        self.noise_terms: dict[str, NoiseTerm] = {}

    def expand(self, name: str) -> _Linear:
        if name in self.cache:
            return self.cache[name]

        if name in self.interventions or self.graph.is_root(name):
            result = _Linear(coefs={name: 1.0})
        else:
            expr = self.model.equation(name)
            if expr is None:
                raise NonlinearEquation(name, "node has no structural equation to expand")

            local = self.linearize(expr, name, [0])
            result = _Linear(constant=local.constant, noise=dict(local.noise))
            for parent, coef in local.coefs.items():
                result.add(self.expand(parent), coef)

        self.cache[name] = result
        return result

    def linearize(self, expr: Expression, owner: str, counter: list[int]) -> _Linear:
        if isinstance(expr, Const):
            return _Linear(constant=expr.value)

        if isinstance(expr, Var):
            return _Linear(coefs={expr.name: 1.0})

        if isinstance(expr, Term):
            return _Linear(coefs={expr.name: expr.coef})

        if isinstance(expr, Sum):
            total = _Linear()
            for term in expr.terms:
                total.add(self.linearize(term, owner, counter))

            return total

        if expr.is_constant:
            return _Linear(constant=constant_value(expr))

        if isinstance(expr, Gaussian):
            total = self.linearize(expr.loc, owner, counter)
            key = self._noise_key(owner, counter, NoiseTerm(mean=0.0, std=expr.scale))
            total.noise[key] = 1.0
            return total

        if expr.is_exogenous:
            try:
                mean = expected_value(expr)
            except ValueError:
                mean = float("nan")

            key = self._noise_key(owner, counter, NoiseTerm(mean=mean))
            return _Linear(noise={key: 1.0})

        kind = {Sigmoid: "sigmoid", BernoulliPM: "bern_pm", Mixture2: "mix2"}.get(type(expr), type(expr).__name__)
        raise NonlinearEquation(owner, f"{kind} of parent values is not linear")

    def _noise_key(self, owner: str, counter: list[int], term: NoiseTerm) -> str:
        key = f"{owner}~{counter[0]}"
        counter[0] += 1
        self.noise_terms[key] = term
        return key


def root_form(m: SEModel, target: str, interventions: Iterable[str] = ()) -> RootForm:
    """Expand `target` over the roots of the graph intervened on `interventions`.

    Coefficients of intervened nodes are kept apart from the other roots. Zero coefficients are dropped,
    except that the intervened map always lists every intervened node.
    """
    m.graph.check_node(target)
    interventions = frozenset(m.graph.check_node(name) for name in interventions)
    expander = _Expander(m, interventions)
    linear = expander.expand(target)
    order = {name: i for i, name in enumerate(m.graph.names)}
    terms, intervened = {}, {name: 0.0 for name in sorted(interventions, key=order.__getitem__)}
    for name in sorted(linear.coefs, key=order.__getitem__):
        coef = linear.coefs[name]
        if name in interventions:
            intervened[name] = coef
        elif coef != 0.0:
            terms[name] = coef

    noise = {key: coef for key, coef in linear.noise.items() if coef != 0.0}
    return RootForm(
        target=target,
        terms=terms,
        constant=linear.constant,
        intervened=intervened,
        noise=noise,
        noise_terms={key: expander.noise_terms[key] for key in noise},
    )


def linear_parts(m: SEModel, name: str) -> tuple[dict[str, float], float, dict[str, NoiseTerm]]:
    """One level linearization of the equation of `name`: parent coefficients, constant and implicit noise."""
    expr = m.equation(name)
    if expr is None:
        raise NonlinearEquation(name, "node has no structural equation")

    expander = _Expander(m, frozenset())
    local = expander.linearize(expr, name, [0])
    return local.coefs, local.constant, {key: expander.noise_terms[key] for key in local.noise}
