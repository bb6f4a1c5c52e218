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
Structural equation models over a causal graph.
"""

import hashlib
import json
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Optional

from ..errors import BadNoiseParam, MissingEquation, NonParentReference, OrphanEquation
from ..graph import CausalGraph, NodeRole
from .expression import Expression, check_noise_parameter, noise_parameters, numeric_literals


@dataclass(frozen=True)
class Marginal:
    """Intervention that replaces a node by an independent draw from its own pre-intervention marginal."""

    def __str__(self) -> str:
        return "marginal"


@dataclass(frozen=True)
class SEModel:
    """
    A graph plus one structural equation `V = f(pa(V), N_V)` per node. Predictor nodes may omit their
    equation, in which case they are described by a hypothesis class instead.
    """

    graph: CausalGraph
    equations: Mapping[str, Expression] = field(default_factory=dict)
    name: str = "model"

    def __hash__(self) -> int:
        return hash(self.fingerprint)

    def equation(self, name: str) -> Optional[Expression]:
        return self.equations.get(self.graph.check_node(name))

    def has_equation(self, name: str) -> bool:
        return name in self.equations

    @property
    def fingerprint(self) -> str:
        """Stable digest of graph and equations, recorded in sample provenance."""
        payload = {
            "graph": self.graph.to_dict(),
            "equations": [
                [name, self.equations[name].to_text()] for name in self.graph.names if name in self.equations
            ],
        }
        digest = hashlib.sha256(json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()
        return digest[:16]

    def with_equations(self, updates: Mapping[str, Expression]) -> "SEModel":
        equations = dict(self.equations)
        equations.update(updates)
        return SEModel(graph=self.graph, equations=equations, name=self.name)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "graph": self.graph.to_dict(),
            "equations": {name: self.equations[name].to_text() for name in self.graph.names if name in self.equations},
        }


def validate_model(m: SEModel) -> SEModel:
    """Check equations against the graph: no orphans, one equation per sampled node, parent-only
    references, finite coefficients and valid noise parameters. Returns the model unchanged."""
    g = m.graph
    for name in m.equations:
        if name not in g:
            raise OrphanEquation(name)

    for name, role in g.nodes:
        expr = m.equations.get(name)
        if expr is None:
            if role != NodeRole.PREDICTOR:
                raise MissingEquation(name)

            continue

        parents = set(g.parents(name))
        for reference in expr.variables():
            if reference not in parents:
                raise NonParentReference(name, reference)

        for value in numeric_literals(expr):
            if not math.isfinite(value):
                raise BadNoiseParam(name, f"coefficient {value} is not finite")

        for kind, value in noise_parameters(expr):
            if not check_noise_parameter(kind, value):
                detail = "stddev must be positive and finite" if kind == "stddev" else "probability must be in [0, 1]"
                raise BadNoiseParam(name, f"{detail}, got {value}")

    return m
