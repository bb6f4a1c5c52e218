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

from collections.abc import Iterable, Mapping
from typing import Optional

from ..constraints import HypothesisClass
from ..graph import CausalGraph
from ..sem import Expression
from .spec import Declaration, EdgeDecl, EqDecl, ModelSpec, NodeDecl, PredictorDecl


def _render(decl: Declaration) -> str:
    if isinstance(decl, NodeDecl):
        return f"node {decl.name} role={decl.role}"

    if isinstance(decl, EdgeDecl):
        return f"edge {decl.parent} -> {decl.child}"

    if isinstance(decl, EqDecl):
        return f"eq {decl.name} = {decl.expr.to_text()}"

    text = f"predictor {decl.name} inputs=({','.join(decl.inputs)})"
    return text + " intercept" if decl.intercept else text


def serialize_model(spec: ModelSpec) -> str:
    """Canonical text: one declaration per line in declaration order, single spaces, trailing newline."""
    return "".join(f"{_render(decl)}\n" for decl in spec.declarations)


def spec_from_graph(
    g: CausalGraph,
    equations: Optional[Mapping[str, Expression]] = None,
    hypotheses: Iterable[HypothesisClass] = (),
) -> ModelSpec:
    """Build a ModelSpec programmatically: nodes, then edges, then equations in node order, then predictors."""
    equations = equations or {}
    declarations: list[Declaration] = [NodeDecl(name, role.value) for name, role in g.nodes]
    declarations.extend(EdgeDecl(parent, child) for parent, child in g.edges)
    declarations.extend(EqDecl(name, equations[name]) for name in g.names if name in equations)
    declarations.extend(PredictorDecl(h.predictor, tuple(h.inputs), h.intercept) for h in hypotheses)
    return ModelSpec(tuple(declarations))
