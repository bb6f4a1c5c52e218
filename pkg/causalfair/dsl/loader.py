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
Compile a ModelSpec into a graph, a structural equation model and hypothesis classes.
"""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from ..constraints import HypothesisClass
from ..errors import (
    BadNoiseParam,
    CausalFairError,
    CycleDetected,
    DuplicateNode,
    GraphError,
    MissingEquation,
    ModelError,
    ModelParseError,
    MultipleProtected,
    NonParentReference,
    OrphanEquation,
)
from ..graph import CausalGraph, NodeRole, build_graph
from ..sem import Expression, SEModel, validate_model
from .parser import parse_model
from .spec import Diagnostic, DiagnosticCode, EdgeDecl, EqDecl, ModelSpec, NodeDecl, Span


MODEL_SUFFIX = ".cfm"


def _diagnostic(span: Optional[Span], code: DiagnosticCode, exc: Exception) -> Diagnostic:
    span = span or Span(1, 1)
    return Diagnostic(span.line, span.col, code, str(exc))


def _graph_span(spec: ModelSpec, exc: GraphError) -> Optional[Span]:
    if isinstance(exc, CycleDetected) and len(exc.cycle) > 1:
        return spec.span_of(EdgeDecl, parent=exc.cycle[0], child=exc.cycle[1])

    if isinstance(exc, MultipleProtected):
        return spec.span_of(NodeDecl, name=exc.names[-1])

    if isinstance(exc, DuplicateNode):
        return spec.span_of(NodeDecl, name=exc.name)

    for decl in spec.nodes:
        if decl.role == NodeRole.PREDICTOR.value and decl.name in str(exc):
            return decl.span

    return None


def _model_span(spec: ModelSpec, exc: ModelError) -> Optional[Span]:
    name = getattr(exc, "owner", None) or getattr(exc, "name", None)
    if isinstance(exc, (OrphanEquation, NonParentReference, BadNoiseParam)):
        return spec.span_of(EqDecl, name=name)

    if isinstance(exc, MissingEquation):
        return spec.span_of(NodeDecl, name=name)

    return None


@dataclass(frozen=True)
class CompiledSpec:
    spec: ModelSpec
    graph: CausalGraph
    equations: dict[str, Expression] = field(default_factory=dict)
    hypotheses: dict[str, HypothesisClass] = field(default_factory=dict)
    name: str = "model"
    source: Optional[str] = None

    @property
    def model(self) -> SEModel:
        """The model without validation; graph-only files give a model with no equations."""
        return SEModel(graph=self.graph, equations=dict(self.equations), name=self.name)

    def require_model(self) -> SEModel:
        """The validated model; equation errors are reported with the span of the offending line."""
        try:
            return validate_model(self.model)
        except ModelError as exc:
            span = _model_span(self.spec, exc)
            raise ModelParseError([_diagnostic(span, DiagnosticCode.INVALID_MODEL, exc)], self.source) from exc

    def hypothesis(self, predictor: Optional[str] = None) -> HypothesisClass:
        if predictor is None:
            if len(self.hypotheses) != 1:
                raise ValueError(f"Choose a predictor, the model declares {sorted(self.hypotheses) or 'none'}.")

            predictor = next(iter(self.hypotheses))

        if predictor not in self.hypotheses:
            raise ValueError(f"No hypothesis class for predictor {predictor}, known: {sorted(self.hypotheses)}.")

        return self.hypotheses[predictor]


def compile_spec(spec: ModelSpec, name: str = "model", source: Optional[str] = None) -> CompiledSpec:
    """Build the graph and collect equations and hypothesis classes.

    Predictor nodes without a `predictor` line get a hypothesis class over their parents.
    """
    try:
        graph = build_graph(
            [(decl.name, decl.role) for decl in spec.nodes],
            [(decl.parent, decl.child) for decl in spec.edges],
        )
    except GraphError as exc:
        diagnostic = _diagnostic(_graph_span(spec, exc), DiagnosticCode.INVALID_GRAPH, exc)
        raise ModelParseError([diagnostic], source) from exc

    diagnostics = []
    hypotheses = {}
    for decl in spec.predictors:
        try:
            hypotheses[decl.name] = HypothesisClass(decl.name, decl.inputs, decl.intercept).check(graph)
        except (CausalFairError, AssertionError) as exc:
            diagnostics.append(_diagnostic(decl.span, DiagnosticCode.INVALID_GRAPH, exc))

    if diagnostics:
        raise ModelParseError(diagnostics, source)

    for predictor in graph.nodes_with_role(NodeRole.PREDICTOR):
        if predictor not in hypotheses:
            hypotheses[predictor] = HypothesisClass.from_graph(graph, predictor)

    return CompiledSpec(
        spec=spec,
        graph=graph,
        equations={decl.name: decl.expr for decl in spec.equations},
        hypotheses=hypotheses,
        name=name,
        source=source,
    )


def load_model(text_or_path: Union[str, os.PathLike], name: Optional[str] = None) -> CompiledSpec:
    """Parse and compile a model given as text or as the path of a `.cfm` file, named after the file stem."""
    if isinstance(text_or_path, os.PathLike) or (
        "\n" not in text_or_path and text_or_path.endswith(MODEL_SUFFIX)
    ):
        path = Path(text_or_path)
        try:
            text = path.read_text(encoding="utf-8")
        except UnicodeDecodeError as exc:
            diagnostic = Diagnostic(1, 1, DiagnosticCode.SYNTAX_ERROR, f"file is not valid UTF-8: {exc.reason}")
            raise ModelParseError([diagnostic], str(path)) from exc

        return compile_spec(parse_model(text, source=str(path)), name=name or path.stem, source=str(path))

    return compile_spec(parse_model(text_or_path), name=name or "model")

