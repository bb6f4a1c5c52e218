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
Abstract form of a model file. Spans are carried for diagnostics and ignored by equality.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from ..sem import Expression


class DiagnosticCode(str, Enum):
    """
    Using an enumeration class to avoid spelling errors in diagnostic codes
    """

    SYNTAX_ERROR = "SyntaxError"
    UNKNOWN_ROLE = "UnknownRole"
    UNDECLARED_VARIABLE = "UndeclaredVariable"
    DUPLICATE_EQUATION = "DuplicateEquation"
    DUPLICATE_NODE = "DuplicateNode"
    DUPLICATE_PREDICTOR = "DuplicatePredictor"
    NESTING_TOO_DEEP = "NestingTooDeep"
    INVALID_GRAPH = "InvalidGraph"
    INVALID_MODEL = "InvalidModel"


@dataclass(frozen=True)
class Span:
    line: int
    col: int


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    code: DiagnosticCode
    message: str
    expected: tuple[str, ...] = ()

    def __str__(self) -> str:
        text = f"{self.line}:{self.col}: {self.code.value}: {self.message}"
        if self.expected:
            text += f" (expected {' or '.join(self.expected)})"

        return text

    def to_dict(self) -> dict:
        return {
            "line": self.line,
            "col": self.col,
            "code": self.code.value,
            "message": self.message,
            "expected": list(self.expected),
        }


@dataclass(frozen=True)
class NodeDecl:
    name: str
    role: str
    span: Optional[Span] = field(default=None, compare=False)


@dataclass(frozen=True)
class EdgeDecl:
    parent: str
    child: str
    span: Optional[Span] = field(default=None, compare=False)


@dataclass(frozen=True)
class EqDecl:
    name: str
    expr: Expression
    span: Optional[Span] = field(default=None, compare=False)


@dataclass(frozen=True)
class PredictorDecl:
    name: str
    inputs: tuple[str, ...]
    intercept: bool = False
    span: Optional[Span] = field(default=None, compare=False)


Declaration = Union[NodeDecl, EdgeDecl, EqDecl, PredictorDecl]


@dataclass(frozen=True)
class ModelSpec:
    declarations: tuple[Declaration, ...] = ()

    @property
    def nodes(self) -> list[NodeDecl]:
        return [decl for decl in self.declarations if isinstance(decl, NodeDecl)]

    @property
    def edges(self) -> list[EdgeDecl]:
        return [decl for decl in self.declarations if isinstance(decl, EdgeDecl)]

    @property
    def equations(self) -> list[EqDecl]:
        return [decl for decl in self.declarations if isinstance(decl, EqDecl)]

    @property
    def predictors(self) -> list[PredictorDecl]:
        return [decl for decl in self.declarations if isinstance(decl, PredictorDecl)]

    def span_of(self, kind: type, **match) -> Optional[Span]:
        """Span of the first declaration of `kind` whose fields equal `match`."""
        for decl in self.declarations:
            if isinstance(decl, kind) and all(getattr(decl, key) == value for key, value in match.items()):
                return decl.span

        return None
