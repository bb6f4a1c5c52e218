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
Parser of the line oriented model format:

    node NAME role=ROLE
    edge NAME -> NAME
    eq NAME = EXPR
    predictor NAME inputs=(N1,...) [intercept]

EXPR is a `+` separated list of terms; a term is `NUMBER*NAME`, `NUMBER`, `NAME` or one of
`sigmoid(EXPR)`, `normal(EXPR, NUMBER)`, `bern_pm(EXPR)`, `mix2(EXPR, NUMBER, EXPR, NUMBER, EXPR)`.
Comments start with `#`. Errors are collected over the whole text, the parser never stops at the first one.
"""

import math
import re
from dataclasses import dataclass
from typing import Optional

from ..errors import ModelParseError
from ..graph import NodeRole
from ..sem import BernoulliPM, Const, Expression, Gaussian, Mixture2, Sigmoid, Term, Var
from ..sem.expression import make_sum
from .spec import Declaration, Diagnostic, DiagnosticCode, EdgeDecl, EqDecl, ModelSpec, NodeDecl, PredictorDecl, Span


MAX_DEPTH = 64
KEYWORDS = ("node", "edge", "eq", "predictor")
FUNCTIONS = ("sigmoid", "normal", "bern_pm", "mix2")
ROLES = tuple(role.value for role in NodeRole)

TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\f\v]+)"
    r"|(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<arrow>->)"
    r"|(?P<op>[=(),*+-])",
    re.ASCII,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    col: int


class _LineError(Exception):
    def __init__(self, diagnostic: Diagnostic):
        self.diagnostic = diagnostic


def _describe(token: Token) -> str:
    return "end of line" if token.kind == "end" else f"`{token.text}`"


def tokenize(line: str, lineno: int) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(line):
        match = TOKEN_RE.match(line, pos)
        if match is None:
            raise _LineError(
                Diagnostic(lineno, pos + 1, DiagnosticCode.SYNTAX_ERROR, f"unexpected character {line[pos]!r}")
            )

        if match.lastgroup != "ws":
            tokens.append(Token(match.lastgroup, match.group(), pos + 1))

        pos = match.end()

    tokens.append(Token("end", "", len(line) + 1))
    return tokens


class _LineParser:
    """Recursive descent over the tokens of one line."""

    def __init__(self, tokens: list[Token], lineno: int):
        self.tokens = tokens
        self.lineno = lineno
        self.pos = 0
        self.references: list[tuple[str, int]] = []

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def fail(self, message: str, expected: tuple[str, ...] = (), token: Optional[Token] = None) -> None:
        token = token or self.current
        raise _LineError(Diagnostic(self.lineno, token.col, DiagnosticCode.SYNTAX_ERROR, message, expected))

    def advance(self) -> Token:
        token = self.current
        if token.kind != "end":
            self.pos += 1

        return token

    def expect(self, kind: str, text: Optional[str] = None, what: Optional[str] = None) -> Token:
        token = self.current
        if token.kind != kind or (text is not None and token.text != text):
            wanted = what or (f"`{text}`" if text else kind.upper())
            self.fail(f"unexpected {_describe(token)}", (wanted,))

        return self.advance()

    def accept(self, kind: str, text: str) -> bool:
        if self.current.kind == kind and self.current.text == text:
            self.advance()
            return True

        return False

    def expect_end(self) -> None:
        self.expect("end", what="end of line")

    def number(self) -> float:
        negative = self.accept("op", "-")
        token = self.expect("number", what="NUMBER")
        value = float(token.text)
        if not math.isfinite(value):
            self.fail(f"number {token.text} is out of range", token=token)

        return -value if negative else value

    def name(self) -> Token:
        return self.expect("name", what="NAME")

    def expression(self, depth: int = 0) -> Expression:
        if depth > MAX_DEPTH:
            raise _LineError(
                Diagnostic(
                    self.lineno,
                    self.current.col,
                    DiagnosticCode.NESTING_TOO_DEEP,
                    f"expression nesting exceeds {MAX_DEPTH} levels",
                )
            )

        terms = [self.term(depth)]
        while self.accept("op", "+"):
            terms.append(self.term(depth))

        return make_sum(terms)

    def call(self, depth: int) -> Expression:
        function = self.advance().text
        self.expect("op", "(")
        if function == "sigmoid":
            expr = Sigmoid(self.expression(depth + 1))
        elif function == "bern_pm":
            expr = BernoulliPM(self.expression(depth + 1))
        elif function == "normal":
            loc = self.expression(depth + 1)
            self.expect("op", ",")
            expr = Gaussian(loc, self.number())
        else:
            loc1 = self.expression(depth + 1)
            self.expect("op", ",")
            scale1 = self.number()
            self.expect("op", ",")
            loc2 = self.expression(depth + 1)
            self.expect("op", ",")
            scale2 = self.number()
            self.expect("op", ",")
            expr = Mixture2(loc1, scale1, loc2, scale2, self.expression(depth + 1))

        self.expect("op", ")")
        return expr

    def term(self, depth: int) -> Expression:
        token = self.current
        if token.kind == "name":
            if token.text in FUNCTIONS and self.peek().text == "(":
                return self.call(depth)

            self.advance()
            self.references.append((token.text, token.col))
            return Var(token.text)

        if token.kind == "number" or (token.kind == "op" and token.text == "-"):
            value = self.number()
            if self.accept("op", "*"):
                ref = self.name()
                self.references.append((ref.text, ref.col))
                return Term(value, ref.text)

            return Const(value)

        self.fail(f"unexpected {_describe(token)}", ("NUMBER", "NAME", *FUNCTIONS))


class _Parser:
    def __init__(self, text: str, source: Optional[str] = None):
        self.text = text
        self.source = source
        self.diagnostics: list[Diagnostic] = []
        self.declarations: list[Declaration] = []
        self.nodes: set[str] = set()
        self.equations: set[str] = set()
        self.predictors: set[str] = set()
        self.pending: list[tuple[str, int, int]] = []

    def report(self, line: int, col: int, code: DiagnosticCode, message: str, expected: tuple[str, ...] = ()):
        self.diagnostics.append(Diagnostic(line, col, code, message, expected))

    def reference(self, name: str, line: int, col: int) -> None:
        """Names may be used before their node line, they are resolved after the last line."""
        self.pending.append((name, line, col))

    def run(self) -> ModelSpec:
        for lineno, raw in enumerate(self.text.split("\n"), start=1):
            line = raw.split("#", 1)[0]
            if not line.strip():
                continue

            try:
                self.statement(_LineParser(tokenize(line, lineno), lineno))
            except _LineError as exc:
                self.diagnostics.append(exc.diagnostic)

        for name, line, col in self.pending:
            if name not in self.nodes:
                self.report(line, col, DiagnosticCode.UNDECLARED_VARIABLE, f"{name} is not a declared node")

        if self.diagnostics:
            self.diagnostics.sort(key=lambda diag: (diag.line, diag.col))
            raise ModelParseError(self.diagnostics, self.source)

        return ModelSpec(tuple(self.declarations))

    def statement(self, parser: _LineParser) -> None:
        keyword = parser.current
        if keyword.kind != "name" or keyword.text not in KEYWORDS:
            parser.fail(f"unexpected {_describe(keyword)}", KEYWORDS)

        parser.advance()
        span = Span(parser.lineno, keyword.col)
        getattr(self, f"_{keyword.text}")(parser, span)

    def _node(self, parser: _LineParser, span: Span) -> None:
        name = parser.name()
        parser.expect("name", "role")
        parser.expect("op", "=")
        role = parser.name()
        parser.expect_end()
        if name.text in self.nodes:
            self.report(span.line, name.col, DiagnosticCode.DUPLICATE_NODE, f"node {name.text} is declared twice")
            return

        self.nodes.add(name.text)
        if role.text not in ROLES:
            self.report(span.line, role.col, DiagnosticCode.UNKNOWN_ROLE, f"unknown role {role.text}", ROLES)
            return

        self.declarations.append(NodeDecl(name.text, role.text, span))

    def _edge(self, parser: _LineParser, span: Span) -> None:
        parent = parser.name()
        parser.expect("arrow", what="`->`")
        child = parser.name()
        parser.expect_end()
        self.reference(parent.text, span.line, parent.col)
        self.reference(child.text, span.line, child.col)
        self.declarations.append(EdgeDecl(parent.text, child.text, span))

    def _eq(self, parser: _LineParser, span: Span) -> None:
        name = parser.name()
        parser.expect("op", "=")
        expr = parser.expression()
        parser.expect_end()
        self.reference(name.text, span.line, name.col)
        for ref, col in parser.references:
            self.reference(ref, span.line, col)

        if name.text in self.equations:
            self.report(
                span.line, name.col, DiagnosticCode.DUPLICATE_EQUATION, f"node {name.text} already has an equation"
            )
            return

        self.equations.add(name.text)
        self.declarations.append(EqDecl(name.text, expr, span))

    def _predictor(self, parser: _LineParser, span: Span) -> None:
        name = parser.name()
        parser.expect("name", "inputs")
        parser.expect("op", "=")
        parser.expect("op", "(")
        inputs = []
        if not parser.accept("op", ")"):
            inputs.append(parser.name())
            while parser.accept("op", ","):
                inputs.append(parser.name())

            parser.expect("op", ")")

        intercept = parser.accept("name", "intercept")
        parser.expect_end()
        self.reference(name.text, span.line, name.col)
        seen = set()
        for token in inputs:
            self.reference(token.text, span.line, token.col)
            if token.text in seen:
                self.report(span.line, token.col, DiagnosticCode.SYNTAX_ERROR, f"input {token.text} is repeated")

            seen.add(token.text)

        if name.text in self.predictors:
            self.report(
                span.line, name.col, DiagnosticCode.DUPLICATE_PREDICTOR, f"predictor {name.text} is declared twice"
            )
            return

        self.predictors.add(name.text)
        self.declarations.append(PredictorDecl(name.text, tuple(token.text for token in inputs), intercept, span))


def parse_model(text: str, source: Optional[str] = None) -> ModelSpec:
    """Parse model text into a ModelSpec.

    Raises:
        ModelParseError: with every syntax and name resolution diagnostic of the text, sorted by position.
    """
    return _Parser(text, source).run()
