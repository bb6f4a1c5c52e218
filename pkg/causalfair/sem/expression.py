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
Expression trees of structural equations.

The language is the minimal closure needed by linear-Gaussian and logistic models: constants, variable
references, linear terms, sums, the logistic sigmoid and three noise families. Noise nodes draw from the
random generator handed to `evaluate`, in a fixed depth-first order.
"""

import math
from abc import ABC, abstractmethod
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from numpy.typing import NDArray
from scipy.special import expit

from ..utils.py_functional import format_number


Columns = Mapping[str, NDArray]


class Expression(ABC):
    @abstractmethod
    def evaluate(self, columns: Columns, rng: np.random.Generator, size: int) -> NDArray: ...

    @abstractmethod
    def children(self) -> tuple["Expression", ...]: ...

    @abstractmethod
    def to_text(self) -> str: ...

    def variables(self) -> list[str]:
        """Referenced variable names, first occurrence order."""
        names = []
        for node in self.walk():
            if isinstance(node, (Var, Term)) and node.name not in names:
                names.append(node.name)

        return names

    def walk(self) -> Iterator["Expression"]:
        yield self
        for child in self.children():
            yield from child.walk()

    @property
    def is_constant(self) -> bool:
        """No variable references and no noise."""
        return not any(isinstance(node, (Var, Term, Noise)) for node in self.walk())

    @property
    def is_exogenous(self) -> bool:
        """No variable references; noise is allowed."""
        return not self.variables()

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class Const(Expression):
    value: float

    def evaluate(self, columns: Columns, rng: np.random.Generator, size: int) -> NDArray:
        return np.full(size, self.value, dtype=np.float64)

    def children(self) -> tuple[Expression, ...]:
        return ()

    def to_text(self) -> str:
        return format_number(self.value)


@dataclass(frozen=True)
class Var(Expression):
    name: str

    def evaluate(self, columns: Columns, rng: np.random.Generator, size: int) -> NDArray:
        return np.asarray(columns[self.name], dtype=np.float64)

    def children(self) -> tuple[Expression, ...]:
        return ()

    def to_text(self) -> str:
        return self.name


@dataclass(frozen=True)
class Term(Expression):
    """A linear term `coef * name`."""

    coef: float
    name: str

    def evaluate(self, columns: Columns, rng: np.random.Generator, size: int) -> NDArray:
        return self.coef * np.asarray(columns[self.name], dtype=np.float64)

    def children(self) -> tuple[Expression, ...]:
        return ()

    def to_text(self) -> str:
        return f"{format_number(self.coef)}*{self.name}"


@dataclass(frozen=True)
class Sum(Expression):
    terms: tuple[Expression, ...]

    def __post_init__(self):
        assert len(self.terms) >= 2, "a sum needs at least two terms"

    def evaluate(self, columns: Columns, rng: np.random.Generator, size: int) -> NDArray:
        total = np.zeros(size, dtype=np.float64)
        for term in self.terms:
            total = total + term.evaluate(columns, rng, size)

        return total

    def children(self) -> tuple[Expression, ...]:
        return self.terms

    def to_text(self) -> str:
        return " + ".join(term.to_text() for term in self.terms)


@dataclass(frozen=True)
class Sigmoid(Expression):
    arg: Expression

    def evaluate(self, columns: Columns, rng: np.random.Generator, size: int) -> NDArray:
        return expit(self.arg.evaluate(columns, rng, size))

    def children(self) -> tuple[Expression, ...]:
        return (self.arg,)

    def to_text(self) -> str:
        return f"sigmoid({self.arg.to_text()})"


class Noise(Expression):
    """Marker base class of the noise families."""

    def mean(self) -> float:
        """Expectation of an exogenous noise term; parameters must not reference variables."""
        raise NotImplementedError


@dataclass(frozen=True)
class Gaussian(Noise):
    loc: Expression
    scale: float

    def evaluate(self, columns: Columns, rng: np.random.Generator, size: int) -> NDArray:
        loc = self.loc.evaluate(columns, rng, size)
        return loc + self.scale * rng.standard_normal(size)

    def children(self) -> tuple[Expression, ...]:
        return (self.loc,)

    def to_text(self) -> str:
        return f"normal({self.loc.to_text()}, {format_number(self.scale)})"

    def mean(self) -> float:
        return constant_value(self.loc)


@dataclass(frozen=True)
class BernoulliPM(Noise):
    """Takes value +1 with probability `prob` and -1 otherwise."""

    prob: Expression

    def evaluate(self, columns: Columns, rng: np.random.Generator, size: int) -> NDArray:
        prob = self.prob.evaluate(columns, rng, size)
        if np.any((prob < 0.0) | (prob > 1.0) | np.isnan(prob)):
            raise FloatingPointError(f"probability outside [0, 1] in {self.to_text()}")

        return np.where(rng.random(size) < prob, 1.0, -1.0)

    def children(self) -> tuple[Expression, ...]:
        return (self.prob,)

    def to_text(self) -> str:
        return f"bern_pm({self.prob.to_text()})"

    def mean(self) -> float:
        return 2.0 * constant_value(self.prob) - 1.0


@dataclass(frozen=True)
class Mixture2(Noise):
    """Two Gaussian components; the first has weight sigmoid(logit)."""

    loc1: Expression
    scale1: float
    loc2: Expression
    scale2: float
    logit: Expression

    def evaluate(self, columns: Columns, rng: np.random.Generator, size: int) -> NDArray:
        weight = expit(self.logit.evaluate(columns, rng, size))
        loc1 = self.loc1.evaluate(columns, rng, size)
        loc2 = self.loc2.evaluate(columns, rng, size)
        first = rng.random(size) < weight
        draw1 = loc1 + self.scale1 * rng.standard_normal(size)
        draw2 = loc2 + self.scale2 * rng.standard_normal(size)
        return np.where(first, draw1, draw2)

    def children(self) -> tuple[Expression, ...]:
        return (self.loc1, self.loc2, self.logit)

    def to_text(self) -> str:
        return (
            f"mix2({self.loc1.to_text()}, {format_number(self.scale1)}, "
            f"{self.loc2.to_text()}, {format_number(self.scale2)}, {self.logit.to_text()})"
        )

    def mean(self) -> float:
        weight = float(expit(constant_value(self.logit)))
        return weight * constant_value(self.loc1) + (1.0 - weight) * constant_value(self.loc2)


def constant_value(expr: Expression) -> float:
    """Value of a constant expression (no variables, no noise)."""
    assert expr.is_constant, f"{expr.to_text()} is not constant"
    return float(expr.evaluate({}, np.random.default_rng(0), 1)[0])


def expected_value(expr: Expression) -> float:
    """Expectation of an exogenous expression (no variables). Sigmoid of noise is not supported."""
    assert expr.is_exogenous, f"{expr.to_text()} references variables"
    if isinstance(expr, Noise):
        return expr.mean()

    if isinstance(expr, Sum):
        return sum(expected_value(term) for term in expr.terms)

    if expr.is_constant:
        return constant_value(expr)

    raise ValueError(f"No closed form expectation for {expr.to_text()}.")


def noise_parameters(expr: Expression) -> list[tuple[str, float]]:
    """(family, value) pairs of every fixed noise parameter, for validation."""
    params = []
    for node in expr.walk():
        if isinstance(node, Gaussian):
            params.append(("stddev", node.scale))
        elif isinstance(node, Mixture2):
            params.extend([("stddev", node.scale1), ("stddev", node.scale2)])
        elif isinstance(node, BernoulliPM) and node.prob.is_constant:
            params.append(("probability", constant_value(node.prob)))

    return params


def numeric_literals(expr: Expression) -> list[float]:
    values = []
    for node in expr.walk():
        if isinstance(node, Const):
            values.append(node.value)
        elif isinstance(node, Term):
            values.append(node.coef)

    return values


def check_noise_parameter(kind: str, value: float) -> bool:
    if not math.isfinite(value):
        return False

    if kind == "stddev":
        return value > 0.0

    return 0.0 <= value <= 1.0


def make_sum(terms: list[Expression]) -> Expression:
    return terms[0] if len(terms) == 1 else Sum(tuple(terms))
