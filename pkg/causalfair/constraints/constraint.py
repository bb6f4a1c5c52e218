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
Linear equality systems C theta = d over named parameters.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any, Union

import numpy as np
from numpy.typing import NDArray
from scipy import linalg


ZERO_TOL = 1e-12


def format_linear(coefs: Sequence[float], names: Sequence[str]) -> str:
    """Render `sum_i coef_i * name_i`, e.g. `lambda_P + 0.5*lambda_X` or `lambda_X - 2*c`."""
    pieces = []
    for coef, name in zip(coefs, names):
        if coef == 0.0:
            continue

        magnitude = abs(coef)
        body = name if magnitude == 1.0 else f"{magnitude:.12g}*{name}"
        if not pieces:
            pieces.append(body if coef > 0 else f"-{body}")
        else:
            pieces.append(f"+ {body}" if coef > 0 else f"- {body}")

    return " ".join(pieces) if pieces else "0"


def normalize_row(coefs: Sequence[float], rhs: float) -> tuple[tuple[float, ...], float]:
    """Snap tiny coefficients to zero and scale the row so its first non-zero coefficient is 1."""
    coefs = [0.0 if abs(value) < ZERO_TOL else float(value) for value in coefs]
    pivot = next((value for value in coefs if value != 0.0), None)
    if pivot is None:
        return tuple(coefs), float(rhs)

    row = tuple(value / pivot + 0.0 for value in coefs)  # no negative zeros
    rhs = float(rhs) / pivot
    return row, 0.0 if abs(rhs) < ZERO_TOL else rhs


@dataclass(frozen=True)
class LinearConstraint:
    """Rows of `(coefficients over theta, rhs)`; an empty row list leaves theta unconstrained."""

    theta_names: tuple[str, ...]
    rows: tuple[tuple[tuple[float, ...], float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "theta_names", tuple(self.theta_names))
        object.__setattr__(self, "rows", tuple((tuple(map(float, coefs)), float(rhs)) for coefs, rhs in self.rows))
        for coefs, _ in self.rows:
            assert len(coefs) == len(self.theta_names), f"row {coefs} does not match {self.theta_names}"
            assert any(value != 0.0 for value in coefs), "constraint rows must be nontrivial"

    @classmethod
    def build(cls, theta_names: Sequence[str], rows: Sequence[tuple[Sequence[float], float]]) -> "LinearConstraint":
        """Normalize rows, drop trivial and duplicate ones."""
        kept = []
        for coefs, rhs in rows:
            row = normalize_row(coefs, rhs)
            if any(value != 0.0 for value in row[0]) and row not in kept:
                kept.append(row)

        return cls(theta_names=tuple(theta_names), rows=tuple(kept))

    @property
    def empty(self) -> bool:
        return not self.rows

    @property
    def matrix(self) -> tuple[NDArray, NDArray]:
        """(C, d) with one row per equation."""
        coefs = np.array([row for row, _ in self.rows], dtype=np.float64)
        coefs = coefs.reshape(len(self.rows), len(self.theta_names))
        rhs = np.array([rhs for _, rhs in self.rows], dtype=np.float64)
        return coefs, rhs

    @property
    def description(self) -> str:
        if self.empty:
            return "unconstrained"

        return "; ".join(
            f"{format_linear(coefs, self.theta_names)} = {rhs:.12g}" for coefs, rhs in self.rows
        )

    def residuals(self, theta: Union[Sequence[float], NDArray]) -> NDArray:
        coefs, rhs = self.matrix
        return coefs @ np.asarray(theta, dtype=np.float64) - rhs

    def is_satisfied(self, theta: Union[Sequence[float], NDArray], tol: float = 1e-9) -> bool:
        return bool(np.all(np.abs(self.residuals(theta)) <= tol))

    @property
    def feasible(self) -> bool:
        if self.empty:
            return True

        coefs, rhs = self.matrix
        solution = np.linalg.lstsq(coefs, rhs, rcond=None)[0]
        return bool(np.allclose(coefs @ solution, rhs, atol=1e-9))

    def null_space(self) -> NDArray:
        """Orthonormal basis (columns) of directions that keep every row satisfied."""
        if self.empty:
            return np.eye(len(self.theta_names))

        return linalg.null_space(self.matrix[0])

    def free_parameters(self) -> dict[str, Any]:
        basis = self.null_space()
        return {
            "dimension": int(basis.shape[1]),
            "basis": [[float(value) for value in column] for column in basis.T],
        }

    def to_dict(self) -> dict[str, Any]:
        return {
            "theta_names": list(self.theta_names),
            "rows": [{"coefficients": list(coefs), "rhs": rhs} for coefs, rhs in self.rows],
            "description": self.description,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "LinearConstraint":
        """Accepts `to_dict` output or a derivation report with `constraint_rows`."""
        rows = data.get("rows", data.get("constraint_rows", []))
        return cls.build(
            theta_names=data["theta_names"],
            rows=[(row["coefficients"], row.get("rhs", 0.0)) for row in rows],
        )

    @classmethod
    def unconstrained(cls, theta_names: Sequence[str]) -> "LinearConstraint":
        return cls(theta_names=tuple(theta_names))
