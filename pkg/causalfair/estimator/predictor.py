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
Fitted predictors and their JSON form.

constrained_linear:  R = sum_i lambda_i * input_i (+ c)
adjusted:            R = r(sum_j w_j * (X_j - a_j - s_j * P) + proxy_weight * P + bias)
expectation:         R = lambda * (X - a - s * P) + c
"""

from collections.abc import Mapping
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

import numpy as np
from numpy.typing import NDArray

from ..constraints import LinearConstraint
from .links import get_link


class PredictorForm(str, Enum):
    """
    Using an enumeration class to avoid spelling errors in predictor forms
    """

    CONSTRAINED_LINEAR = "constrained_linear"
    ADJUSTED = "adjusted"
    EXPECTATION = "expectation"


@dataclass(frozen=True)
class Adjustment:
    """E[feature | do(proxy=p)] (or E[feature | proxy=p]) as `intercept + slope * p`."""

    feature: str
    proxy: str
    slope: float
    intercept: float = 0.0
    source: str = "do"
    slope_stderr: float = 0.0

    def apply(self, columns: Mapping[str, NDArray]) -> NDArray:
        return np.asarray(columns[self.feature]) - self.intercept - self.slope * np.asarray(columns[self.proxy])

    def to_dict(self) -> dict[str, Any]:
        return {
            "feature": self.feature,
            "proxy": self.proxy,
            "slope": self.slope,
            "intercept": self.intercept,
            "source": self.source,
            "slope_stderr": self.slope_stderr,
        }


@dataclass(frozen=True)
class FittedPredictor:
    form: PredictorForm
    inputs: tuple[str, ...]
    """columns read by the predictor"""
    coefficients: dict[str, float]
    link: str = "identity"
    adjustments: tuple[Adjustment, ...] = ()
    constraint: Optional[LinearConstraint] = None
    training: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "form", PredictorForm(self.form))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        get_link(self.link)

    @property
    def theta(self) -> NDArray:
        assert self.form == PredictorForm.CONSTRAINED_LINEAR, "theta is only defined for linear predictors"
        return np.array(list(self.coefficients.values()), dtype=np.float64)

    def evaluate(self, columns: Mapping[str, NDArray]) -> NDArray:
        size = len(next(iter(columns.values()))) if columns else 0
        if self.form == PredictorForm.CONSTRAINED_LINEAR:
            total = np.zeros(size, dtype=np.float64)
            for name, value in self.coefficients.items():
                if name == "c":
                    total = total + value
                else:
                    total = total + value * np.asarray(columns[name.removeprefix("lambda_")], dtype=np.float64)

            return total

        if self.form == PredictorForm.EXPECTATION:
            adjusted = self.adjustments[0].apply(columns)
            return self.coefficients["lambda"] * adjusted + self.coefficients["c"]

        total = np.full(size, self.coefficients.get("bias", 0.0), dtype=np.float64)
        for adjustment in self.adjustments:
            total = total + self.coefficients.get(f"weight_{adjustment.feature}", 1.0) * adjustment.apply(columns)

        proxy_weight = self.coefficients.get("proxy_weight", 0.0)
        if proxy_weight != 0.0:
            total = total + proxy_weight * np.asarray(columns[self.adjustments[0].proxy], dtype=np.float64)

        return get_link(self.link)(total)

    def constraint_check(self) -> Optional[dict[str, Any]]:
        if self.constraint is None:
            return None

        residuals = self.constraint.residuals(self.theta)
        max_residual = float(np.max(np.abs(residuals))) if len(residuals) else 0.0
        return {
            "description": self.constraint.description,
            "max_residual": max_residual,
            "satisfied": max_residual <= 1e-9,
        }

    def with_coefficients(self, **updates: float) -> "FittedPredictor":
        coefficients = dict(self.coefficients)
        coefficients.update(updates)
        return FittedPredictor(
            form=self.form,
            inputs=self.inputs,
            coefficients=coefficients,
            link=self.link,
            adjustments=self.adjustments,
            constraint=self.constraint,
            training=dict(self.training),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "form": self.form.value,
            "inputs": list(self.inputs),
            "link": self.link,
            "coefficients": dict(self.coefficients),
            "adjustments": [adjustment.to_dict() for adjustment in self.adjustments],
            "constraint": None if self.constraint is None else self.constraint.to_dict(),
            "constraint_check": self.constraint_check(),
            "training": dict(self.training),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "FittedPredictor":
        constraint = data.get("constraint")
        return cls(
            form=PredictorForm(data["form"]),
            inputs=tuple(data["inputs"]),
            coefficients={name: float(value) for name, value in data["coefficients"].items()},
            link=data.get("link", "identity"),
            adjustments=tuple(Adjustment(**adjustment) for adjustment in data.get("adjustments", [])),
            constraint=None if constraint is None else LinearConstraint.from_dict(constraint),
            training=dict(data.get("training", {})),
        )
