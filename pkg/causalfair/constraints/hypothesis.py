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
Linear hypothesis class R_theta = sum_i lambda_i * input_i (+ c).
"""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Any, Union

import numpy as np
from numpy.typing import NDArray

from ..errors import HypothesisMismatch
from ..graph import CausalGraph, NodeRole


INTERCEPT = "c"


def theta_name(node: str) -> str:
    return f"lambda_{node}"


@dataclass(frozen=True)
class HypothesisClass:
    predictor: str
    inputs: tuple[str, ...]
    intercept: bool = False

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        assert len(set(self.inputs)) == len(self.inputs), f"inputs of {self.predictor} must be distinct"

    @property
    def theta_names(self) -> list[str]:
        names = [theta_name(node) for node in self.inputs]
        if self.intercept:
            names.append(INTERCEPT)

        return names

    @property
    def dim(self) -> int:
        return len(self.inputs) + int(self.intercept)

    def check(self, g: CausalGraph) -> "HypothesisClass":
        """Inputs must be graph nodes and, when the predictor is in the graph, exactly its parents."""
        for name in self.inputs:
            g.check_node(name)

        if self.predictor in g:
            if g.role_of(self.predictor) != NodeRole.PREDICTOR:
                raise HypothesisMismatch(f"Node {self.predictor} is not labeled predictor.")

            parents = g.parents(self.predictor)
            if set(parents) != set(self.inputs):
                raise HypothesisMismatch(
                    f"Predictor {self.predictor} has parents {parents} but the hypothesis reads {list(self.inputs)}."
                )

        return self

    def design(self, columns: Mapping[str, NDArray]) -> NDArray:
        """Design matrix with one column per parameter, the intercept column is all ones."""
        parts = [np.asarray(columns[name], dtype=np.float64) for name in self.inputs]
        size = len(parts[0]) if parts else len(next(iter(columns.values())))
        if self.intercept:
            parts.append(np.ones(size, dtype=np.float64))

        if not parts:
            return np.zeros((size, 0), dtype=np.float64)

        return np.stack(parts, axis=1)

    def evaluate(self, theta: Union[Sequence[float], NDArray], columns: Mapping[str, NDArray]) -> NDArray:
        theta = np.asarray(theta, dtype=np.float64)
        assert theta.shape == (self.dim,), f"theta must have {self.dim} entries, got shape {theta.shape}"
        return self.design(columns) @ theta

    def to_dict(self) -> dict[str, Any]:
        return {"predictor": self.predictor, "inputs": list(self.inputs), "intercept": self.intercept}

    @classmethod
    def from_graph(cls, g: CausalGraph, predictor: str, intercept: bool = False) -> "HypothesisClass":
        return cls(predictor=predictor, inputs=tuple(g.parents(predictor)), intercept=intercept).check(g)
