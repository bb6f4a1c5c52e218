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
Exception hierarchy shared by all modules.
Every family also derives from ValueError, so `except ValueError` keeps working.
"""

from typing import Optional, Sequence


class CausalFairError(Exception):
    """Base class of every error raised on purpose by causalfair."""


# graph


class GraphError(CausalFairError, ValueError):
    pass


class CycleDetected(GraphError):
    def __init__(self, cycle: Sequence[str]):
        self.cycle = list(cycle)
        super().__init__(f"Edges form a directed cycle: {' -> '.join(self.cycle)}.")


class DuplicateNode(GraphError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Node {name} is declared more than once.")


class UnknownEndpoint(GraphError):
    def __init__(self, parent: str, child: str, missing: str):
        self.edge = (parent, child)
        self.missing = missing
        super().__init__(f"Edge {parent} -> {child} refers to undeclared node {missing}.")


class MultipleProtected(GraphError):
    def __init__(self, names: Sequence[str]):
        self.names = list(names)
        super().__init__(f"Exactly one protected node is allowed, got {', '.join(self.names)}.")


class UnknownNode(GraphError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Unknown node {name}.")


class EndpointInBlockerSet(GraphError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Path endpoint {name} cannot be part of the blocking set.")


class ProxyInInputSet(GraphError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Input {name} is labeled proxy; unawareness needs proxy-free inputs.")


class RoleMismatch(GraphError):
    def __init__(self, name: str, expected: str, actual: str):
        self.name = name
        self.expected = expected
        self.actual = actual
        super().__init__(f"Node {name} must have role {expected}, got {actual}.")


class InvalidRole(GraphError):
    pass


class MissingProtected(GraphError):
    def __init__(self):
        super().__init__("The graph has no protected node.")


# structural equation models


class ModelError(CausalFairError, ValueError):
    pass


class OrphanEquation(ModelError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Equation for {name} has no matching node in the graph.")


class MissingEquation(ModelError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Node {name} has no structural equation.")


class NonParentReference(ModelError):
    def __init__(self, owner: str, reference: str):
        self.owner = owner
        self.reference = reference
        super().__init__(f"Equation of {owner} references {reference}, which is not a parent of {owner}.")


class BadNoiseParam(ModelError):
    def __init__(self, owner: str, detail: str):
        self.owner = owner
        super().__init__(f"Bad noise parameter in equation of {owner}: {detail}.")


class NonlinearEquation(ModelError):
    def __init__(self, name: str, detail: str = "equation is not linear"):
        self.name = name
        super().__init__(f"Node {name}: {detail}.")


class NonadditiveProxyInfluence(ModelError):
    def __init__(self, name: str, proxy: str):
        self.name = name
        self.proxy = proxy
        super().__init__(f"Influence of {proxy} on {name} is not additive and linear.")


# constraints


class ConstraintError(CausalFairError, ValueError):
    pass


class ProxyNotInput(ConstraintError):
    def __init__(self, proxy: str):
        self.proxy = proxy
        super().__init__(
            f"Proxy {proxy} is not an input of the predictor; "
            "use the unawareness check (unawareness_safe) instead of a constraint."
        )


class Inexpressible(ConstraintError):
    pass


class ProtectedNotRoot(ConstraintError):
    def __init__(self, name: str, parents: Sequence[str]):
        self.name = name
        super().__init__(
            f"Protected node {name} has parents {', '.join(parents)} after the intervention; "
            "conditioning on it no longer equals intervening on it."
        )


class HypothesisMismatch(ConstraintError):
    pass


# estimation


class EstimationError(CausalFairError, ValueError):
    pass


class DegenerateDesign(EstimationError):
    pass


class InfeasibleConstraint(EstimationError):
    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"Constraint system has no solution (residual {residual:.3g}).")


class AdjustmentNotIdentifiable(EstimationError):
    def __init__(self, proxy: str, feature: str):
        self.proxy = proxy
        self.feature = feature
        super().__init__(
            f"E[{feature}|do({proxy})] differs from E[{feature}|{proxy}] in general: "
            f"some directed path from an ancestor of {proxy} to {feature} bypasses {proxy}."
        )


# validation


class ValidationError(CausalFairError, ValueError):
    pass


class TooFewBins(ValidationError):
    pass


# dsl


class DSLError(CausalFairError, ValueError):
    pass


class ModelParseError(DSLError):
    def __init__(self, diagnostics: Sequence["object"], source: Optional[str] = None):
        self.diagnostics = list(diagnostics)
        self.source = source
        prefix = f"{source}:" if source else ""
        lines = [f"{prefix}{diag}" for diag in self.diagnostics]
        super().__init__("\n".join(lines))
