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
Fitting predictors: equality constrained least squares, adjusted features and the in-expectation form.
"""

from collections.abc import Sequence
from typing import Optional, Union

import numpy as np
from scipy import linalg

from ..constraints import HypothesisClass, LinearConstraint
from ..errors import AdjustmentNotIdentifiable, DegenerateDesign, HypothesisMismatch, InfeasibleConstraint
from ..graph import CausalGraph, adjustment_identifiable
from ..protocol import SampleMatrix
from ..sem import SEModel, conditional_expectation_fit, interventional_expectation
from .links import LinkFunction, get_link
from .predictor import Adjustment, FittedPredictor, PredictorForm


FEASIBILITY_TOL = 1e-9


def _training_info(data: SampleMatrix, loss: float, **extra) -> dict:
    info = {"n": len(data), "seed": data.meta_info.get("seed"), "loss": loss}
    info.update(extra)
    return info


def fit_constrained(
    data: SampleMatrix, h: HypothesisClass, y: str, con: Optional[LinearConstraint] = None
) -> FittedPredictor:
    """Minimize the squared error of R_theta against column `y` subject to `con`.

    Null space elimination: theta = theta_p + N z with theta_p the minimum norm solution of C theta = d and
    N an orthonormal basis of the null space of C, then ordinary least squares in z. Under collinearity the
    minimum norm theta is returned.
    """
    con = con or LinearConstraint.unconstrained(h.theta_names)
    if list(con.theta_names) != h.theta_names:
        raise HypothesisMismatch(f"Constraint is over {list(con.theta_names)}, hypothesis over {h.theta_names}.")

    if len(data) == 0:
        raise DegenerateDesign("Cannot fit a predictor on an empty sample.")

    design = h.design(data.columns)
    target = np.asarray(data[y], dtype=np.float64)
    if not (np.all(np.isfinite(design)) and np.all(np.isfinite(target))):
        raise DegenerateDesign("Training data contains non-finite values.")

    if con.empty:
        theta_p = np.zeros(h.dim)
        basis = np.eye(h.dim)
    else:
        coefs, rhs = con.matrix
        theta_p = np.linalg.lstsq(coefs, rhs, rcond=None)[0]
        residual = float(np.linalg.norm(coefs @ theta_p - rhs))
        if residual > FEASIBILITY_TOL:
            raise InfeasibleConstraint(residual)

        basis = linalg.null_space(coefs)

    if basis.shape[1] > 0:
        reduced = design @ basis
        z, _, rank, _ = np.linalg.lstsq(reduced, target - design @ theta_p, rcond=None)
        theta = theta_p + basis @ z
    else:
        rank = 0
        theta = theta_p

    loss = float(np.mean((design @ theta - target) ** 2))
    predictor = FittedPredictor(
        form=PredictorForm.CONSTRAINED_LINEAR,
        inputs=h.inputs,
        coefficients={name: float(value) for name, value in zip(h.theta_names, theta)},
        constraint=con,
        training=_training_info(
            data,
            loss,
            outcome=y,
            free_parameters=int(basis.shape[1]),
            rank=int(rank),
            tie_break="minimum_norm",
        ),
    )
    assert con.is_satisfied(theta, tol=FEASIBILITY_TOL), f"fitted theta violates {con.description}"
    return predictor


def _fit_readout(data: SampleMatrix, adjustments: Sequence[Adjustment], y: str) -> tuple[dict[str, float], float]:
    """OLS of `y` on the adjusted features plus a bias column."""
    if len(data) == 0:
        raise DegenerateDesign("Cannot fit a predictor on an empty sample.")

    columns = [adjustment.apply(data.columns) for adjustment in adjustments]
    design = np.stack(columns + [np.ones(len(data))], axis=1)
    target = np.asarray(data[y], dtype=np.float64)
    solution = np.linalg.lstsq(design, target, rcond=None)[0]
    loss = float(np.mean((design @ solution - target) ** 2))
    weights = {f"weight_{adjustment.feature}": float(value) for adjustment, value in zip(adjustments, solution)}
    weights["bias"] = float(solution[-1])
    return weights, loss


def adjusted_predictor(
    source: Union[SEModel, SampleMatrix],
    p: str,
    x: Union[str, Sequence[str]],
    mode: str = "do",
    link: Union[str, LinkFunction] = LinkFunction.IDENTITY,
    graph: Optional[CausalGraph] = None,
    data: Optional[SampleMatrix] = None,
    fit_outcome: Optional[str] = None,
    weights: Optional[dict[str, float]] = None,
    proxy_weight: float = 0.0,
    bias: float = 0.0,
    n: Optional[int] = None,
    seed: Optional[int] = None,
) -> FittedPredictor:
    """Predictor r(sum_j w_j (X_j - E[X_j | do(P)]) + bias) on proxy-adjusted features.

    Args:
        source: the model (mode `do`) or observational data (mode `observational`).
        mode: `do` uses the interventional expectation of the model; `observational` regresses X on P
            in `data` and refuses unless every path from an ancestor of P to X goes through P.
        graph: graph for the observational check, taken from `source` when it is a model.
        data: observational sample when `source` is a model, and training data for `fit_outcome`.
        fit_outcome: fit the weights and bias by least squares against this column before the link.
        proxy_weight: extra direct weight on P, zero for a predictor free of proxy discrimination.
        n, seed: Monte Carlo budget for the intercept when the p-free part of X is nonlinear.
    """
    features = [x] if isinstance(x, str) else list(x)
    link = getattr(link, "value", link)
    get_link(link)
    adjustments = []
    if mode == "do":
        if not isinstance(source, SEModel):
            raise ValueError("mode=do needs the structural equation model.")

        for feature in features:
            form = interventional_expectation(source, feature, p, n=n, seed=seed)
            adjustments.append(Adjustment(feature, p, form.slope, form.intercept, "do", form.slope_stderr))
    elif mode == "observational":
        if isinstance(source, SampleMatrix):
            data = source

        graph = source.graph if isinstance(source, SEModel) else graph
        if graph is None or data is None:
            raise ValueError("mode=observational needs the graph and observational data.")

        for feature in features:
            if not adjustment_identifiable(graph, p, feature):
                raise AdjustmentNotIdentifiable(p, feature)

            form = conditional_expectation_fit(data, feature, p)
            adjustments.append(
                Adjustment(feature, p, form.slope, form.intercept, "observational", form.slope_stderr)
            )
    else:
        raise ValueError(f"Unknown adjustment mode {mode}, expected `do` or `observational`.")

    coefficients = {f"weight_{feature}": 1.0 for feature in features}
    coefficients.update(weights or {})
    coefficients["proxy_weight"] = float(proxy_weight)
    coefficients["bias"] = float(bias)
    training = {"mode": mode}
    if fit_outcome is not None:
        if data is None:
            raise ValueError("fit_outcome needs training data.")

        fitted, loss = _fit_readout(data, adjustments, fit_outcome)
        coefficients.update(fitted)
        training.update(_training_info(data, loss, outcome=fit_outcome))

    return FittedPredictor(
        form=PredictorForm.ADJUSTED,
        inputs=tuple(features + [p]),
        coefficients=coefficients,
        link=link,
        adjustments=tuple(adjustments),
        training=training,
    )


def expectation_predictor(
    m: SEModel, p: str, x: str, lam: float, c: float, n: Optional[int] = None, seed: Optional[int] = None
) -> FittedPredictor:
    """R = lam * (X - E[X | do(P)]) + c, so that E[R | do(P=p)] = c for every p."""
    form = interventional_expectation(m, x, p, n=n, seed=seed)
    return FittedPredictor(
        form=PredictorForm.EXPECTATION,
        inputs=(x, p),
        coefficients={"lambda": float(lam), "c": float(c)},
        adjustments=(Adjustment(x, p, form.slope, form.intercept, "do", form.slope_stderr),),
        training={"mode": "do"},
    )
