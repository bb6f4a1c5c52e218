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
Interventional and observational expectations of a feature as a linear form in a proxy.
"""

import math
from dataclasses import asdict, dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np
from scipy import stats

from ..errors import DegenerateDesign, NonadditiveProxyInfluence, NonlinearEquation
from .expression import Expression, Gaussian, Sum, Term, Var, expected_value
from .model import SEModel
from .root_form import linear_parts, root_form


if TYPE_CHECKING:
    from ..protocol import SampleMatrix


@dataclass(frozen=True)
class LinearForm:
    """`intercept + slope * p` with optional standard errors (zero for closed forms)."""

    slope: float
    intercept: float = 0.0
    slope_stderr: float = 0.0
    intercept_stderr: float = 0.0

    def __call__(self, p):
        return self.intercept + self.slope * p

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


def root_mean(m: SEModel, name: str) -> float:
    expr = m.equation(name)
    if expr is None or not expr.is_exogenous:
        raise NonlinearEquation(name, "root has no exogenous equation")

    try:
        return expected_value(expr)
    except ValueError:
        raise NonlinearEquation(name, f"no closed form mean for {expr.to_text()}") from None


def analytic_marginal(m: SEModel, name: str) -> Optional[tuple[float, float]]:
    """(mean, std) of `name` when it is a linear function of independent Gaussian roots, None otherwise."""
    try:
        form = root_form(m, name)
    except NonlinearEquation:
        return None

    mean, var = form.constant, 0.0
    for key, coef in form.noise.items():
        term = form.noise_terms[key]
        if term.std is None:
            return None

        mean += coef * term.mean
        var += (coef * term.std) ** 2

    for root, coef in form.terms.items():
        try:
            coefs, constant, noise = linear_parts(m, root)
        except NonlinearEquation:
            return None

        if coefs or any(term.std is None for term in noise.values()):
            return None

        mean += coef * constant
        var += coef**2 * sum(term.std**2 for term in noise.values())

    return mean, math.sqrt(var)


def _influence(expr: Expression, influenced: set[str], owner: str, proxy: str) -> dict[str, float]:
    if not set(expr.variables()) & influenced:
        return {}

    if isinstance(expr, Var):
        return {expr.name: 1.0}

    if isinstance(expr, Term):
        return {expr.name: expr.coef}

    if isinstance(expr, Gaussian):
        return _influence(expr.loc, influenced, owner, proxy)

    if isinstance(expr, Sum):
        coefs = {}
        for term in expr.terms:
            for name, coef in _influence(term, influenced, owner, proxy).items():
                coefs[name] = coefs.get(name, 0.0) + coef

        return coefs

    raise NonadditiveProxyInfluence(owner, proxy)


def proxy_slope(m: SEModel, x: str, p: str) -> float:
    """Coefficient mu with X = g(ta(X) without P) + mu * P after an intervention on P.

    Every equation between `p` and `x` must be additive in the terms that carry the influence of `p`;
    the remaining terms may be arbitrary.
    """
    g = m.graph
    g.check_node(x)
    g.check_node(p)
    if x == p:
        return 1.0

    if not g.has_directed_path(p, x):
        return 0.0

    between = [name for name in g.descendants(p) if name == x or g.has_directed_path(name, x)]
    slopes = {p: 1.0}
    for name in g.topological_order():
        if name not in between:
            continue

        expr = m.equation(name)
        if expr is None:
            raise NonlinearEquation(name, "node has no structural equation")

        coefs = _influence(expr, set(slopes), name, p)
        slopes[name] = sum(coef * slopes[parent] for parent, coef in coefs.items())

    return slopes[x]


def interventional_expectation(
    m: SEModel, x: str, p: str, n: Optional[int] = None, seed: Optional[int] = None
) -> LinearForm:
    """E[X | do(P=p)] as `intercept + slope * p`.

    The slope needs additive-linear influence of P on X. The intercept is exact when X is a linear function
    of the roots; otherwise it is the Monte Carlo mean of X under do(P=0), which needs `n` and `seed`.
    """
    slope = proxy_slope(m, x, p)
    try:
        form = root_form(m, x, [p])
        intercept = form.constant
        for root, coef in form.terms.items():
            intercept += coef * root_mean(m, root)

        for key, coef in form.noise.items():
            intercept += coef * form.noise_terms[key].mean

        if not math.isfinite(intercept):
            raise NonlinearEquation(x, "noise without closed form mean upstream")

        return LinearForm(slope=slope, intercept=intercept)
    except NonlinearEquation:
        if n is None or seed is None:
            raise

    from .sampler import do_sample

    column = do_sample(m, {p: 0.0}, n, seed)[x]
    stderr = float(np.std(column, ddof=1) / math.sqrt(n)) if n > 1 else float("inf")
    return LinearForm(slope=slope, intercept=float(np.mean(column)), intercept_stderr=stderr)


def conditional_expectation_fit(data: "SampleMatrix", x: str, p: str) -> LinearForm:
    """Ordinary least squares of column `x` on column `p`, an estimate of E[X | P]."""
    xs, ps = data[x], data[p]
    if len(np.unique(ps)) < 2:
        raise DegenerateDesign(f"Column {p} has fewer than two distinct values, cannot regress {x} on it.")

    result = stats.linregress(ps, xs)
    return LinearForm(
        slope=float(result.slope),
        intercept=float(result.intercept),
        slope_stderr=float(result.stderr),
        intercept_stderr=float(result.intercept_stderr),
    )
