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
Necessity of proxy adjustment: the predictor r(sum_j (X_j - E[X_j | do(P)]) + mu * P) is free of proxy
discrimination only at mu = 0 when r is strictly monotonic.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any, Optional, Union

from ..estimator import LinkFunction, adjusted_predictor
from ..sem import SamplerConfig, SEModel
from ..utils.logger import Tracker
from ..utils.rng import derive_seed
from .config import ValidatorConfig
from .invariance import InvarianceMode, test_intervention_invariance


ROOT_TOL = 1e-12


@dataclass
class SweepReport:
    link: str
    proxy: str
    features: list[str]
    values: list[float]
    n: int
    seed: int
    points: list[dict[str, Any]] = field(default_factory=list)

    @property
    def pass_set(self) -> list[float]:
        return [point["mu"] for point in self.points if point["passed"]]

    @property
    def expected_pass_set(self) -> list[float]:
        return [point["mu"] for point in self.points if abs(point["mu"]) <= ROOT_TOL]

    @property
    def matches(self) -> bool:
        return self.pass_set == self.expected_pass_set

    def to_dict(self) -> dict[str, Any]:
        return {
            "verdict": "pass" if self.matches else "fail",
            "link": self.link,
            "proxy": self.proxy,
            "features": self.features,
            "values": self.values,
            "n": self.n,
            "seed": self.seed,
            "pass_set": self.pass_set,
            "expected_pass_set": self.expected_pass_set,
            "points": self.points,
        }


def necessity_sweep(
    m: SEModel,
    p: str,
    x: Union[str, Sequence[str]],
    grid: Sequence[float],
    link: Union[str, LinkFunction] = LinkFunction.IDENTITY,
    n: int = 100_000,
    seed: int = 0,
    values: Sequence[float] = (-1.0, 1.0),
    config: Optional[ValidatorConfig] = None,
    sampler_config: Optional[SamplerConfig] = None,
    adjustment_n: Optional[int] = None,
    tracker: Optional[Tracker] = None,
) -> SweepReport:
    """Run the distribution test of the adjusted predictor with direct proxy weight mu for every mu in `grid`.

    All grid points share the arm seeds, so differences between points come from mu alone.

    Raises:
        NonadditiveProxyInfluence: when P does not enter the features additively.
    """
    features = [x] if isinstance(x, str) else list(x)
    link = getattr(link, "value", link)
    report = SweepReport(link=link, proxy=p, features=features, values=[float(v) for v in values], n=n, seed=seed)
    adjustment_seed = derive_seed(seed, "adjustment")
    base = adjusted_predictor(m, p, features, mode="do", link=link, n=adjustment_n, seed=adjustment_seed)
    for step, mu in enumerate(grid):
        predictor = base.with_coefficients(proxy_weight=float(mu))
        result = test_intervention_invariance(
            m,
            predictor,
            p,
            values,
            mode=InvarianceMode.DISTRIBUTION,
            n=n,
            seed=seed,
            config=config,
            sampler_config=sampler_config,
        )
        worst = max(result.pairs, key=lambda pair: pair.comparison.ks_statistic)
        point = {
            "mu": float(mu),
            "passed": result.passed,
            "ks_statistic": worst.comparison.ks_statistic,
            "critical_value": worst.comparison.critical_value,
            "mean_diff": worst.comparison.mean_diff,
        }
        report.points.append(point)
        if tracker is not None:
            tracker.log({f"sweep/{key}": value for key, value in point.items()}, step=step)

    return report
