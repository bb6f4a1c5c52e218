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
Two structural equation models with different graphs and the same joint distribution over
(A, Y, X1, X2, Rstar). With X1 resolving, Rstar discriminates in the right graph but not in the left one,
so no observational criterion can decide unresolved discrimination.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
from numpy.typing import NDArray
from scipy.special import expit

from ..dsl import load_model
from ..graph import unresolved_discrimination
from ..protocol import SampleMatrix
from ..sem import SamplerConfig, SEModel, sample
from ..utils.logger import Tracker
from ..utils.py_functional import timer
from ..utils.rng import derive_seed
from .config import ValidatorConfig
from .invariance import compare_samples


LEFT_MODEL = """\
node A role=protected
node X1 role=resolving
node Y role=outcome
node X2 role=feature
node Rstar role=predictor
node Rtilde role=predictor
edge A -> X1
edge X1 -> Y
edge A -> X2
edge X1 -> X2
edge X1 -> Rstar
edge X2 -> Rtilde
eq A = bern_pm(0.5)
eq X1 = mix2(A + 1, 1, A + -1, 1, 2*A)
eq Y = bern_pm(sigmoid(2*X1))
eq X2 = X1 + -1*A
eq Rstar = X1
eq Rtilde = X2
predictor Rstar inputs=(X1)
predictor Rtilde inputs=(X2)
"""

RIGHT_MODEL = """\
node A role=protected
node Y role=outcome
node X2 role=feature
node X1 role=resolving
node Rstar role=predictor
node Rtilde role=predictor
edge A -> Y
edge Y -> X2
edge X2 -> Rstar
edge A -> Rstar
edge A -> X1
edge X2 -> X1
edge X2 -> Rtilde
eq A = bern_pm(0.5)
eq Y = bern_pm(sigmoid(2*A))
eq X2 = normal(Y, 1)
eq X1 = A + X2
eq Rstar = A + X2
eq Rtilde = X2
predictor Rstar inputs=(A,X2)
predictor Rtilde inputs=(X2)
"""

COMPARED_COLUMNS = ("X1", "X2", "Rstar")
RESOLVING = ("X1",)


def theorem1_models() -> tuple[SEModel, SEModel]:
    left = load_model(LEFT_MODEL, name="theorem1_left").require_model()
    right = load_model(RIGHT_MODEL, name="theorem1_right").require_model()
    return left, right


@dataclass
class Theorem1Report:
    n: int
    seed: int
    alpha: float
    seeds: dict[str, int]
    joint: list[dict[str, Any]] = field(default_factory=list)
    audits: dict[str, dict[str, Any]] = field(default_factory=dict)
    equal_odds: list[dict[str, Any]] = field(default_factory=list)
    calibration: list[dict[str, Any]] = field(default_factory=list)

    @property
    def joint_agreement(self) -> bool:
        return all(item["passed"] for item in self.joint)

    @property
    def audit_verdicts(self) -> bool:
        return self.audits["left"]["verdict"] is False and self.audits["right"]["verdict"] is True

    @property
    def equal_odds_pass(self) -> bool:
        return all(item["passed"] for item in self.equal_odds)

    @property
    def calibration_pass(self) -> bool:
        return all(item["passed"] for item in self.calibration)

    @property
    def passed(self) -> bool:
        return self.joint_agreement and self.audit_verdicts and self.equal_odds_pass and self.calibration_pass

    def to_dict(self) -> dict[str, Any]:
        return {
            "verdict": "pass" if self.passed else "fail",
            "n": self.n,
            "seed": self.seed,
            "alpha": self.alpha,
            "seeds": self.seeds,
            "joint_agreement": self.joint_agreement,
            "audit_verdicts": self.audit_verdicts,
            "equal_odds": self.equal_odds_pass,
            "calibration": self.calibration_pass,
            "details": {
                "joint": self.joint,
                "audits": self.audits,
                "equal_odds": self.equal_odds,
                "calibration": self.calibration,
            },
        }


def _conditions(data: SampleMatrix) -> dict[str, NDArray]:
    return {
        "all": np.ones(len(data), dtype=bool),
        "A=1": data["A"] == 1.0,
        "A=-1": data["A"] == -1.0,
        "Y=1": data["Y"] == 1.0,
        "Y=-1": data["Y"] == -1.0,
    }


def _joint_agreement(left: SampleMatrix, right: SampleMatrix, config: ValidatorConfig) -> list[dict[str, Any]]:
    left_masks, right_masks = _conditions(left), _conditions(right)
    results = []
    for column in COMPARED_COLUMNS:
        for condition in left_masks:
            comparison = compare_samples(
                left[column][left_masks[condition]],
                right[column][right_masks[condition]],
                config.alpha,
                config.mean_sigma,
            )
            results.append(
                {
                    "column": column,
                    "condition": condition,
                    "ks_statistic": comparison.ks_statistic,
                    "critical_value": comparison.critical_value,
                    "mean_diff": comparison.mean_diff,
                    "passed": comparison.distribution_pass,
                }
            )

    return results


def _equal_odds(graph: str, data: SampleMatrix, config: ValidatorConfig) -> list[dict[str, Any]]:
    """Rtilde = X2 must be independent of A within each outcome stratum."""
    results = []
    for y in (1.0, -1.0):
        stratum = data["Y"] == y
        comparison = compare_samples(
            data["X2"][stratum & (data["A"] == 1.0)],
            data["X2"][stratum & (data["A"] == -1.0)],
            config.alpha,
            config.mean_sigma,
        )
        results.append(
            {
                "graph": graph,
                "stratum": f"Y={y:g}",
                "ks_statistic": comparison.ks_statistic,
                "critical_value": comparison.critical_value,
                "passed": comparison.distribution_pass,
            }
        )

    return results


def _binned_calibration(
    graph: str, score: NDArray, outcome: NDArray, closed_form: str, config: ValidatorConfig, bin_sigma: float
) -> list[dict[str, Any]]:
    """Empirical P(Y=1) per quantile bin of `score` against the bin mean of sigmoid(2 * score)."""
    edges = np.unique(np.quantile(score, np.linspace(0.0, 1.0, config.num_bins + 1)))
    codes = np.clip(np.searchsorted(edges, score, side="right") - 1, 0, len(edges) - 2)
    results = []
    for index in range(len(edges) - 1):
        rows = codes == index
        count = int(rows.sum())
        if count < config.min_bin_rows:
            continue

        observed = float(np.mean(outcome[rows] == 1.0))
        expected = float(np.mean(expit(2.0 * score[rows])))
        stderr = math.sqrt(expected * (1.0 - expected) / count)
        results.append(
            {
                "graph": graph,
                "closed_form": closed_form,
                "bin": [float(edges[index]), float(edges[index + 1])],
                "count": count,
                "observed": observed,
                "expected": expected,
                "stderr": stderr,
                "passed": abs(observed - expected) <= bin_sigma * stderr + 1e-12,
            }
        )

    return results


def reproduce_theorem1(
    n: int = 100_000,
    seed: int = 0,
    config: Optional[ValidatorConfig] = None,
    sampler_config: Optional[SamplerConfig] = None,
    bin_sigma: float = 3.0,
    tracker: Optional[Tracker] = None,
) -> Theorem1Report:
    """Sample both models, compare their joint distributions, audit Rstar with X1 resolving, check equal
    odds of Rtilde and the closed form P(Y=1 | score) = sigmoid(2 * score) of the optimal score."""
    config = config or ValidatorConfig()
    left_model, right_model = theorem1_models()
    seeds = {"left": derive_seed(seed, "left"), "right": derive_seed(seed, "right")}
    timing_raw: dict[str, float] = {}
    with timer("sample", timing_raw):
        left = sample(left_model, n, seeds["left"], sampler_config)
        right = sample(right_model, n, seeds["right"], sampler_config)

    report = Theorem1Report(n=n, seed=seed, alpha=config.alpha, seeds=seeds)
    with timer("compare", timing_raw):
        report.joint = _joint_agreement(left, right, config)
        report.audits = {
            "left": unresolved_discrimination(left_model.graph, "Rstar", resolving=RESOLVING).to_dict(),
            "right": unresolved_discrimination(right_model.graph, "Rstar", resolving=RESOLVING).to_dict(),
        }
        report.equal_odds = _equal_odds("left", left, config) + _equal_odds("right", right, config)
        report.calibration = _binned_calibration(
            "left", left["X1"], left["Y"], "sigmoid(2*X1)", config, bin_sigma
        ) + _binned_calibration(
            "right", right["A"] + right["X2"], right["Y"], "sigmoid(2*(A + X2))", config, bin_sigma
        )

    if tracker is not None:
        tracker.log(
            {
                "theorem1/joint_agreement": report.joint_agreement,
                "theorem1/audit_verdicts": report.audit_verdicts,
                "theorem1/equal_odds": report.equal_odds_pass,
                "theorem1/calibration": report.calibration_pass,
                **{f"timing_s/{key}": value for key, value in timing_raw.items()},
            }
        )

    return report
