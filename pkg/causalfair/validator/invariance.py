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
Monte Carlo tests of invariance of a predictor under interventions on a proxy.

Every do-arm is sampled with its own seed derived from the master seed, so arms are independent samples
rather than coupled counterfactuals. Both the KS statistic and the mean difference are always recorded.
"""

import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Any, Optional

import numpy as np
from numpy.typing import NDArray
from scipy import stats

from ..errors import TooFewBins
from ..estimator import FittedPredictor
from ..sem import SamplerConfig, SEModel, do_sample
from ..utils.logger import Tracker
from ..utils.py_functional import timer
from ..utils.rng import derive_seed
from .config import ValidatorConfig


class InvarianceMode(str, Enum):
    """
    Using an enumeration class to avoid spelling errors in test modes
    """

    DISTRIBUTION = "distribution"
    EXPECTATION = "expectation"
    INDIVIDUAL = "individual"


def ks_critical_value(alpha: float, n: int, m: int) -> float:
    """Asymptotic two-sample KS critical value c(alpha) * sqrt((n + m) / (n m))."""
    return math.sqrt(-math.log(alpha / 2.0) / 2.0) * math.sqrt((n + m) / (n * m))


@dataclass(frozen=True)
class SampleComparison:
    size: tuple[int, int]
    ks_statistic: float
    ks_pvalue: float
    critical_value: float
    mean_diff: float
    pooled_sd: float
    mean_threshold: float
    distribution_pass: bool
    expectation_pass: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "size": list(self.size),
            "ks_statistic": self.ks_statistic,
            "ks_pvalue": self.ks_pvalue,
            "critical_value": self.critical_value,
            "mean_diff": self.mean_diff,
            "pooled_sd": self.pooled_sd,
            "mean_threshold": self.mean_threshold,
            "distribution_pass": self.distribution_pass,
            "expectation_pass": self.expectation_pass,
        }


def compare_samples(first: NDArray, second: NDArray, alpha: float = 0.01, mean_sigma: float = 4.0) -> SampleComparison:
    """Two-sample KS and mean difference with the fixed decision rules."""
    n, m = len(first), len(second)
    assert n > 1 and m > 1, f"need at least two rows per sample, got {n} and {m}"
    result = stats.ks_2samp(first, second)
    critical = ks_critical_value(alpha, n, m)
    mean_diff = float(np.mean(first) - np.mean(second))
    pooled_sd = math.sqrt((float(np.var(first, ddof=1)) + float(np.var(second, ddof=1))) / 2.0)
    threshold = mean_sigma * pooled_sd / math.sqrt(min(n, m))
    return SampleComparison(
        size=(n, m),
        ks_statistic=float(result.statistic),
        ks_pvalue=float(result.pvalue),
        critical_value=critical,
        mean_diff=mean_diff,
        pooled_sd=pooled_sd,
        mean_threshold=threshold,
        distribution_pass=float(result.statistic) < critical,
        expectation_pass=abs(mean_diff) < threshold or mean_diff == 0.0,
    )


@dataclass
class PairResult:
    values: tuple[float, float]
    comparison: Optional[SampleComparison] = None
    bins: list[dict[str, Any]] = field(default_factory=list)
    passed: bool = False

    def to_dict(self) -> dict[str, Any]:
        result = {"values": list(self.values), "passed": self.passed}
        if self.comparison is not None:
            result.update(self.comparison.to_dict())

        if self.bins:
            result["bins"] = self.bins

        return result


@dataclass
class InterventionTestReport:
    mode: InvarianceMode
    proxy: str
    values: list[float]
    n: int
    seed: int
    alpha: float
    decision_rule: str
    arm_seeds: list[int]
    pairs: list[PairResult] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(pair.passed for pair in self.pairs)

    def to_dict(self) -> dict[str, Any]:
        return {
            "mode": self.mode.value,
            "proxy": self.proxy,
            "values": self.values,
            "verdict": "pass" if self.passed else "fail",
            "n": self.n,
            "seed": self.seed,
            "alpha": self.alpha,
            "decision_rule": self.decision_rule,
            "arm_seeds": self.arm_seeds,
            "pairs": [pair.to_dict() for pair in self.pairs],
            "notes": self.notes,
        }


def _decision_rule(mode: InvarianceMode, config: ValidatorConfig) -> str:
    if mode == InvarianceMode.EXPECTATION:
        return f"|mean difference| < {config.mean_sigma:g} * pooled sd / sqrt(n)"

    rule = f"KS statistic < sqrt(-ln(alpha / 2) / 2) * sqrt((n + m) / (n m)), alpha = {config.alpha:g}"
    if mode == InvarianceMode.INDIVIDUAL:
        rule += f", in every feature bin with at least {config.min_bin_rows} rows per arm"

    return rule


def _bin_codes(features: list[NDArray], num_bins: int, names: Sequence[str]) -> list[NDArray]:
    """Quantile bin index of every row, bins fitted on the pooled rows of both arms."""
    codes = []
    for name, pooled in zip(names, features):
        edges = np.unique(np.quantile(pooled, np.linspace(0.0, 1.0, num_bins + 1)))
        if len(edges) < 2:
            raise TooFewBins(f"Feature {name} is constant, individual mode cannot form bins.")

        codes.append(np.clip(np.searchsorted(edges, pooled, side="right") - 1, 0, len(edges) - 2))

    return codes


def _individual_pair(
    first: dict[str, NDArray],
    second: dict[str, NDArray],
    features: Sequence[str],
    config: ValidatorConfig,
) -> tuple[list[dict[str, Any]], bool]:
    if not features:
        raise TooFewBins("Individual mode needs at least one conditioning feature.")

    size = len(first["R"])
    pooled = [np.concatenate([first[name], second[name]]) for name in features]
    codes = _bin_codes(pooled, config.num_bins, features)
    keys = np.stack(codes, axis=1)
    cells, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    outcome = np.concatenate([first["R"], second["R"]])
    arm = np.arange(2 * size) >= size
    bins = []
    for cell_index, cell in enumerate(cells):
        rows = inverse == cell_index
        left, right = outcome[rows & ~arm], outcome[rows & arm]
        if min(len(left), len(right)) < config.min_bin_rows:
            continue

        comparison = compare_samples(left, right, config.alpha, config.mean_sigma)
        cell_stats = {"bin": [int(code) for code in cell], **comparison.to_dict()}
        bins.append({**cell_stats, "passed": comparison.distribution_pass})

    if not bins:
        raise TooFewBins(f"No feature bin has {config.min_bin_rows} rows in both arms.")

    return bins, all(item["passed"] for item in bins)


def test_intervention_invariance(
    m: SEModel,
    pred: FittedPredictor,
    p: str,
    values: Sequence[float],
    mode: str = InvarianceMode.DISTRIBUTION,
    n: int = 100_000,
    seed: int = 0,
    config: Optional[ValidatorConfig] = None,
    sampler_config: Optional[SamplerConfig] = None,
    features: Optional[Sequence[str]] = None,
    pairs: Optional[Sequence[tuple[int, int]]] = None,
    tracker: Optional[Tracker] = None,
) -> InterventionTestReport:
    """Sample do(P=v) for every value, evaluate the predictor and test every unordered pair of arms.

    Args:
        mode: `distribution` (two-sample KS), `expectation` (mean difference) or `individual` (KS inside
            every quantile bin of the features).
        features: conditioning features of individual mode, defaults to the non-proxy predictor inputs.
        pairs: explicit index pairs into `values` instead of all unordered pairs.
    """
    config = config or ValidatorConfig()
    mode = InvarianceMode(mode)
    m.graph.check_node(p)
    values = [float(value) for value in values]
    if len(values) < 2:
        raise ValueError(f"Need at least two intervention values, got {values}.")

    if n < 2:
        raise ValueError(f"Need at least two rows per arm, got n={n}.")

    if features is None:
        features = [name for name in pred.inputs if name != p]

    for name in features:
        m.graph.check_node(name)

    arm_seeds = [derive_seed(seed, "arm", i) for i in range(len(values))]

    def sample_arm(index: int) -> dict[str, NDArray]:
        data = do_sample(m, {p: values[index]}, n, arm_seeds[index], sampler_config, include_latent=True)
        columns = {"R": pred.evaluate(data.columns)}
        if mode == InvarianceMode.INDIVIDUAL:
            columns.update({name: data[name] for name in features})

        return columns

    timing_raw: dict[str, float] = {}
    with timer("sample_arms", timing_raw):
        if config.threads > 1:
            with ThreadPoolExecutor(max_workers=min(config.threads, len(values))) as executor:
                arms = list(executor.map(sample_arm, range(len(values))))
        else:
            arms = [sample_arm(index) for index in range(len(values))]

    report = InterventionTestReport(
        mode=mode,
        proxy=p,
        values=values,
        n=n,
        seed=seed,
        alpha=config.alpha,
        decision_rule=_decision_rule(mode, config),
        arm_seeds=arm_seeds,
    )
    if mode == InvarianceMode.INDIVIDUAL:
        report.notes.append(
            f"conditioning on X=x is approximated by {config.num_bins} quantile bins per feature "
            f"({', '.join(features)}), fitted on the pooled rows of each pair"
        )

    for i, j in pairs if pairs is not None else combinations(range(len(values)), 2):
        pair = PairResult(values=(values[i], values[j]))
        with timer("compare", timing_raw):
            pair.comparison = compare_samples(arms[i]["R"], arms[j]["R"], config.alpha, config.mean_sigma)
            if mode == InvarianceMode.DISTRIBUTION:
                pair.passed = pair.comparison.distribution_pass
            elif mode == InvarianceMode.EXPECTATION:
                pair.passed = pair.comparison.expectation_pass
            else:
                pair.bins, pair.passed = _individual_pair(arms[i], arms[j], features, config)

        report.pairs.append(pair)
        if tracker is not None:
            tracker.log(
                {
                    "pair/values": f"{values[i]:g},{values[j]:g}",
                    "pair/ks_statistic": pair.comparison.ks_statistic,
                    "pair/mean_diff": pair.comparison.mean_diff,
                    "pair/passed": pair.passed,
                    **{f"timing_s/{key}": value for key, value in timing_raw.items()},
                }
            )

    return report


test_intervention_invariance.__test__ = False  # not a pytest test


def calibrate(
    m: SEModel,
    pred: FittedPredictor,
    p: str,
    values: Sequence[float],
    repetitions: int = 100,
    n: int = 10_000,
    seed: int = 0,
    mode: str = InvarianceMode.DISTRIBUTION,
    config: Optional[ValidatorConfig] = None,
    sampler_config: Optional[SamplerConfig] = None,
) -> dict[str, Any]:
    """Repeat the test with independent seeds and count failures: the false positive rate on a null
    predictor, or the power on a discriminating one."""
    failures = 0
    for repetition in range(repetitions):
        report = test_intervention_invariance(
            m,
            pred,
            p,
            values,
            mode=mode,
            n=n,
            seed=derive_seed(seed, "calibration", repetition),
            config=config,
            sampler_config=sampler_config,
        )
        failures += int(not report.passed)

    return {
        "mode": InvarianceMode(mode).value,
        "repetitions": repetitions,
        "n": n,
        "seed": seed,
        "failures": failures,
        "failure_rate": failures / repetitions if repetitions else 0.0,
    }
