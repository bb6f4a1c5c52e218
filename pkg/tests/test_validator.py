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

import json
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from causalfair import validator
from causalfair.constraints import derive_proxy_constraint
from causalfair.dsl import load_model
from causalfair.errors import TooFewBins
from causalfair.estimator import FittedPredictor, adjusted_predictor, expectation_predictor, fit_constrained
from causalfair.graph import build_graph, unawareness_safe
from causalfair.sem import BernoulliPM, Const, Gaussian, SEModel, Term, sample
from causalfair.sem.expression import make_sum
from causalfair.utils.logger import Tracker


MODELS_DIR = Path(__file__).resolve().parent.parent / "models"

UNAWARE = """\
node A role=protected
node P role=proxy
node Z role=feature
node X role=feature
node R role=predictor
node S role=predictor
edge A -> P
edge A -> Z
edge P -> X
edge Z -> R
edge X -> S
eq A = bern_pm(0.5)
eq P = 0.8*A + normal(0, 1)
eq Z = A + normal(0, 1)
eq X = 0.5*P + normal(0, 1)
predictor R inputs=(Z)
predictor S inputs=(X)
"""


def _fig3():
    compiled = load_model(MODELS_DIR / "fig3.cfm")
    return compiled.require_model(), compiled.hypothesis("R")


def _constrained_and_ols():
    m, h = _fig3()
    data = sample(m, 20_000, seed=0)
    constrained = fit_constrained(data, h, "Y", derive_proxy_constraint(m, h, "P").constraint)
    return m, constrained, fit_constrained(data, h, "Y")


def _linear(**coefficients: float) -> FittedPredictor:
    inputs = tuple(name.removeprefix("lambda_") for name in coefficients if name != "c")
    return FittedPredictor(form="constrained_linear", inputs=inputs, coefficients=coefficients)


def _random_additive_model(seed: int) -> SEModel:
    """A -> P -> X plus up to three extra features, every equation a sum of parents and Gaussian noise."""
    rng = np.random.default_rng(seed)
    extras = [f"W{i}" for i in range(int(rng.integers(0, 4)))]
    order = ["A", *extras[: len(extras) // 2], "P", *extras[len(extras) // 2 :], "X"]
    edges = {("A", "P"), ("P", "X")}
    for i, child in enumerate(order):
        for parent in order[:i]:
            if child != "A" and rng.random() < 0.5:
                edges.add((parent, child))

    roles = {"A": "protected", "P": "proxy"}
    g = build_graph([(name, roles.get(name, "feature")) for name in order], sorted(edges))
    equations = {"A": BernoulliPM(Const(0.5))}
    for name in order[1:]:
        terms = [Term(float(rng.choice([-1.0, 1.0]) * rng.uniform(0.3, 1.0)), parent) for parent in g.parents(name)]
        equations[name] = make_sum([*terms, Gaussian(Const(0.0), float(rng.uniform(0.5, 1.0)))])

    return SEModel(graph=g, equations=equations, name=f"additive{seed}")


def test_ks_critical_value():
    assert validator.ks_critical_value(0.05, 100, 100) == pytest.approx(0.19206, abs=1e-4)
    assert validator.ks_critical_value(0.01, 400, 100) < validator.ks_critical_value(0.01, 100, 100)
    assert validator.ks_critical_value(0.01, 100_000, 100_000) == pytest.approx(0.00728, abs=1e-4)


def test_compare_samples():
    rng = np.random.default_rng(0)
    first = rng.standard_normal(5000)
    comparison = validator.compare_samples(first, first.copy())
    assert comparison.ks_statistic == 0.0
    assert comparison.distribution_pass and comparison.expectation_pass

    comparison = validator.compare_samples(first, first + 1.0)
    assert comparison.mean_diff == pytest.approx(-1.0)
    assert not comparison.distribution_pass and not comparison.expectation_pass

    # same mean, different spread
    comparison = validator.compare_samples(first, 3.0 * rng.standard_normal(5000))
    assert not comparison.distribution_pass


def test_distribution_mode():
    m, constrained, ols = _constrained_and_ols()
    values = [-1.0, 1.0, 0.0, 2.0]
    report = validator.test_intervention_invariance(m, constrained, "P", values, pairs=[(0, 1), (2, 3)])
    assert report.passed
    assert [pair.values for pair in report.pairs] == [(-1.0, 1.0), (0.0, 2.0)]
    assert len(set(report.arm_seeds)) == 4
    result = report.to_dict()
    assert result["verdict"] == "pass"
    assert result["mode"] == "distribution"
    assert result["n"] == 100_000
    assert "alpha = 0.01" in result["decision_rule"]

    report = validator.test_intervention_invariance(m, ols, "P", values, pairs=[(0, 1), (2, 3)])
    assert not any(pair.passed for pair in report.pairs)
    assert report.pairs[0].comparison.mean_diff == pytest.approx(-3.0, abs=0.1)


@pytest.mark.parametrize("index", [0, 1, 2])
def test_constraint_soundness_and_necessity(index: int):
    m, h = _fig3()
    constraint = derive_proxy_constraint(m, h, "P").constraint
    rng = np.random.default_rng(index)
    first = float(rng.uniform(-2.0, 2.0))
    second = first + float(rng.choice([-1.0, 1.0]) * rng.uniform(1.0, 2.0))
    lam_x = (-1.0, 0.5, 2.0)[index]

    on = _linear(lambda_P=-0.5 * lam_x, lambda_X=lam_x)
    assert constraint.is_satisfied(on.theta)
    assert validator.test_intervention_invariance(m, on, "P", [first, second], seed=index).passed

    off = _linear(lambda_P=-0.5 * lam_x + 0.1, lambda_X=lam_x)
    assert not constraint.is_satisfied(off.theta)
    assert not validator.test_intervention_invariance(m, off, "P", [first, second], seed=index).passed


def test_unawareness_safe_predictor_passes():
    compiled = load_model(UNAWARE)
    m = compiled.require_model()
    assert unawareness_safe(m.graph, compiled.hypothesis("R").inputs)
    assert not unawareness_safe(m.graph, compiled.hypothesis("S").inputs)

    unaware = _linear(lambda_Z=1.5, c=0.3)
    assert validator.test_intervention_invariance(m, unaware, "P", [-1.0, 1.0]).passed
    aware = _linear(lambda_X=1.5, c=0.3)
    assert not validator.test_intervention_invariance(m, aware, "P", [-1.0, 1.0]).passed


def test_invariance_deterministic():
    m, constrained, _ = _constrained_and_ols()
    threaded = validator.ValidatorConfig(threads=2)
    first = validator.test_intervention_invariance(m, constrained, "P", [-1.0, 1.0], n=2000, seed=9)
    second = validator.test_intervention_invariance(
        m, constrained, "P", [-1.0, 1.0], n=2000, seed=9, config=threaded
    )
    assert first.to_dict()["pairs"] == second.to_dict()["pairs"]
    assert first.arm_seeds == second.arm_seeds


def test_expectation_mode():
    m, _ = _fig3()
    predictor = expectation_predictor(m, "P", "X", lam=2.0, c=5.0)
    report = validator.test_intervention_invariance(m, predictor, "P", [-1.0, 0.0, 1.0], mode="expectation")
    assert report.passed
    assert report.mode == validator.InvarianceMode.EXPECTATION
    assert report.to_dict()["decision_rule"].startswith("|mean difference|")


def test_individual_mode():
    m, constrained, _ = _constrained_and_ols()
    assert validator.test_intervention_invariance(m, constrained, "P", [-1.0, 1.0], n=20_000).passed

    # R = lambda_X * (X - 0.5 * P) shifts with P inside every bin of X
    report = validator.test_intervention_invariance(m, constrained, "P", [-1.0, 1.0], mode="individual", n=20_000)
    assert not report.passed
    assert report.pairs[0].bins
    assert "quantile bins" in report.notes[0]


def test_individual_mode_too_few_bins():
    m, constrained, _ = _constrained_and_ols()
    with pytest.raises(TooFewBins):
        validator.test_intervention_invariance(m, constrained, "P", [-1.0, 1.0], mode="individual", n=100, features=[])

    sparse = validator.ValidatorConfig(min_bin_rows=10**6)
    with pytest.raises(TooFewBins):
        validator.test_intervention_invariance(
            m, constrained, "P", [-1.0, 1.0], mode="individual", n=100, config=sparse
        )


def test_invariance_arguments():
    m, constrained, _ = _constrained_and_ols()
    with pytest.raises(ValueError):
        validator.test_intervention_invariance(m, constrained, "P", [1.0], n=100)

    with pytest.raises(ValueError):
        validator.test_intervention_invariance(m, constrained, "P", [-1.0, 1.0], n=1)

    with pytest.raises(ValueError):
        validator.test_intervention_invariance(m, constrained, "P", [-1.0, 1.0], mode="pointwise", n=100)


@pytest.mark.parametrize("link", ["identity", "sigmoid", "tanh", "cubic"])
def test_monotone_link_invariance(link: str):
    m, _ = _fig3()
    predictor = adjusted_predictor(m, "P", "X", link=link)
    assert validator.test_intervention_invariance(m, predictor, "P", [-1.0, 1.0]).passed


@pytest.mark.parametrize("link", ["identity", "tanh", "cubic"])
def test_adjusted_predictors_on_random_models(link: str):
    flipped = 0
    for seed in range(10):
        m = _random_additive_model(seed)
        predictor = adjusted_predictor(m, "P", "X", link=link)
        assert validator.test_intervention_invariance(m, predictor, "P", [-1.0, 1.0], seed=seed).passed, seed

        adjustment = predictor.adjustments[0]
        mutated = replace(predictor, adjustments=(replace(adjustment, slope=adjustment.slope + 0.2),))
        flipped += not validator.test_intervention_invariance(m, mutated, "P", [-1.0, 1.0], seed=seed).passed

    assert flipped >= 9


@pytest.mark.parametrize("link", ["identity", "sigmoid"])
def test_necessity_sweep(link: str):
    m, _ = _fig3()
    grid = [-1.0, -0.5, 0.0, 0.5, 1.0]
    report = validator.necessity_sweep(m, "P", "X", grid, link=link)
    assert report.pass_set == [0.0]
    assert report.expected_pass_set == [0.0]
    assert report.matches
    result = report.to_dict()
    assert result["verdict"] == "pass"
    assert [point["mu"] for point in result["points"]] == grid


def test_sweep_tracker(tmp_path):
    m, _ = _fig3()
    tracker = Tracker(loggers="file", config={"log_dir": str(tmp_path)})
    validator.necessity_sweep(m, "P", "X", [0.0, 1.0], n=500, tracker=tracker)
    tracker.finish()
    lines = (tmp_path / "experiment_log.jsonl").read_text().splitlines()
    records = [json.loads(line) for line in lines]
    assert [record["step"] for record in records] == [0, 1]
    assert records[1]["sweep"]["mu"] == 1.0


def test_calibrate():
    m, _ = _fig3()
    null = adjusted_predictor(m, "P", "X")
    result = validator.calibrate(m, null, "P", [-1.0, 1.0], repetitions=100, n=10_000)
    assert result["failures"] <= 3
    assert result["failure_rate"] == result["failures"] / 100

    # sd(X - 0.5 * P | do(P)) = sqrt(0.7**2 + 1), the two arms differ by 2 * proxy_weight
    shifted = null.with_coefficients(proxy_weight=0.5 * np.sqrt(0.7**2 + 1.0) / 2.0)
    result = validator.calibrate(m, shifted, "P", [-1.0, 1.0], repetitions=100, n=10_000)
    assert result["failures"] >= 99
