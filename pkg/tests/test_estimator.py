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

from pathlib import Path

import numpy as np
import pytest

from causalfair.constraints import HypothesisClass, LinearConstraint, derive_proxy_constraint
from causalfair.dsl import load_model
from causalfair.errors import AdjustmentNotIdentifiable, DegenerateDesign, HypothesisMismatch, InfeasibleConstraint
from causalfair.estimator import (
    FittedPredictor,
    LinkFunction,
    PredictorForm,
    adjusted_predictor,
    expectation_predictor,
    fit_constrained,
    get_link,
)
from causalfair.protocol import SampleMatrix
from causalfair.sem import do_sample, sample


MODELS_DIR = Path(__file__).resolve().parent.parent / "models"

CHAIN = """\
node A role=protected
node P role=proxy
node X role=feature
node Y role=outcome
edge A -> P
edge P -> X
edge X -> Y
eq A = bern_pm(0.5)
eq P = 0.8*A + normal(0, 1)
eq X = 0.5*P + normal(0, 1)
eq Y = X + normal(0, 1)
"""


def _fig3():
    compiled = load_model(MODELS_DIR / "fig3.cfm")
    return compiled.require_model(), compiled.hypothesis("R")


def test_links():
    assert get_link(LinkFunction.SIGMOID)(np.zeros(1)).tolist() == [0.5]
    assert get_link("cubic")(np.array([2.0])).tolist() == [8.0]
    with pytest.raises(ValueError):
        get_link("softplus")

    with pytest.raises(ValueError):
        FittedPredictor(form="adjusted", inputs=("X", "P"), coefficients={}, link="softplus")


def test_fit_constrained():
    m, h = _fig3()
    data = sample(m, 20_000, seed=0)
    con = derive_proxy_constraint(m, h, "P").constraint
    predictor = fit_constrained(data, h, "Y", con)
    coefficients = predictor.coefficients
    assert predictor.form == PredictorForm.CONSTRAINED_LINEAR
    assert abs(coefficients["lambda_P"] + 0.5 * coefficients["lambda_X"]) <= 1e-9
    assert predictor.constraint_check()["satisfied"]
    assert predictor.training["n"] == 20_000
    assert predictor.training["seed"] == 0
    assert predictor.training["free_parameters"] == 1

    ols = fit_constrained(data, h, "Y")
    assert ols.coefficients["lambda_P"] == pytest.approx(1.0, abs=0.05)
    assert ols.coefficients["lambda_X"] == pytest.approx(1.0, abs=0.05)
    assert ols.training["loss"] <= predictor.training["loss"]


def test_fit_constrained_errors():
    m, h = _fig3()
    data = sample(m, 100, seed=0)
    infeasible = LinearConstraint.build(h.theta_names, [((1.0, 0.0), 1.0), ((1.0, 0.0), 2.0)])
    with pytest.raises(InfeasibleConstraint):
        fit_constrained(data, h, "Y", infeasible)

    with pytest.raises(HypothesisMismatch):
        fit_constrained(data, h, "Y", LinearConstraint.unconstrained(["lambda_X"]))

    with pytest.raises(DegenerateDesign):
        fit_constrained(data[:0], h, "Y")


def test_fit_constrained_minimum_norm():
    data = SampleMatrix.from_dict({"P": [1.0, 2.0, 3.0], "X": [1.0, 2.0, 3.0], "Y": [2.0, 4.0, 6.0]})
    predictor = fit_constrained(data, HypothesisClass("S", ("P", "X")), "Y")
    assert predictor.coefficients["lambda_P"] == pytest.approx(1.0)
    assert predictor.coefficients["lambda_X"] == pytest.approx(1.0)
    assert predictor.training["rank"] == 1


def test_predictor_dict():
    m, h = _fig3()
    data = sample(m, 1000, seed=1)
    predictor = fit_constrained(data, h, "Y", derive_proxy_constraint(m, h, "P").constraint)
    restored = FittedPredictor.from_dict(predictor.to_dict())
    assert restored.constraint == predictor.constraint
    assert np.array_equal(restored.evaluate(data.columns), predictor.evaluate(data.columns))


def test_adjusted_predictor_do():
    m, _ = _fig3()
    predictor = adjusted_predictor(m, "P", "X")
    (adjustment,) = predictor.adjustments
    assert adjustment.slope == pytest.approx(0.5)
    assert adjustment.intercept == pytest.approx(0.0, abs=1e-12)
    assert predictor.inputs == ("X", "P")
    columns = {"X": np.array([1.0, 3.0]), "P": np.array([2.0, 2.0])}
    assert predictor.evaluate(columns).tolist() == pytest.approx([0.0, 2.0])

    shifted = predictor.with_coefficients(proxy_weight=1.0)
    assert shifted.evaluate(columns).tolist() == pytest.approx([2.0, 4.0])
    assert predictor.coefficients["proxy_weight"] == 0.0

    squashed = adjusted_predictor(m, "P", "X", link="sigmoid")
    assert squashed.evaluate(columns).tolist() == pytest.approx([0.5, 1.0 / (1.0 + np.exp(-2.0))])


def test_adjusted_predictor_observational():
    m, _ = _fig3()
    data = sample(m, 1000, seed=0)
    with pytest.raises(AdjustmentNotIdentifiable):
        adjusted_predictor(m, "P", "X", mode="observational", data=data)

    with pytest.raises(ValueError):
        adjusted_predictor(data, "P", "X", mode="do")

    with pytest.raises(ValueError):
        adjusted_predictor(m, "P", "X", mode="backdoor")


def test_adjustment_agreement_on_chain():
    chain = load_model(CHAIN).require_model()
    data = sample(chain, 20_000, seed=5)
    by_do = adjusted_predictor(chain, "P", "X")
    by_data = adjusted_predictor(data, "P", "X", mode="observational", graph=chain.graph)
    assert by_data.adjustments[0].source == "observational"
    assert by_data.adjustments[0].slope == pytest.approx(by_do.adjustments[0].slope, abs=0.03)
    assert by_data.adjustments[0].intercept == pytest.approx(by_do.adjustments[0].intercept, abs=0.03)

    fitted = adjusted_predictor(chain, "P", "X", data=data, fit_outcome="Y")
    assert fitted.coefficients["weight_X"] == pytest.approx(1.0, abs=0.05)
    assert fitted.coefficients["bias"] == pytest.approx(0.0, abs=0.05)
    assert fitted.training["outcome"] == "Y"


def test_expectation_predictor():
    m, _ = _fig3()
    predictor = expectation_predictor(m, "P", "X", lam=2.0, c=5.0)
    assert predictor.form == PredictorForm.EXPECTATION
    n = 100_000
    for seed, value in enumerate((-1.0, 0.5, 2.0)):
        output = predictor.evaluate(do_sample(m, {"P": value}, n, seed=seed).columns)
        bound = 4.0 * float(np.std(output, ddof=1)) / np.sqrt(n)
        assert abs(float(np.mean(output)) - 5.0) <= bound
