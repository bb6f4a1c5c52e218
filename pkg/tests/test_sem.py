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

import math
from pathlib import Path

import numpy as np
import pytest

from causalfair.dsl import load_model
from causalfair.errors import (
    BadNoiseParam,
    MissingEquation,
    NonadditiveProxyInfluence,
    NonlinearEquation,
    NonParentReference,
    OrphanEquation,
    UnknownNode,
)
from causalfair.graph import build_graph
from causalfair.sem import (
    BernoulliPM,
    Const,
    Gaussian,
    Marginal,
    Mixture2,
    SamplerConfig,
    SEModel,
    Sigmoid,
    Sum,
    Term,
    Var,
    analytic_marginal,
    do_sample,
    interventional_expectation,
    proxy_slope,
    sample,
    validate_model,
)
from causalfair.utils.rng import check_seed, derive_seed


MODELS_DIR = Path(__file__).resolve().parent.parent / "models"


def _fig3():
    return load_model(MODELS_DIR / "fig3.cfm").require_model()


def _gaussian_chain():
    g = build_graph(["A", "X"], [("A", "X")])
    equations = {"A": Gaussian(Const(0.0), 1.0), "X": Gaussian(Sum((Term(2.0, "A"), Const(1.0))), 0.5)}
    return SEModel(graph=g, equations=equations, name="chain")


def _assert_same(data1, data2):
    assert data1.names == data2.names
    for name in data1.names:
        assert np.array_equal(data1[name], data2[name])


def test_sample_columns():
    m = _fig3()
    data = sample(m, 100, seed=1)
    assert data.names == ["A", "P", "X", "Y"]
    assert set(np.unique(data["A"])) <= {-1.0, 1.0}

    data = sample(m, 100, seed=1, include_latent=True)
    assert data.names == ["A", "N_P", "P", "N_X", "X", "Y"]
    assert np.allclose(data["P"], 0.8 * data["A"] + data["N_P"], rtol=0.0, atol=1e-12)

    meta_info = data.meta_info
    assert meta_info["seed"] == 1 and meta_info["n"] == 100
    assert meta_info["model"] == "fig3"
    assert meta_info["fingerprint"] == m.fingerprint
    assert meta_info["interventions"] == {}


@pytest.mark.parametrize("threads", [1, 2, 4])
def test_sample_threads_deterministic(threads: int):
    m = _fig3()
    reference = sample(m, 1000, seed=3, config=SamplerConfig(chunk_size=128, threads=1))
    data = sample(m, 1000, seed=3, config=SamplerConfig(chunk_size=128, threads=threads))
    _assert_same(data, reference)


def test_sample_seed():
    m = _fig3()
    _assert_same(sample(m, 500, seed=11), sample(m, 500, seed=11))
    assert not np.array_equal(sample(m, 500, seed=11)["X"], sample(m, 500, seed=12)["X"])
    head = sample(m, 1000, seed=11, config=SamplerConfig(chunk_size=100))
    tail = sample(m, 200, seed=11, config=SamplerConfig(chunk_size=100))
    assert np.array_equal(head["X"][:200], tail["X"])


def test_sample_empty():
    data = sample(_fig3(), 0, seed=0)
    assert len(data) == 0
    assert data.names == ["A", "P", "X", "Y"]
    assert data["X"].dtype == np.float64

    with pytest.raises(ValueError):
        sample(_fig3(), -1, seed=0)


def test_check_seed():
    assert check_seed(0) == 0
    assert check_seed(2**64 - 1) == 2**64 - 1
    with pytest.raises(ValueError):
        check_seed(-1)

    with pytest.raises(ValueError):
        check_seed(2**64)

    with pytest.raises(TypeError):
        check_seed(True)

    with pytest.raises(TypeError):
        check_seed(1.5)

    assert derive_seed(5, "left") == derive_seed(5, "left")
    assert derive_seed(5, "left") != derive_seed(5, "right")


def test_do_sample_constant():
    data = do_sample(_fig3(), {"P": 1.0}, 20_000, seed=2)
    assert np.all(data["P"] == 1.0)
    assert data.meta_info["interventions"] == {"P": "1.0"}
    # E[X | do(P=1)] = 0.7 * E[A] + 0.5
    assert abs(float(np.mean(data["X"])) - 0.5) < 0.05

    with pytest.raises(UnknownNode):
        do_sample(_fig3(), {"Z": 1.0}, 10, seed=0)


def test_do_sample_marginal():
    m = _fig3()
    config = SamplerConfig(reservoir_size=5000)
    data = do_sample(m, {"P": Marginal(), "A": Marginal()}, 2000, seed=4, config=config)
    marginals = data.meta_info["marginals"]
    assert marginals["A"] == {"method": "root_equation"}
    assert marginals["P"]["method"] == "reservoir"
    assert marginals["P"]["reservoir_size"] == 5000
    assert data.meta_info["marginal_draws"] == "independent per row"
    assert data.meta_info["interventions"] == {"P": "marginal", "A": "marginal"}
    pool = sample(m, 5000, marginals["P"]["reservoir_seed"], config, include_latent=True)["P"]
    assert np.isin(data["P"], pool).all()

    data = do_sample(_gaussian_chain(), {"X": Marginal()}, 20_000, seed=4)
    assert data.meta_info["marginals"]["X"]["method"] == "analytic"
    assert abs(float(np.std(data["X"])) - math.sqrt(4.25)) < 0.05
    assert abs(np.corrcoef(data["A"], data["X"])[0, 1]) < 0.05


def test_validate_model():
    g = build_graph(["A", "B"], [("A", "B")])
    good = {"A": Gaussian(Const(0.0), 1.0), "B": Var("A")}
    assert validate_model(SEModel(graph=g, equations=good)) is not None

    with pytest.raises(OrphanEquation):
        validate_model(SEModel(graph=g, equations={**good, "C": Const(1.0)}))

    with pytest.raises(MissingEquation):
        validate_model(SEModel(graph=g, equations={"A": Gaussian(Const(0.0), 1.0)}))

    with pytest.raises(NonParentReference):
        validate_model(SEModel(graph=g, equations={"A": Var("B"), "B": Var("A")}))

    with pytest.raises(BadNoiseParam):
        validate_model(SEModel(graph=g, equations={"A": Gaussian(Const(0.0), 0.0), "B": Var("A")}))

    with pytest.raises(BadNoiseParam):
        validate_model(SEModel(graph=g, equations={"A": BernoulliPM(Const(1.5)), "B": Var("A")}))

    with pytest.raises(BadNoiseParam):
        validate_model(SEModel(graph=g, equations={"A": Const(float("inf")), "B": Var("A")}))


def test_bad_probability_at_sampling():
    g = build_graph(["A", "B"], [("A", "B")])
    m = SEModel(graph=g, equations={"A": Gaussian(Const(0.0), 1.0), "B": BernoulliPM(Var("A"))})
    with pytest.raises(BadNoiseParam):
        sample(m, 100, seed=0)


def test_predictor_without_equation():
    g = build_graph([("A", "protected"), ("X", "feature"), ("R", "predictor")], [("A", "X"), ("X", "R")])
    m = SEModel(graph=g, equations={"A": BernoulliPM(Const(0.5)), "X": Var("A")})
    assert sample(m, 10, seed=0).names == ["A", "X"]


def test_interventional_expectation():
    m = _fig3()
    form = interventional_expectation(m, "X", "P")
    assert form.slope == pytest.approx(0.5)
    assert form.intercept == pytest.approx(0.0, abs=1e-12)
    assert form.slope_stderr == 0.0

    form = interventional_expectation(m, "Y", "P")
    assert form.slope == pytest.approx(1.5)
    assert form(2.0) == pytest.approx(3.0)
    assert proxy_slope(m, "A", "P") == 0.0
    assert proxy_slope(m, "P", "P") == 1.0


def test_interventional_expectation_monte_carlo():
    g = build_graph(["A", "P", "X"], [("A", "P"), ("A", "X"), ("P", "X")])
    equations = {
        "A": Gaussian(Const(0.0), 1.0),
        "P": Gaussian(Var("A"), 1.0),
        "X": Sum((Sigmoid(Var("A")), Var("P"))),
    }
    m = SEModel(graph=g, equations=equations)
    with pytest.raises(NonlinearEquation):
        interventional_expectation(m, "X", "P")

    form = interventional_expectation(m, "X", "P", n=20_000, seed=0)
    assert form.slope == 1.0
    assert abs(form.intercept - 0.5) < 0.02
    assert 0.0 < form.intercept_stderr < 0.01


def test_mixture_component_frequency():
    g = build_graph(["M"])
    m = SEModel(graph=g, equations={"M": Mixture2(Const(-10.0), 1.0, Const(10.0), 1.0, Const(0.8))})
    n = 100_000
    weight = 1.0 / (1.0 + math.exp(-0.8))
    frequency = float(np.mean(sample(m, n, seed=0)["M"] < 0.0))
    assert abs(frequency - weight) <= 3.0 * math.sqrt(weight * (1.0 - weight) / n)

    text = "node M role=feature\neq M = mix2(-10, 1, 10, 1, 0.8)\n"
    parsed = load_model(text).require_model()
    parsed_frequency = float(np.mean(sample(parsed, n, seed=1)["M"] < 0.0))
    assert abs(parsed_frequency - weight) <= 3.0 * math.sqrt(weight * (1.0 - weight) / n)


def test_nonadditive_proxy_influence():
    g = build_graph(["P", "X"], [("P", "X")])
    m = SEModel(graph=g, equations={"P": Gaussian(Const(0.0), 1.0), "X": Sigmoid(Var("P"))})
    with pytest.raises(NonadditiveProxyInfluence):
        proxy_slope(m, "X", "P")


def test_analytic_marginal():
    mean, std = analytic_marginal(_gaussian_chain(), "X")
    assert mean == pytest.approx(1.0)
    assert std == pytest.approx(math.sqrt(4.25))
    assert analytic_marginal(_fig3(), "X") is None
