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

import pytest

from causalfair.dsl import load_model, serialize_model
from causalfair.validator import LEFT_MODEL, RIGHT_MODEL, reproduce_theorem1, theorem1_models


MODELS_DIR = Path(__file__).resolve().parent.parent / "models"


@pytest.fixture(scope="module")
def report():
    return reproduce_theorem1(n=100_000, seed=7)


def test_models_match_golden_files():
    assert (MODELS_DIR / "fig2_left.cfm").read_text() == LEFT_MODEL
    assert (MODELS_DIR / "fig2_right.cfm").read_text() == RIGHT_MODEL
    left, right = theorem1_models()
    assert left.name == "theorem1_left" and right.name == "theorem1_right"
    assert serialize_model(load_model(LEFT_MODEL).spec) == LEFT_MODEL


def test_joint_agreement(report):
    assert len(report.joint) == 15
    assert report.joint_agreement


def test_audit_verdicts(report):
    assert report.audits["left"]["verdict"] is False
    assert report.audits["right"]["verdict"] is True
    assert report.audits["right"]["witnesses"] == ["A->Rstar", "A->Y->X2->Rstar"]
    assert report.audit_verdicts


def test_equal_odds_and_calibration(report):
    assert len(report.equal_odds) == 4
    assert report.equal_odds_pass
    assert report.calibration
    assert report.calibration_pass


def test_report(report):
    result = report.to_dict()
    assert result["verdict"] == "pass"
    assert result["seeds"]["left"] != result["seeds"]["right"]
    again = reproduce_theorem1(n=2000, seed=7)
    assert again.seeds == report.seeds
    assert again.audits == report.audits
