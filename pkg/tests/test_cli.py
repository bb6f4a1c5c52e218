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
from pathlib import Path

import pytest

from causalfair.cli import main
from causalfair.protocol import SampleMatrix


MODELS_DIR = Path(__file__).resolve().parent.parent / "models"
FIG3 = str(MODELS_DIR / "fig3.cfm")


def test_audit():
    result = main.run(["audit", str(MODELS_DIR / "fig2_right.cfm"), "--target", "Rstar"])
    assert result.exit_code == main.EXIT_FAIL
    witnesses = result.payload["targets"]["Rstar"]["unresolved_discrimination"]["witnesses"]
    assert witnesses == ["A->Rstar", "A->Y->X2->Rstar"]
    assert result.payload["exit_code"] == 1

    result = main.run(["audit", str(MODELS_DIR / "fig2_left.cfm"), "--target", "Rstar"])
    assert result.exit_code == main.EXIT_OK
    assert result.payload["violation"] is False


def test_audit_text_format():
    result = main.run(["audit", str(MODELS_DIR / "fig2_right.cfm"), "--target", "Rstar", "--format", "text"])
    assert result.exit_code == main.EXIT_FAIL
    assert "violation" in result.output


def test_derive():
    result = main.run(["derive", FIG3, "--mode", "proxy"])
    assert result.exit_code == main.EXIT_OK
    assert result.payload["description"] == "lambda_P + 0.5*lambda_X = 0"
    assert result.payload["theta0"] == {"lambda_P": 0.0, "lambda_X": "free"}

    result = main.run(["derive", FIG3, "--mode", "proxy", "--theta0", "lambda_X=2"])
    assert result.payload["description"] == "lambda_P + 0.5*lambda_X = 0; lambda_X = 2"

    result = main.run(["derive", str(MODELS_DIR / "fig5.cfm"), "--mode", "unresolved", "--predictor", "RA"])
    assert result.payload["description"] == "lambda_A + 0.8*lambda_X = 0"

    result = main.run(["derive", str(MODELS_DIR / "fig5.cfm"), "--mode", "proxy", "--predictor", "R"])
    assert result.exit_code == main.EXIT_USAGE


def test_simulate(tmp_path):
    result = main.run(["simulate", FIG3, "-n", "0", "--seed", "0"])
    assert result.exit_code == main.EXIT_OK
    assert result.output == "A,P,X,Y\n"

    output = tmp_path / "sample.csv"
    result = main.run(["simulate", FIG3, "-n", "50", "--seed", "1", "--do", "P=1", "--output", str(output)])
    assert result.payload["interventions"] == {"P": "1.0"}
    data = SampleMatrix.from_csv(str(output))
    assert len(data) == 50
    assert (data["P"] == 1.0).all()

    again = main.run(["simulate", FIG3, "-n", "50", "--seed", "1", "--do", "P=1", "--threads", "2"])
    assert again.output == output.read_text()


def test_usage_errors(tmp_path):
    assert main.run(["simulate", FIG3, "-n", "10"]).exit_code == main.EXIT_USAGE
    assert main.run(["simulate", FIG3, "-n", "10", "--seed", "0", "--bogus"]).exit_code == main.EXIT_USAGE
    assert main.run(["simulate", FIG3, "-n", "10", "--seed", "0", "sampler.bogus=1"]).exit_code == main.EXIT_USAGE
    assert main.run(["simulate", FIG3, "-n", "10", "--seed", "0", "--do", "P"]).exit_code == main.EXIT_USAGE
    assert main.run(["simulate", FIG3, "-n", "10", "--seed", "-1"]).exit_code == main.EXIT_USAGE
    assert main.run(["frobnicate"]).exit_code == main.EXIT_USAGE
    assert main.run(["audit", str(tmp_path / "missing.cfm")]).exit_code == main.EXIT_USAGE


def test_parse_error(tmp_path):
    path = tmp_path / "broken.cfm"
    path.write_text("node A role=protcted\nedge A -> B\n", encoding="utf-8")
    result = main.run(["audit", str(path)])
    assert result.exit_code == main.EXIT_USAGE
    codes = [diagnostic["code"] for diagnostic in result.payload["diagnostics"]]
    assert codes == ["UnknownRole", "UndeclaredVariable"]
    assert "1:13: UnknownRole" in result.error


def test_fit_and_validate(tmp_path):
    data = tmp_path / "train.csv"
    assert main.run(["simulate", FIG3, "-n", "5000", "--seed", "0", "--output", str(data)]).exit_code == 0
    constraint = tmp_path / "constraint.json"
    constraint.write_text(json.dumps(main.run(["derive", FIG3, "--mode", "proxy"]).payload))

    result = main.run(["fit", FIG3, "--data", str(data), "--constraint", str(constraint)])
    assert result.exit_code == main.EXIT_OK
    assert result.payload["constraint_check"]["satisfied"]
    predictor = tmp_path / "predictor.json"
    predictor.write_text(json.dumps(result.payload))

    argv = ["validate", FIG3, "--predictor", str(predictor), "-n", "5000", "--seed", "0"]
    result = main.run(argv)
    assert result.exit_code == main.EXIT_OK
    assert result.payload["verdict"] == "pass"
    assert result.payload["alpha"] == 0.01

    unconstrained = main.run(["fit", FIG3, "--data", str(data)])
    predictor.write_text(json.dumps(unconstrained.payload["predictor"]))
    assert main.run(argv).exit_code == main.EXIT_FAIL


def test_fit_rejects_unknown_columns(tmp_path):
    data = tmp_path / "train.csv"
    data.write_text("A,Z\n1,2\n-1,3\n", encoding="utf-8")
    assert main.run(["fit", FIG3, "--data", str(data)]).exit_code == main.EXIT_USAGE


def test_sweep():
    argv = ["sweep", FIG3, "--grid", "0", "1", "-n", "5000", "--seed", "0"]
    result = main.run(argv)
    assert result.exit_code == main.EXIT_OK
    assert result.payload["pass_set"] == [0.0]
    assert result.payload["features"] == ["X"]


def test_main_writes_json(capsys):
    code = main.main(["derive", FIG3, "--mode", "proxy"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["command"] == "derive"
    assert payload["exit_code"] == 0

    code = main.main(["simulate", FIG3, "-n", "10"])
    captured = capsys.readouterr()
    assert code == 2
    assert captured.out == ""
    assert "--seed" in captured.err


@pytest.mark.parametrize(
    "argv",
    [
        ["simulate", FIG3, "-n", "10", "--seed", "0", "validator.alpha=2"],
        ["simulate", FIG3, "-n", "10", "--seed", "0", "sampler.threads=0"],
        ["simulate", FIG3, "-n", "10", "--seed", "0", "tracker.logger=[wandb]"],
        ["simulate", FIG3, "-n", "-1", "--seed", "0"],
        ["repro-thm1", "-n", "1", "--seed", "0"],
        ["sweep", FIG3, "--grid", "0", "-n", "100", "--seed", "0", "--values", "1"],
        ["derive", FIG3, "--mode", "proxy", "--predictor", "Ghost"],
    ],
)
def test_invalid_arguments(argv):
    result = main.run(argv)
    assert result.exit_code == main.EXIT_USAGE
    assert "Traceback" not in result.error


def test_malformed_input_files(tmp_path):
    predictor = tmp_path / "predictor.json"
    predictor.write_text("{not json", encoding="utf-8")
    argv = ["validate", FIG3, "--predictor", str(predictor), "-n", "100", "--seed", "0"]
    assert main.run(argv).exit_code == main.EXIT_USAGE

    predictor.write_text(json.dumps({"form": "constrained_linear"}), encoding="utf-8")
    assert main.run(argv).exit_code == main.EXIT_USAGE

    data = tmp_path / "train.csv"
    data.write_text("P,X,Y\n1,a,2\n", encoding="utf-8")
    assert main.run(["fit", FIG3, "--data", str(data)]).exit_code == main.EXIT_USAGE


def test_internal_errors(monkeypatch):
    def broken(args, compiled, config, tracker):
        raise ValueError("boom")

    monkeypatch.setitem(main.COMMANDS, "audit", broken)
    result = main.run(["audit", FIG3])
    assert result.exit_code == main.EXIT_INTERNAL
    assert result.payload == {"error": "internal"}
    assert "ValueError: boom" in result.error
