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
Command line front end.

Exit codes: 0 pass or ok, 1 audit or test failure, 2 usage, parse or model error, 3 internal error.
Reports go to stdout as JSON (or yaml with `--format text`), diagnostics to stderr. Trailing `key=value`
arguments override the config, e.g. `validator.alpha=0.05`.
"""

import argparse
import json
import sys
import traceback
from collections.abc import Iterator, Sequence
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Optional

from omegaconf import OmegaConf
from omegaconf.errors import OmegaConfBaseException

from ..constraints import HypothesisClass, LinearConstraint, derive_proxy_constraint, derive_unresolved_constraint
from ..dsl import CompiledSpec, load_model
from ..errors import CausalFairError, ModelParseError
from ..estimator import FittedPredictor, LinkFunction, fit_constrained
from ..graph import NodeRole, audit_graph
from ..protocol import SampleMatrix
from ..sem import Marginal, do_sample
from ..utils.logger import Tracker
from ..utils.py_functional import convert_dict_to_str
from ..utils.rng import check_seed
from ..validator import InvarianceMode, necessity_sweep, reproduce_theorem1, test_intervention_invariance
from .config import CausalFairConfig


EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    pass


@contextmanager
def user_input(what: str) -> Iterator[None]:
    """Report ValueError and KeyError raised while reading user supplied input as usage errors."""
    try:
        yield
    except (ValueError, KeyError) as exc:
        raise UsageError(f"Invalid {what}: {exc}") from exc


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage().rstrip()}")


@dataclass
class CommandResult:
    exit_code: int
    payload: dict[str, Any] = field(default_factory=dict)
    output: Optional[str] = None
    """raw stdout text, replaces the rendered payload (CSV of `simulate`)"""
    error: Optional[str] = None
    """message for stderr"""


def _single(g, role: NodeRole, what: str) -> str:
    names = g.nodes_with_role(role)
    if len(names) != 1:
        raise UsageError(f"Pass {what} explicitly, the model has {len(names)} nodes with role {role.value}.")

    return names[0]


def _parse_assignment(text: str) -> tuple[str, str]:
    name, sep, value = text.partition("=")
    if not sep or not name or not value:
        raise UsageError(f"Expected NAME=VALUE, got {text!r}.")

    return name, value


def _parse_float(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"{what} must be a number, got {text!r}.") from None


def _load_json(path: str) -> dict[str, Any]:
    with open(path, encoding="utf-8") as f, user_input(f"JSON file {path}"):
        return json.load(f)


def _hypothesis(compiled: CompiledSpec, predictor: Optional[str]) -> HypothesisClass:
    with user_input("--predictor"):
        return compiled.hypothesis(predictor)


def _audit(args, compiled: CompiledSpec, config: CausalFairConfig, tracker: Optional[Tracker]) -> CommandResult:
    audit = audit_graph(compiled.graph, args.target or None)
    payload = {"command": "audit", "model": compiled.name, **audit.to_dict()}
    return CommandResult(EXIT_FAIL if audit.violation else EXIT_OK, payload)


def _derive(args, compiled: CompiledSpec, config: CausalFairConfig, tracker: Optional[Tracker]) -> CommandResult:
    m = compiled.require_model()
    h = _hypothesis(compiled, args.predictor)
    if args.mode == "proxy":
        proxies = args.proxy or m.graph.nodes_with_role(NodeRole.PROXY)
        if not proxies:
            raise UsageError("The model has no proxy node, pass --proxy.")

        theta0 = {}
        for item in args.theta0 or []:
            name, value = _parse_assignment(item)
            theta0[name] = None if value == "free" else _parse_float(value, f"theta0 {name}")

        report = derive_proxy_constraint(m, h, proxies[0] if len(proxies) == 1 else proxies, theta0 or None)
    else:
        report = derive_unresolved_constraint(m, h, resolving=args.resolving)

    return CommandResult(EXIT_OK, {"command": "derive", "model": compiled.name, **report.to_dict()})


def _fit(args, compiled: CompiledSpec, config: CausalFairConfig, tracker: Optional[Tracker]) -> CommandResult:
    g = compiled.graph
    h = _hypothesis(compiled, args.predictor)
    with user_input(f"CSV file {args.data}"):
        data = SampleMatrix.from_csv(args.data, allowed_columns=g.names, meta_info={"source": args.data})

    outcome = args.outcome or _single(g, NodeRole.OUTCOME, "--outcome")
    con = None
    if args.constraint:
        with user_input(f"constraint file {args.constraint}"):
            con = LinearConstraint.from_dict(_load_json(args.constraint))

    predictor = fit_constrained(data, h, outcome, con)
    payload = {
        "command": "fit",
        "model": compiled.name,
        "predictor": predictor.to_dict(),
        "constraint_check": predictor.constraint_check(),
    }
    return CommandResult(EXIT_OK, payload)


def _simulate(args, compiled: CompiledSpec, config: CausalFairConfig, tracker: Optional[Tracker]) -> CommandResult:
    m = compiled.require_model()
    interventions = {}
    for item in args.do or []:
        name, value = _parse_assignment(item)
        interventions[name] = Marginal() if value == "marginal" else _parse_float(value, f"value of {name}")

    data = do_sample(m, interventions, args.n, args.seed, config.sampler, include_latent=args.include_latent)
    payload = {"command": "simulate", "model": compiled.name, "columns": data.names, **data.meta_info}
    if args.output:
        data.to_csv(args.output)
        return CommandResult(EXIT_OK, {**payload, "output": args.output})

    return CommandResult(EXIT_OK, payload, output=data.to_csv())


def _validate(args, compiled: CompiledSpec, config: CausalFairConfig, tracker: Optional[Tracker]) -> CommandResult:
    m = compiled.require_model()
    data = _load_json(args.predictor)
    with user_input(f"predictor file {args.predictor}"):
        predictor = FittedPredictor.from_dict(data.get("predictor", data))

    proxy = args.proxy or _single(m.graph, NodeRole.PROXY, "--proxy")
    report = test_intervention_invariance(
        m,
        predictor,
        proxy,
        args.values,
        mode=args.mode,
        n=args.n,
        seed=args.seed,
        config=config.validator,
        sampler_config=config.sampler,
        features=args.features,
        tracker=tracker,
    )
    payload = {"command": "validate", "model": compiled.name, **report.to_dict()}
    return CommandResult(EXIT_OK if report.passed else EXIT_FAIL, payload)


def _repro_thm1(args, compiled: None, config: CausalFairConfig, tracker: Optional[Tracker]) -> CommandResult:
    report = reproduce_theorem1(args.n, args.seed, config.validator, config.sampler, tracker=tracker)
    return CommandResult(EXIT_OK if report.passed else EXIT_FAIL, {"command": "repro-thm1", **report.to_dict()})


def _sweep(args, compiled: CompiledSpec, config: CausalFairConfig, tracker: Optional[Tracker]) -> CommandResult:
    m = compiled.require_model()
    proxy = args.proxy or _single(m.graph, NodeRole.PROXY, "--proxy")
    features = args.feature
    if not features:
        features = [name for name in _hypothesis(compiled, args.predictor).inputs if name != proxy]

    report = necessity_sweep(
        m,
        proxy,
        features,
        args.grid,
        link=args.link,
        n=args.n,
        seed=args.seed,
        values=args.values,
        config=config.validator,
        sampler_config=config.sampler,
        adjustment_n=args.n,
        tracker=tracker,
    )
    payload = {"command": "sweep", "model": compiled.name, **report.to_dict()}
    return CommandResult(EXIT_OK if report.matches else EXIT_FAIL, payload)


COMMANDS = {
    "audit": _audit,
    "derive": _derive,
    "fit": _fit,
    "simulate": _simulate,
    "validate": _validate,
    "repro-thm1": _repro_thm1,
    "sweep": _sweep,
}


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json", help="report format on stdout")
    common.add_argument("--threads", type=int, default=None, help="worker threads for sampling and do-arms")

    def sampling(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("-n", type=int, required=True, help="rows per sample")
        sub.add_argument("--seed", type=int, required=True, help="master seed, required for reproducibility")

    parser = _ArgumentParser(prog="causalfair", description="Causal audits, constraints and tests of predictors.")
    subparsers = parser.add_subparsers(dest="command", parser_class=_ArgumentParser)
    subparsers.required = True

    audit = subparsers.add_parser("audit", parents=[common], help="graph audits of predictor nodes")
    audit.add_argument("file")
    audit.add_argument("--target", nargs="+", help="nodes to audit, defaults to every predictor")

    derive = subparsers.add_parser("derive", parents=[common], help="derive the linear constraint on theta")
    derive.add_argument("file")
    derive.add_argument("--mode", choices=("proxy", "unresolved"), required=True)
    derive.add_argument("--predictor", help="predictor node, needed when the model declares several")
    derive.add_argument("--proxy", nargs="+", help="proxies to intervene on, defaults to every proxy")
    derive.add_argument("--resolving", nargs="*", help="override the resolving labels, empty for the total effect")
    derive.add_argument("--theta0", nargs="+", help="reference values NAME=VALUE of theta_tilde, or NAME=free")

    fit = subparsers.add_parser("fit", parents=[common], help="fit a constrained linear predictor")
    fit.add_argument("file")
    fit.add_argument("--data", required=True, help="CSV whose header names graph nodes")
    fit.add_argument("--constraint", help="constraint JSON, the output of `derive` works")
    fit.add_argument("--outcome", help="target column, defaults to the outcome node")
    fit.add_argument("--predictor", help="predictor node, needed when the model declares several")

    simulate = subparsers.add_parser("simulate", parents=[common], help="sample the model as CSV")
    simulate.add_argument("file")
    simulate.add_argument("--do", action="append", help="NODE=VALUE or NODE=marginal, repeatable")
    sampling(simulate)
    simulate.add_argument("--include-latent", action="store_true", help="also write latent columns")
    simulate.add_argument("--output", help="write the CSV here instead of stdout")

    validate = subparsers.add_parser("validate", parents=[common], help="test a predictor under do(P=v)")
    validate.add_argument("file")
    validate.add_argument("--predictor", required=True, help="predictor JSON, the output of `fit` works")
    validate.add_argument("--mode", choices=[mode.value for mode in InvarianceMode], default="distribution")
    sampling(validate)
    validate.add_argument("--proxy", help="intervened proxy, defaults to the only proxy node")
    validate.add_argument("--values", type=float, nargs="+", default=[-1.0, 1.0])
    validate.add_argument("--features", nargs="+", help="conditioning features of individual mode")

    repro = subparsers.add_parser("repro-thm1", parents=[common], help="two graphs, one joint distribution")
    sampling(repro)

    sweep = subparsers.add_parser("sweep", parents=[common], help="direct proxy weight sweep of adjusted predictors")
    sweep.add_argument("file")
    sweep.add_argument("--grid", type=float, nargs="+", required=True, help="direct proxy weights mu")
    sweep.add_argument("--link", choices=[link.value for link in LinkFunction], default="identity")
    sweep.add_argument("--proxy", help="proxy node, defaults to the only proxy node")
    sweep.add_argument("--feature", nargs="+", help="adjusted features, defaults to the predictor's other inputs")
    sweep.add_argument("--predictor", help="predictor whose inputs give the default features")
    sweep.add_argument("--values", type=float, nargs="+", default=[-1.0, 1.0])
    sampling(sweep)
    return parser


def _build_config(args, overrides: Sequence[str]) -> CausalFairConfig:
    for item in overrides:
        if "=" not in item:
            raise UsageError(f"Unrecognized argument {item!r}.")

    default_config = OmegaConf.structured(CausalFairConfig())
    if args.threads is not None:
        overrides = [f"sampler.threads={args.threads}", f"validator.threads={args.threads}", *overrides]

    config = OmegaConf.merge(default_config, OmegaConf.from_dotlist(list(overrides)))
    config: CausalFairConfig = OmegaConf.to_object(config)
    with user_input("configuration"):
        config.deep_post_init()

    return config


def _check_arguments(args) -> None:
    if hasattr(args, "seed"):
        with user_input("--seed"):
            check_seed(args.seed)

    if hasattr(args, "n"):
        minimum = 0 if args.command == "simulate" else 2
        if args.n < minimum:
            raise UsageError(f"-n must be at least {minimum} for {args.command}, got {args.n}.")

    if len(getattr(args, "values", None) or [0.0, 0.0]) < 2:
        raise UsageError(f"--values needs at least two intervention values, got {args.values}.")


def run(argv: Optional[Sequence[str]] = None) -> CommandResult:
    """Parse argv and execute one command, never raises."""
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    tracker = None
    try:
        args, overrides = parser.parse_known_args(argv)
        config = _build_config(args, overrides)
        _check_arguments(args)
        if config.tracker.logger:
            with user_input("tracker configuration"):
                tracker = Tracker(loggers=list(config.tracker.logger), config={**config.to_dict(), **vars(args)})

        compiled = load_model(args.file) if hasattr(args, "file") else None
        result = COMMANDS[args.command](args, compiled, config, tracker)
    except UsageError as exc:
        return CommandResult(EXIT_USAGE, error=str(exc))
    except ModelParseError as exc:
        diagnostics = [diag.to_dict() for diag in exc.diagnostics]
        return CommandResult(EXIT_USAGE, {"error": "ModelParseError", "diagnostics": diagnostics}, error=str(exc))
    except (CausalFairError, OmegaConfBaseException, OSError) as exc:
        return CommandResult(EXIT_USAGE, {"error": type(exc).__name__}, error=f"{type(exc).__name__}: {exc}")
    except Exception:
        return CommandResult(EXIT_INTERNAL, {"error": "internal"}, error=traceback.format_exc())
    finally:
        if tracker is not None:
            tracker.finish()

    result.payload.setdefault("exit_code", result.exit_code)
    if getattr(args, "format", "json") == "text":
        result.output = result.output if result.output is not None else convert_dict_to_str(result.payload)

    return result


def main(argv: Optional[Sequence[str]] = None) -> int:
    result = run(argv)
    if result.error:
        print(result.error, file=sys.stderr)

    if result.output is not None:
        sys.stdout.write(result.output)
    elif result.exit_code in (EXIT_OK, EXIT_FAIL):
        sys.stdout.write(json.dumps(result.payload, indent=2) + "\n")

    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
