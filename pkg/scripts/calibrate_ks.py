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
False positive rate of the distribution test on an invariant predictor, and its power against a mean
shift between the do-arms, over seeded repetitions.
"""

import argparse
import json
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from causalfair.dsl import load_model
from causalfair.estimator import adjusted_predictor
from causalfair.sem import do_sample
from causalfair.utils.rng import derive_seed
from causalfair.validator import ValidatorConfig, calibrate


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--model", default="models/fig3.cfm", type=str, help="model file with a proxy")
    parser.add_argument("--proxy", default="P", type=str, help="intervened proxy")
    parser.add_argument("--feature", default="X", type=str, help="proxy-adjusted feature")
    parser.add_argument("--repetitions", default=100, type=int, help="seeded repetitions per setting")
    parser.add_argument("-n", default=10_000, type=int, help="rows per do-arm")
    parser.add_argument("--seed", default=0, type=int, help="master seed")
    parser.add_argument("--shift", default=0.5, type=float, help="mean shift between arms in predictor sd")
    parser.add_argument("--alpha", default=0.01, type=float, help="significance level of the KS rule")
    args = parser.parse_args()

    m = load_model(args.model).require_model()
    config = ValidatorConfig(alpha=args.alpha)
    config.post_init()
    null = adjusted_predictor(m, args.proxy, args.feature)
    pilot = do_sample(m, {args.proxy: 0.0}, args.n, derive_seed(args.seed, "pilot"))
    sd = float(np.std(null.evaluate(pilot.columns), ddof=1))
    # arms at -1 and 1 are two units apart
    shifted = null.with_coefficients(proxy_weight=args.shift * sd / 2.0)

    def run(predictor):
        return calibrate(m, predictor, args.proxy, (-1.0, 1.0), args.repetitions, args.n, args.seed, config=config)

    with ThreadPoolExecutor(max_workers=2) as executor:
        null_result, power_result = executor.map(run, [null, shifted])

    print(json.dumps({"predictor_sd": sd, "null": null_result, "power": power_result}, indent=2))
