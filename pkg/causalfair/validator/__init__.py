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

from .config import ValidatorConfig
from .invariance import (
    InterventionTestReport,
    InvarianceMode,
    PairResult,
    SampleComparison,
    calibrate,
    compare_samples,
    ks_critical_value,
    test_intervention_invariance,
)
from .sweep import SweepReport, necessity_sweep
from .theorem1 import LEFT_MODEL, RIGHT_MODEL, Theorem1Report, reproduce_theorem1, theorem1_models


__all__ = [
    "LEFT_MODEL",
    "RIGHT_MODEL",
    "InterventionTestReport",
    "InvarianceMode",
    "PairResult",
    "SampleComparison",
    "SweepReport",
    "Theorem1Report",
    "ValidatorConfig",
    "calibrate",
    "compare_samples",
    "ks_critical_value",
    "necessity_sweep",
    "reproduce_theorem1",
    "test_intervention_invariance",
    "theorem1_models",
]
