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

from .fitting import adjusted_predictor, expectation_predictor, fit_constrained
from .links import LINK_MAP, LinkFunction, get_link, register_link
from .predictor import Adjustment, FittedPredictor, PredictorForm


__all__ = [
    "LINK_MAP",
    "Adjustment",
    "FittedPredictor",
    "LinkFunction",
    "PredictorForm",
    "adjusted_predictor",
    "expectation_predictor",
    "fit_constrained",
    "get_link",
    "register_link",
]
