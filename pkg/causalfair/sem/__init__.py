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

from .config import SamplerConfig
from .expectations import (
    LinearForm,
    analytic_marginal,
    conditional_expectation_fit,
    interventional_expectation,
    proxy_slope,
    root_mean,
)
from .expression import BernoulliPM, Const, Expression, Gaussian, Mixture2, Sigmoid, Sum, Term, Var
from .model import Marginal, SEModel, validate_model
from .root_form import NoiseTerm, RootForm, root_form
from .sampler import do_sample, sample


__all__ = [
    "BernoulliPM",
    "Const",
    "Expression",
    "Gaussian",
    "LinearForm",
    "Marginal",
    "Mixture2",
    "NoiseTerm",
    "RootForm",
    "SEModel",
    "SamplerConfig",
    "Sigmoid",
    "Sum",
    "Term",
    "Var",
    "analytic_marginal",
    "conditional_expectation_fit",
    "do_sample",
    "interventional_expectation",
    "proxy_slope",
    "root_form",
    "root_mean",
    "sample",
    "validate_model",
]
