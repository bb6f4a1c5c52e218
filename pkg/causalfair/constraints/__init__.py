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

from .constraint import LinearConstraint, format_linear
from .deriver import (
    DerivationReport,
    SymbolicRootForm,
    check_expressibility,
    derive_proxy_constraint,
    derive_unresolved_constraint,
    symbolic_root_form,
)
from .hypothesis import HypothesisClass, theta_name


__all__ = [
    "DerivationReport",
    "HypothesisClass",
    "LinearConstraint",
    "SymbolicRootForm",
    "check_expressibility",
    "derive_proxy_constraint",
    "derive_unresolved_constraint",
    "format_linear",
    "symbolic_root_form",
    "theta_name",
]
