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

from .loader import MODEL_SUFFIX, CompiledSpec, compile_spec, load_model
from .parser import parse_model
from .serializer import serialize_model, spec_from_graph
from .spec import Diagnostic, DiagnosticCode, EdgeDecl, EqDecl, ModelSpec, NodeDecl, PredictorDecl, Span


__all__ = [
    "MODEL_SUFFIX",
    "CompiledSpec",
    "Diagnostic",
    "DiagnosticCode",
    "EdgeDecl",
    "EqDecl",
    "ModelSpec",
    "NodeDecl",
    "PredictorDecl",
    "Span",
    "compile_spec",
    "load_model",
    "parse_model",
    "serialize_model",
    "spec_from_graph",
]
