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

from .audits import (
    AuditVerdict,
    GraphAudit,
    adjustment_identifiable,
    audit_graph,
    potential_proxy_discrimination,
    unawareness_safe,
    unresolved_discrimination,
)
from .causal_graph import CausalGraph, NodeRole, build_graph
from .paths import DirectedPath, directed_paths, intervene, is_blocked, terminal_ancestors


__all__ = [
    "AuditVerdict",
    "CausalGraph",
    "DirectedPath",
    "GraphAudit",
    "NodeRole",
    "adjustment_identifiable",
    "audit_graph",
    "build_graph",
    "directed_paths",
    "intervene",
    "is_blocked",
    "potential_proxy_discrimination",
    "terminal_ancestors",
    "unawareness_safe",
    "unresolved_discrimination",
]
