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
CLI config
"""

import os
from dataclasses import asdict, dataclass, field, fields, is_dataclass
from typing import Optional, Tuple

from ..sem.config import SamplerConfig
from ..utils.logger import LOGGERS
from ..validator.config import ValidatorConfig


def recursive_post_init(dataclass_obj):
    if hasattr(dataclass_obj, "post_init"):
        dataclass_obj.post_init()

    for attr in fields(dataclass_obj):
        if is_dataclass(getattr(dataclass_obj, attr.name)):
            recursive_post_init(getattr(dataclass_obj, attr.name))


@dataclass
class TrackerConfig:
    logger: Tuple[str, ...] = ()
    """progress loggers, support `console` (stderr) and `file`; empty disables progress logging"""
    log_dir: Optional[str] = None
    """directory of the `file` logger, defaults to logs/causalfair"""

    def post_init(self):
        for name in self.logger:
            if name not in LOGGERS:
                raise ValueError(f"{name} is not supported, choose from {sorted(LOGGERS)}.")

        if self.log_dir is not None:
            self.log_dir = os.path.abspath(self.log_dir)


@dataclass
class CausalFairConfig:
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    validator: ValidatorConfig = field(default_factory=ValidatorConfig)
    tracker: TrackerConfig = field(default_factory=TrackerConfig)

    def deep_post_init(self):
        recursive_post_init(self)

    def to_dict(self):
        return asdict(self)
