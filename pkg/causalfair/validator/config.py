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
Validator config
"""

from dataclasses import asdict, dataclass


@dataclass
class ValidatorConfig:
    alpha: float = 0.01
    """significance level of the two-sample KS decision rule"""
    mean_sigma: float = 4.0
    """mean test passes iff |mean difference| < mean_sigma * pooled sd / sqrt(n)"""
    num_bins: int = 10
    """quantile bins per feature in individual mode, 10 gives deciles"""
    min_bin_rows: int = 100
    """bins with fewer rows in either arm are skipped in individual mode"""
    threads: int = 1
    """do-arms sampled concurrently"""

    def post_init(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"validator.alpha must be in (0, 1), got {self.alpha}.")

        if self.mean_sigma <= 0:
            raise ValueError(f"validator.mean_sigma must be positive, got {self.mean_sigma}.")

        if self.num_bins < 2:
            raise ValueError(f"validator.num_bins must be at least 2, got {self.num_bins}.")

        if self.min_bin_rows < 1 or self.threads < 1:
            raise ValueError("validator.min_bin_rows and validator.threads must be positive.")

    def to_dict(self):
        return asdict(self)
