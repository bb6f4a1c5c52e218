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
Sampler config
"""

from dataclasses import asdict, dataclass


@dataclass
class SamplerConfig:
    chunk_size: int = 65536
    """rows per random stream chunk, changing it changes the sampled values"""
    threads: int = 1
    """worker threads for chunked generation, output does not depend on it"""
    reservoir_size: int = 1_000_000
    """draws of the unintervened model used to resample a non-Gaussian marginal"""

    def post_init(self):
        if self.chunk_size <= 0:
            raise ValueError(f"sampler.chunk_size must be positive, got {self.chunk_size}.")

        if self.threads <= 0:
            raise ValueError(f"sampler.threads must be positive, got {self.threads}.")

        if self.reservoir_size <= 0:
            raise ValueError(f"sampler.reservoir_size must be positive, got {self.reservoir_size}.")

    def to_dict(self):
        return asdict(self)
