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
Counter-style random streams.

A stream is addressed by (seed, key...) only, never by call order: row i of node v is drawn from
the generator keyed (seed, index(v), i // chunk_size), so chunks can be generated in any order or in
parallel and still produce bit-identical matrices.
"""

import zlib
from typing import Union

import numpy as np


SEED_MAX = 2**64 - 1

Key = Union[int, str]


def _as_int(key: Key) -> int:
    if isinstance(key, str):  # stable across processes, unlike hash()
        return zlib.crc32(key.encode("utf-8")) & 0xFFFFFFFF

    if key < 0:
        raise ValueError(f"Stream keys must be non-negative, got {key}.")

    return int(key)


def check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"Seed must be an integer, got {type(seed).__name__}.")

    if not 0 <= int(seed) <= SEED_MAX:
        raise ValueError(f"Seed must be in [0, 2**64 - 1], got {seed}.")

    return int(seed)


def seed_sequence(seed: int, *keys: Key) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=check_seed(seed), spawn_key=tuple(_as_int(key) for key in keys))


def derive_seed(seed: int, *keys: Key) -> int:
    """Derive an independent 64-bit seed from a master seed and a path of keys."""
    state = seed_sequence(seed, *keys).generate_state(2, dtype=np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def chunk_generator(seed: int, stream: Key, chunk: int) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(seed, stream, chunk))
