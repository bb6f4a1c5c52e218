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
Named link functions r applied on top of adjusted features.
"""

from enum import Enum
from typing import Callable, Union

import numpy as np
from numpy.typing import NDArray
from scipy.special import expit


class LinkFunction(str, Enum):
    """
    Using an enumeration class to avoid spelling errors in link names
    """

    IDENTITY = "identity"
    SIGMOID = "sigmoid"
    TANH = "tanh"
    CUBIC = "cubic"


Link = Callable[[NDArray], NDArray]
LINK_MAP: dict[str, Link] = {}


def register_link(name: Union[str, LinkFunction]):
    """Decorator to register a link function with a given name."""

    def decorator(fn: Link) -> Link:
        LINK_MAP[getattr(name, "value", name)] = fn
        return fn

    return decorator


def get_link(name: Union[str, LinkFunction]) -> Link:
    key = getattr(name, "value", name)
    if key not in LINK_MAP:
        raise ValueError(f"Unknown link {key}, available: {sorted(LINK_MAP)}.")

    return LINK_MAP[key]


@register_link(LinkFunction.IDENTITY)
def identity_link(values: NDArray) -> NDArray:
    return values


@register_link(LinkFunction.SIGMOID)
def sigmoid_link(values: NDArray) -> NDArray:
    return expit(values)


@register_link(LinkFunction.TANH)
def tanh_link(values: NDArray) -> NDArray:
    return np.tanh(values)


@register_link(LinkFunction.CUBIC)
def cubic_link(values: NDArray) -> NDArray:
    return values**3
