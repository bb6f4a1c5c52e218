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
Ancestral and interventional sampling.

Rows are generated in chunks of `chunk_size`. Node `v` in chunk `k` draws from its own generator keyed
(seed, index(v), k), so the chunks can be spread over threads without changing a single value.
"""

from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Union

import numpy as np
from numpy.typing import NDArray

from ..errors import BadNoiseParam
from ..graph import NodeRole, intervene
from ..protocol import SampleMatrix
from ..utils.rng import check_seed, chunk_generator, derive_seed
from .config import SamplerConfig
from .expectations import analytic_marginal
from .model import Marginal, SEModel, validate_model


Intervention = Union[float, Marginal]
NodeSampler = Callable[[dict[str, NDArray], np.random.Generator, int], NDArray]


def _equation_sampler(m: SEModel, name: str) -> NodeSampler:
    expr = m.equations[name]

    def draw(columns: dict[str, NDArray], rng: np.random.Generator, size: int) -> NDArray:
        try:
            return expr.evaluate(columns, rng, size)
        except FloatingPointError as exc:
            raise BadNoiseParam(name, str(exc)) from None

    return draw


def _constant_sampler(value: float) -> NodeSampler:
    def draw(columns: dict[str, NDArray], rng: np.random.Generator, size: int) -> NDArray:
        return np.full(size, value, dtype=np.float64)

    return draw


def _gaussian_sampler(mean: float, std: float) -> NodeSampler:
    def draw(columns: dict[str, NDArray], rng: np.random.Generator, size: int) -> NDArray:
        return mean + std * rng.standard_normal(size)

    return draw


def _reservoir_sampler(pool: NDArray) -> NodeSampler:
    def draw(columns: dict[str, NDArray], rng: np.random.Generator, size: int) -> NDArray:
        return pool[rng.integers(0, len(pool), size)]

    return draw


def _marginal_sampler(
    m: SEModel, name: str, seed: int, config: SamplerConfig, provenance: dict
) -> NodeSampler:
    if m.graph.is_root(name):
        provenance[name] = {"method": "root_equation"}
        return _equation_sampler(m, name)

    gaussian = analytic_marginal(m, name)
    if gaussian is not None:
        mean, std = gaussian
        provenance[name] = {"method": "analytic", "mean": mean, "std": std}
        return _gaussian_sampler(mean, std) if std > 0 else _constant_sampler(mean)

    reservoir_seed = derive_seed(seed, "reservoir", m.graph.index(name))
    pool = sample(m, config.reservoir_size, reservoir_seed, config, include_latent=True)[name]
    provenance[name] = {"method": "reservoir", "reservoir_seed": reservoir_seed, "reservoir_size": len(pool)}
    return _reservoir_sampler(pool)


def _generate(
    plan: list[tuple[str, int, NodeSampler]],
    n: int,
    seed: int,
    config: SamplerConfig,
) -> dict[str, NDArray]:
    def process_one_chunk(chunk: int) -> dict[str, NDArray]:
        size = min(config.chunk_size, n - chunk * config.chunk_size)
        columns = {}
        for name, stream, draw in plan:
            rng = chunk_generator(seed, stream, chunk)
            columns[name] = np.asarray(draw(columns, rng, size), dtype=np.float64)

        return columns

    num_chunks = -(-n // config.chunk_size)
    if config.threads > 1 and num_chunks > 1:
        with ThreadPoolExecutor(max_workers=min(config.threads, num_chunks)) as executor:
            parts = list(executor.map(process_one_chunk, range(num_chunks)))
    else:
        parts = [process_one_chunk(chunk) for chunk in range(num_chunks)]

    if not parts:
        return {name: np.zeros(0, dtype=np.float64) for name, _, _ in plan}

    return {name: np.concatenate([part[name] for part in parts]) for name, _, _ in plan}


def do_sample(
    m: SEModel,
    interventions: Mapping[str, Intervention],
    n: int,
    seed: int,
    config: Optional[SamplerConfig] = None,
    include_latent: bool = False,
) -> SampleMatrix:
    """Sample n rows from the model after replacing the equation of every intervened node.

    Args:
        interventions: `{name: value}` fixes the node to a constant, `{name: Marginal()}` replaces it by an
            independent per-row draw from its pre-intervention marginal.
        include_latent: also return columns of latent nodes.

    Returns:
        SampleMatrix: columns of every node that has an equation or an intervention, in declaration order.
    """
    config = config or SamplerConfig()
    seed = check_seed(seed)
    if n < 0:
        raise ValueError(f"Number of rows must be non-negative, got {n}.")

    validate_model(m)
    g = m.graph
    for name in interventions:
        g.check_node(name)

    surgered = intervene(g, interventions)
    provenance = {}
    samplers = {}
    for name in surgered.topological_order():
        if name in interventions:
            value = interventions[name]
            if isinstance(value, Marginal):
                samplers[name] = _marginal_sampler(m, name, seed, config, provenance)
            else:
                samplers[name] = _constant_sampler(float(value))
        elif m.has_equation(name):
            samplers[name] = _equation_sampler(m, name)

    plan = [(name, g.index(name), draw) for name, draw in samplers.items()]
    columns = _generate(plan, n, seed, config)
    keep = [
        name for name in g.names if name in columns and (include_latent or g.role_of(name) != NodeRole.LATENT)
    ]
    meta_info = {
        "seed": seed,
        "n": n,
        "model": m.name,
        "fingerprint": m.fingerprint,
        "chunk_size": config.chunk_size,
        "interventions": {name: str(value) for name, value in interventions.items()},
    }
    if provenance:
        meta_info["marginals"] = provenance
        meta_info["marginal_draws"] = "independent per row"

    return SampleMatrix(columns={name: columns[name] for name in keep}, meta_info=meta_info)


def sample(
    m: SEModel, n: int, seed: int, config: Optional[SamplerConfig] = None, include_latent: bool = False
) -> SampleMatrix:
    """Ancestral sampling: roots first, then every equation in topological order."""
    return do_sample(m, {}, n, seed, config=config, include_latent=include_latent)
