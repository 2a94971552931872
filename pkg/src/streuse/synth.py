"""Seeded generators of token grids with controllable spatio-temporal structure.

All randomness flows through explicit seeds into Philox, a named 64-bit
counter-based generator, so every grid is bit-reproducible across platforms.
The correlated generator applies AR(1) smoothing with unit marginal variance
along each axis; the paired Q/K generator builds the two canonical attention
regimes (a per-frame pattern repeated across frames, or per-frame constants
with frame-varying means).
"""

from __future__ import annotations

import numpy as np

from .grid import ChannelPartition, GridShape, TokenGrid, default_partition

REGIMES = ("spatial", "temporal", "mixed")


def _rng(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[np.uint64(seed), np.uint64(stream)]))


def gen_random(shape: GridShape, seed: int, partition: ChannelPartition | None = None) -> TokenGrid:
    """i.i.d. standard normal token values."""
    part = partition if partition is not None else default_partition(shape.d)
    values = _rng(seed).standard_normal((shape.tokens, shape.d))
    return TokenGrid(shape, part, values)


def _smooth_axis(volume: np.ndarray, dim: int, rho: float) -> np.ndarray:
    # AR(1) with unit marginal variance: x_p = rho x_{p-1} + sqrt(1-rho^2) e_p
    if rho == 0.0:
        return volume
    out = np.moveaxis(volume, dim, 0).copy()
    scale = np.sqrt(1.0 - rho * rho)
    for p in range(1, out.shape[0]):
        out[p] = rho * out[p - 1] + scale * out[p]
    return np.moveaxis(out, 0, dim)


def gen_correlated(
    shape: GridShape,
    rho_t: float,
    rho_x: float,
    rho_y: float,
    seed: int,
    partition: ChannelPartition | None = None,
) -> TokenGrid:
    """AR(1)-smoothed grid; rho=0 leaves an axis i.i.d., rho=1 makes it constant.

    Smoothing is applied along t, then h (y), then w (x).
    """
    for name, rho in (("rho_t", rho_t), ("rho_x", rho_x), ("rho_y", rho_y)):
        if not 0.0 <= rho <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {rho}")
    base = gen_random(shape, seed, partition)
    vol = base.volume().copy()
    vol = _smooth_axis(vol, 0, rho_t)
    vol = _smooth_axis(vol, 1, rho_y)
    vol = _smooth_axis(vol, 2, rho_x)
    return base.with_values(vol.reshape(shape.tokens, shape.d))


def _regime_values(shape: GridShape, regime: str, rng: np.random.Generator) -> np.ndarray:
    frame = shape.h * shape.w
    if regime == "spatial":
        # one spatial pattern repeated identically in every frame
        pattern = rng.standard_normal((frame, shape.d))
        return np.tile(pattern, (shape.t, 1))
    # temporal: constant within each frame, mean varies per frame
    means = rng.standard_normal((shape.t, shape.d))
    return np.repeat(means, frame, axis=0)


def gen_paired_qk(
    shape: GridShape,
    regime: str,
    seed: int,
    partition: ChannelPartition | None = None,
    noise: float = 0.0,
) -> tuple[TokenGrid, TokenGrid]:
    """Q/K pair exhibiting a spatially or temporally dominated attention map.

    ``mixed`` assigns the temporal channel group frame-varying values and the
    two spatial groups the repeated-pattern structure. ``noise`` adds i.i.d.
    gaussian perturbation on top (0 keeps the structure exact).
    """
    if regime not in REGIMES:
        raise ValueError(f"regime must be one of {REGIMES}, got {regime!r}")
    part = partition if partition is not None else default_partition(shape.d)
    grids = []
    for stream in (0, 1):
        rng = _rng(seed, stream)
        if regime == "mixed":
            values = np.empty((shape.tokens, shape.d))
            spatial = _regime_values(shape, "spatial", rng)
            temporal = _regime_values(shape, "temporal", rng)
            values[:, : part.d_t] = temporal[:, : part.d_t]
            values[:, part.d_t :] = spatial[:, part.d_t :]
        else:
            values = _regime_values(shape, regime, rng)
        if noise > 0.0:
            values = values + noise * _rng(seed, stream + 2).standard_normal(values.shape)
        grids.append(TokenGrid(shape, part, values))
    return grids[0], grids[1]
