"""Token grid geometry, channel partitioning, and rotary position encoding.

Latent video tokens live on a (T, H, W) grid with d channels each. Tokens
are stored flat in t-major order (t, then h, then w). The d channels are
split into three groups that encode position along one axis each: the
temporal group is keyed by t, the x group by w, and the y group by h.
Rotary encoding rotates consecutive channel pairs within a group by an
angle proportional to the token's coordinate along that group's axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import Matrix, matrix

DEFAULT_ROPE_BASE = 10000.0


@dataclass(frozen=True)
class GridShape:
    """Grid extents: frames t, rows h, columns w, channels d."""

    t: int
    h: int
    w: int
    d: int

    def __post_init__(self):
        if min(self.t, self.h, self.w) < 1:
            raise ValueError(f"grid extents must be positive, got {self}")
        if self.d < 2 or self.d % 2:
            raise ValueError(f"channel count must be even and >= 2, got d={self.d}")

    @property
    def tokens(self) -> int:
        return self.t * self.h * self.w


@dataclass(frozen=True)
class ChannelPartition:
    """Sizes of the temporal / x / y channel groups. Each must be even."""

    d_t: int
    d_x: int
    d_y: int

    def __post_init__(self):
        for name, size in (("d_t", self.d_t), ("d_x", self.d_x), ("d_y", self.d_y)):
            if size < 0 or size % 2:
                raise ValueError(f"channel group {name}={size} must be even and >= 0")

    @property
    def total(self) -> int:
        return self.d_t + self.d_x + self.d_y


def default_partition(d: int) -> ChannelPartition:
    """Roughly 1/4 temporal and 3/8 per spatial axis; all groups even.

    d=16 gives the 4/6/6 split used throughout the tests.
    """
    if d < 2 or d % 2:
        raise ValueError(f"channel count must be even and >= 2, got d={d}")
    spatial = (3 * d // 8) // 2 * 2
    return ChannelPartition(d_t=d - 2 * spatial, d_x=spatial, d_y=spatial)


def index_of(t: int, h: int, w: int, shape: GridShape) -> int:
    """Flat token index for coordinates (t, h, w), t-major ordering."""
    if not (0 <= t < shape.t and 0 <= h < shape.h and 0 <= w < shape.w):
        raise ValueError(f"coordinates ({t},{h},{w}) out of range for {shape}")
    return (t * shape.h + h) * shape.w + w


def coords_of(index: int, shape: GridShape) -> tuple[int, int, int]:
    """Inverse of index_of."""
    if not 0 <= index < shape.tokens:
        raise ValueError(f"token index {index} out of range for {shape}")
    t, rest = divmod(index, shape.h * shape.w)
    h, w = divmod(rest, shape.w)
    return t, h, w


@dataclass(frozen=True)
class TokenGrid:
    """A (T*H*W) x d matrix of token channel values plus its geometry."""

    shape: GridShape
    partition: ChannelPartition
    values: Matrix

    def __post_init__(self):
        object.__setattr__(self, "values", matrix(self.values))
        if self.partition.total != self.shape.d:
            raise ValueError(
                f"partition {self.partition} does not cover d={self.shape.d}"
            )
        if self.values.shape != (self.shape.tokens, self.shape.d):
            raise ValueError(
                f"values shape {self.values.shape} does not match "
                f"{self.shape.tokens} tokens x {self.shape.d} channels"
            )

    def volume(self) -> np.ndarray:
        """Values reshaped to (T, H, W, d)."""
        s = self.shape
        return self.values.reshape(s.t, s.h, s.w, s.d)

    def with_values(self, values: Matrix) -> "TokenGrid":
        return TokenGrid(self.shape, self.partition, values)


def rotate_pairs(x: np.ndarray, y: np.ndarray, angles: np.ndarray):
    """Rotate 2-vectors (x, y) by ``angles``; norm of each pair is preserved."""
    c = np.cos(angles)
    s = np.sin(angles)
    return c * x - s * y, s * x + c * y


def rope_encode(tokens: TokenGrid, base: float = DEFAULT_ROPE_BASE) -> TokenGrid:
    """Apply rotary position encoding per channel group.

    Within a group of size g, consecutive channel pairs (2i, 2i+1) are
    rotated by angle p / base**(2i/g), where p is the token coordinate
    along the group's axis (t for the temporal group, w for x, h for y)
    and i is the pair index inside the group.
    """
    if base <= 0:
        raise ValueError(f"rope base must be positive, got {base}")
    s = tokens.shape
    part = tokens.partition
    tt, hh, ww = np.indices((s.t, s.h, s.w))
    coords = {
        "t": tt.reshape(-1).astype(np.float64),
        "x": ww.reshape(-1).astype(np.float64),
        "y": hh.reshape(-1).astype(np.float64),
    }
    out = tokens.values.copy()
    offset = 0
    for axis, size in (("t", part.d_t), ("x", part.d_x), ("y", part.d_y)):
        if size == 0:
            continue
        pair_idx = np.arange(size // 2, dtype=np.float64)
        freqs = base ** (-2.0 * pair_idx / size)
        angles = coords[axis][:, None] * freqs[None, :]
        x = out[:, offset : offset + size : 2]
        y = out[:, offset + 1 : offset + size : 2]
        rx, ry = rotate_pairs(x, y, angles)
        out[:, offset : offset + size : 2] = rx
        out[:, offset + 1 : offset + size : 2] = ry
        offset += size
    return tokens.with_values(out)
