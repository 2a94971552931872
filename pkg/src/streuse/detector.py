"""Windowed similarity detection of reusable (token, channel) entries.

Along each of the three grid axes, tokens are grouped into non-overlapping
windows of K consecutive positions (all other coordinates fixed). For each
window and channel, the spread of the K channel values decides whether the
non-first members may copy that channel's partial attention scores from the
window head. The three per-axis masks are merged with a logical OR.

A head along one axis can itself be marked reusable along another axis.
Stored representatives are therefore resolved to the root of the copy
chain, so that every representative of a reusable entry is itself computed.
Chain hops strictly zero out one more coordinate modulo K each step, so
resolution always terminates (at most one hop per axis).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import TokenGrid

GRANULARITIES = ("channel", "token")

# axis name -> dimension of the (T, H, W) volume it windows over
_AXIS_DIM = {"t": 0, "y": 1, "x": 2}


@dataclass(frozen=True)
class AxisThresholds:
    """Per-axis similarity thresholds. A negative value disables that axis."""

    theta_t: float
    theta_x: float
    theta_y: float

    @classmethod
    def uniform(cls, theta: float) -> "AxisThresholds":
        return cls(theta, theta, theta)


@dataclass
class ReuseMask:
    """Per (token, channel) reuse decisions plus copy sources.

    reusable[t, c] says the entry's partial scores are copied rather than
    computed; representative[t, c] is the token to copy from (t itself
    wherever the entry is not reusable). Representatives of reusable
    entries are always computed tokens, never themselves reusable.
    """

    reusable: np.ndarray
    representative: np.ndarray
    window_size: int

    def __post_init__(self):
        self.reusable = np.asarray(self.reusable, dtype=bool)
        self.representative = np.asarray(self.representative, dtype=np.int64)
        if self.reusable.ndim != 2 or self.reusable.shape != self.representative.shape:
            raise ValueError("reusable and representative must share an (N, d) shape")
        if self.window_size < 2:
            raise ValueError(f"window size must be >= 2, got {self.window_size}")

    @property
    def n_tokens(self) -> int:
        return self.reusable.shape[0]

    @property
    def n_channels(self) -> int:
        return self.reusable.shape[1]

    @property
    def reuse_ratio(self) -> float:
        return float(self.reusable.mean())

    def validate(self) -> None:
        """Raise if the mask violates its structural invariants."""
        n = self.n_tokens
        ident = np.arange(n, dtype=np.int64)[:, None]
        if np.any(self.representative[~self.reusable] != np.broadcast_to(ident, self.representative.shape)[~self.reusable]):
            raise ValueError("non-reusable entries must be their own representative")
        if np.any(self.representative[self.reusable] == np.nonzero(self.reusable)[0]):
            raise ValueError("reusable entries must not reference themselves")
        if self.representative.min() < 0 or self.representative.max() >= n:
            raise ValueError("representative index out of range")
        ref_reusable = np.take_along_axis(self.reusable, self.representative, axis=0)
        if np.any(self.reusable & ref_reusable):
            raise ValueError("representatives of reusable entries must be computed")

    @classmethod
    def empty(cls, n_tokens: int, n_channels: int, window_size: int = 2) -> "ReuseMask":
        rep = np.tile(np.arange(n_tokens, dtype=np.int64)[:, None], (1, n_channels))
        return cls(np.zeros((n_tokens, n_channels), dtype=bool), rep, window_size)


def delta(window, k: int) -> float:
    """Spread sqrt(sum((a_i - mean)^2) / K) of a K-value window.

    Exactly 0.0 for a constant window, regardless of rounding in the mean.
    """
    if k < 2:
        raise ValueError(f"window size must be >= 2, got {k}")
    vals = [float(v) for v in window]
    if len(vals) != k:
        raise ValueError(f"window length {len(vals)} does not match K={k}")
    first = vals[0]
    if all(v == first for v in vals):
        return 0.0
    mean = sum(vals) / k
    return math.sqrt(sum((v - mean) ** 2 for v in vals) / k)


def _passes(spread: np.ndarray, constant: np.ndarray, theta) -> np.ndarray:
    # Strict comparison, except that bit-identical windows (lossless to
    # copy) also pass at theta >= 0. Keying on constancy rather than on
    # spread == 0 keeps theta = 0 exact even where squared deviations
    # underflow to zero.
    theta = np.asarray(theta, dtype=np.float64)
    return (spread < theta) | (constant & (theta >= 0.0))


def detect_axis(
    tokens: TokenGrid,
    axis: str,
    theta,
    k: int,
    granularity: str = "channel",
) -> ReuseMask:
    """Mark window members similar enough to copy from their window head.

    ``theta`` is a scalar or a per-channel array of thresholds. Positions in
    a trailing remainder (axis extent not divisible by K) form no window and
    are never marked. ``granularity="token"`` requires every channel of the
    window to pass before marking, and then marks all channels at once.
    """
    if axis not in _AXIS_DIM:
        raise ValueError(f"axis must be one of {sorted(_AXIS_DIM)}, got {axis!r}")
    if granularity not in GRANULARITIES:
        raise ValueError(f"granularity must be one of {GRANULARITIES}, got {granularity!r}")
    if k < 2:
        raise ValueError(f"window size must be >= 2, got {k}")
    s = tokens.shape
    dim = _AXIS_DIM[axis]
    extent = (s.t, s.h, s.w)[dim]
    if k > extent:
        raise ValueError(f"window size {k} exceeds {axis}-axis extent {extent}")

    moved = np.moveaxis(tokens.volume(), dim, 0)  # (extent, A, B, d)
    nwin = extent // k
    windows = moved[: nwin * k].reshape(nwin, k, *moved.shape[1:])
    spread = windows.std(axis=1)
    constant = (windows == windows[:, :1]).all(axis=1)
    spread = np.where(constant, 0.0, spread)
    passed = _passes(spread, constant, theta)  # (nwin, A, B, d)
    if granularity == "token":
        passed = np.broadcast_to(passed.all(axis=-1, keepdims=True), passed.shape)

    marks = np.zeros(moved.shape, dtype=bool)
    expanded = np.repeat(passed, k, axis=0)
    expanded[0::k] = False  # window heads stay computed
    marks[: nwin * k] = expanded
    marks = np.moveaxis(marks, 0, dim).reshape(s.tokens, s.d)

    tt, hh, ww = np.indices((s.t, s.h, s.w))
    coords = [tt, hh, ww]
    coords[dim] = coords[dim] // k * k  # head position along the axis
    head_flat = ((coords[0] * s.h + coords[1]) * s.w + coords[2]).reshape(s.tokens)
    ident = np.arange(s.tokens, dtype=np.int64)
    rep = np.where(marks, head_flat[:, None], ident[:, None]).astype(np.int64)
    return ReuseMask(marks, rep, k)


def _resolve_roots(rep: np.ndarray) -> np.ndarray:
    """Follow representative chains to their fixpoint via pointer doubling."""
    r = rep
    for _ in range(64):
        rr = np.take_along_axis(r, r, axis=0)
        if np.array_equal(rr, r):
            return r
        r = rr
    raise ValueError("representative chains do not terminate (cycle in input masks)")


def combine_or(mask_t: ReuseMask, mask_x: ReuseMask, mask_y: ReuseMask) -> ReuseMask:
    """Merge per-axis masks: reusable in any axis, t > x > y source priority.

    The representative is taken from the highest-priority axis that marked
    the entry, then resolved to the root of its copy chain so the stored
    source is always a computed token.
    """
    masks = (mask_t, mask_x, mask_y)
    shape = mask_t.reusable.shape
    if any(m.reusable.shape != shape for m in masks):
        raise ValueError("per-axis masks must share dimensions")
    if len({m.window_size for m in masks}) != 1:
        raise ValueError("per-axis masks must share a window size")
    reusable = mask_t.reusable | mask_x.reusable | mask_y.reusable
    ident = np.tile(np.arange(shape[0], dtype=np.int64)[:, None], (1, shape[1]))
    rep = np.where(
        mask_t.reusable,
        mask_t.representative,
        np.where(mask_x.reusable, mask_x.representative, np.where(mask_y.reusable, mask_y.representative, ident)),
    )
    roots = _resolve_roots(rep)
    # even-length cycles collapse to self-loops under pointer doubling;
    # a sound result needs every root of a reusable entry to be computed
    bad = reusable & (np.take_along_axis(reusable, roots, axis=0) | (roots == ident))
    if bad.any():
        raise ValueError("representative chains do not terminate (cycle in input masks)")
    return ReuseMask(reusable, roots, mask_t.window_size)


def detect(
    tokens: TokenGrid,
    thresholds: AxisThresholds,
    k: int = 2,
    granularity: str = "channel",
) -> ReuseMask:
    """Three-axis similarity check OR-merged into one ReuseMask."""
    mask_t = detect_axis(tokens, "t", thresholds.theta_t, k, granularity)
    mask_x = detect_axis(tokens, "x", thresholds.theta_x, k, granularity)
    mask_y = detect_axis(tokens, "y", thresholds.theta_y, k, granularity)
    return combine_or(mask_t, mask_x, mask_y)
