"""Error and savings metrics against the dense oracle."""

from __future__ import annotations

import math

import numpy as np

from .engine import RunStats
from .numerics import Matrix, matrix

DEFAULT_ATTENTION_FRACTION = 0.78


def mse(a: Matrix, b: Matrix) -> float:
    """Mean squared elementwise difference; 0 exactly iff the inputs match."""
    a = matrix(a)
    b = matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    return float(np.mean(diff * diff))


def psnr(a: Matrix, b: Matrix, peak: float) -> float:
    """10 log10(peak^2 / mse) in dB; +inf where the inputs are identical."""
    if peak <= 0:
        raise ValueError(f"peak must be positive, got {peak}")
    err = mse(a, b)
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / err)


def theoretical_speedup(stats: RunStats, attention_fraction: float = DEFAULT_ATTENTION_FRACTION) -> float:
    """Amdahl speedup from shrinking the Q K^T stage.

    1 / ((1 - f) + f * actual/dense) with f the fraction of end-to-end time
    spent in the accelerated stage.
    """
    if not 0.0 < attention_fraction <= 1.0:
        raise ValueError(f"attention fraction must be in (0, 1], got {attention_fraction}")
    if stats.qk_flops_dense <= 0:
        raise ValueError("dense flop count must be positive")
    remaining = stats.qk_flops_actual / stats.qk_flops_dense
    return 1.0 / ((1.0 - attention_fraction) + attention_fraction * remaining)
