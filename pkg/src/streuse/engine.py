"""Reuse-based attention: sparse per-channel partial scores with copies.

For each channel c, the score entry (i, j) is computed as Q[i,c]*K[j,c]/sqrt(d)
only when neither token is marked reusable at c; otherwise it is copied from
the fully-representative entry (rep_q(i,c), rep_k(j,c)). Aggregating the
per-channel partials and finishing with a dense softmax and V product makes
the result identical, bit for bit, to dense attention run on representative-
substituted Q and K.

Two masking baselines are provided for comparison: skipping the same entries
(their logit contribution becomes 0) and zeroing the globally lowest-valued
fraction of Q/K token channels before a dense pass.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .detector import ReuseMask
from .numerics import Matrix, matmul, matrix, row_softmax


@dataclass(frozen=True)
class RunStats:
    """Exact accounting of the Q K^T stage.

    Every (i, j, c) partial-score entry is either computed or copied;
    a computed entry costs 2 flops (multiply + add), a copied one costs 0.
    Copies are memory traffic, not flops.
    """

    computed_entries: int
    copied_entries: int
    qk_flops_dense: int
    qk_flops_actual: int
    reuse_ratio_q: float
    reuse_ratio_k: float
    entry_reuse_ratio: float

    def __post_init__(self):
        if self.qk_flops_actual > self.qk_flops_dense:
            raise ValueError("actual flops cannot exceed dense flops")


def _make_stats(n: int, d: int, computed: int, ratio_q: float, ratio_k: float) -> RunStats:
    total = n * n * d
    copied = total - computed
    return RunStats(
        computed_entries=computed,
        copied_entries=copied,
        qk_flops_dense=2 * total,
        qk_flops_actual=2 * computed,
        reuse_ratio_q=ratio_q,
        reuse_ratio_k=ratio_k,
        entry_reuse_ratio=copied / total,
    )


def _check_inputs(q: Matrix, k: Matrix, v: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    q = matrix(q)
    k = matrix(k)
    v = matrix(v)
    if q.shape != k.shape or q.shape != v.shape:
        raise ValueError(f"Q/K/V shapes differ: {q.shape}, {k.shape}, {v.shape}")
    if q.shape[1] == 0:
        raise ValueError("attention requires at least one channel")
    return q, k, v


def _check_mask(mask: ReuseMask, n: int, d: int, name: str, need_reps: bool) -> None:
    if mask.reusable.shape != (n, d):
        raise ValueError(f"{name} shape {mask.reusable.shape} does not match ({n}, {d})")
    if need_reps:  # the skip baseline never reads representatives
        mask.validate()


def substitute(x: Matrix, mask: ReuseMask) -> Matrix:
    """Replace each reusable entry by its representative's value.

    This is the semantic meaning of score reuse: copying partial scores is
    equivalent to running dense attention on the substituted inputs.
    Idempotent, since representatives are never themselves reusable.
    """
    x = matrix(x)
    if x.shape != mask.reusable.shape:
        raise ValueError(f"matrix shape {x.shape} does not match mask {mask.reusable.shape}")
    return np.take_along_axis(x, mask.representative, axis=0)


def _reuse_channel(q, k, mask_q, mask_k, c, scale, fill_copies):
    n = q.shape[0]
    uq = np.flatnonzero(~mask_q.reusable[:, c])
    uk = np.flatnonzero(~mask_k.reusable[:, c])
    kernel = np.outer(q[uq, c], k[uk, c]) * scale
    if fill_copies:
        inv_q = np.empty(n, dtype=np.int64)
        inv_q[uq] = np.arange(uq.size)
        inv_k = np.empty(n, dtype=np.int64)
        inv_k[uk] = np.arange(uk.size)
        rows = inv_q[mask_q.representative[:, c]]
        cols = inv_k[mask_k.representative[:, c]]
        scores = kernel[rows[:, None], cols[None, :]]
    else:
        scores = np.zeros((n, n), dtype=np.float64)
        scores[np.ix_(uq, uk)] = kernel
    return scores, uq.size * uk.size


def _sparse_attention(q, k, v, mask_q, mask_k, fill_copies, workers):
    q, k, v = _check_inputs(q, k, v)
    n, d = q.shape
    _check_mask(mask_q, n, d, "mask_q", need_reps=fill_copies)
    _check_mask(mask_k, n, d, "mask_k", need_reps=fill_copies)
    scale = 1.0 / math.sqrt(d)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_channel = list(
                pool.map(
                    lambda c: _reuse_channel(q, k, mask_q, mask_k, c, scale, fill_copies),
                    range(d),
                )
            )
    else:
        per_channel = [
            _reuse_channel(q, k, mask_q, mask_k, c, scale, fill_copies) for c in range(d)
        ]

    logits = np.zeros((n, n), dtype=np.float64)
    computed = 0
    for scores, n_computed in per_channel:  # fixed channel order keeps bits stable
        logits += scores
        computed += n_computed

    attn = row_softmax(logits)
    out = matmul(attn, v)
    stats = _make_stats(
        n, d, computed, float(mask_q.reusable.mean()), float(mask_k.reusable.mean())
    )
    return out, attn, stats


def reuse_attention(
    q: Matrix,
    k: Matrix,
    v: Matrix,
    mask_q: ReuseMask,
    mask_k: ReuseMask,
    workers: int = 1,
) -> tuple[Matrix, Matrix, RunStats]:
    """Attention with copied partial scores for reusable (token, channel) entries.

    Equals dense_attention(substitute(Q, mask_q), substitute(K, mask_k), V)
    bit for bit. ``workers`` parallelises the channel loop without changing
    the result.
    """
    return _sparse_attention(q, k, v, mask_q, mask_k, fill_copies=True, workers=workers)


def masking_baseline_skip(
    q: Matrix,
    k: Matrix,
    v: Matrix,
    mask_q: ReuseMask,
    mask_k: ReuseMask,
    workers: int = 1,
) -> tuple[Matrix, Matrix, RunStats]:
    """Same entry selection as reuse_attention, but skipped entries add 0."""
    return _sparse_attention(q, k, v, mask_q, mask_k, fill_copies=False, workers=workers)


def magnitude_selection(q: Matrix, k: Matrix, save_ratio: float) -> tuple[np.ndarray, np.ndarray]:
    """Boolean masks of the Q/K entries zeroed by the value-masking baseline.

    One global ranking over all (token, channel) entries of Q and K by
    value, ascending, ties broken by flat index; the lowest ``save_ratio``
    fraction is selected.
    """
    if not 0.0 <= save_ratio <= 1.0:
        raise ValueError(f"save_ratio must be in [0, 1], got {save_ratio}")
    total = q.size + k.size
    n_zap = int(round(save_ratio * total))
    flat = np.concatenate([q.ravel(), k.ravel()])
    order = np.argsort(flat, kind="stable")
    zap = np.zeros(total, dtype=bool)
    zap[order[:n_zap]] = True
    return zap[: q.size].reshape(q.shape), zap[q.size :].reshape(k.shape)


def magnitude_entry_ratio(q: Matrix, k: Matrix, save_ratio: float) -> float:
    """Fraction of (i, j, c) score entries skipped at the given save_ratio."""
    q, k = matrix(q), matrix(k)
    zap_q, zap_k = magnitude_selection(q, k, save_ratio)
    n, d = q.shape
    live_q = n - zap_q.sum(axis=0)
    live_k = n - zap_k.sum(axis=0)
    computed = int(np.sum(live_q * live_k))
    return 1.0 - computed / (n * n * d)


def calibrate_magnitude_save_ratio(q: Matrix, k: Matrix, target_entry_ratio: float) -> float:
    """save_ratio whose skipped-entry fraction best matches the target.

    The entry ratio is a monotone step function of the number of zeroed
    values, so an integer bisection finds the closest achievable point.
    """
    if not 0.0 <= target_entry_ratio <= 1.0:
        raise ValueError(f"target entry ratio must be in [0, 1], got {target_entry_ratio}")
    total = q.size + k.size
    lo, hi = 0, total
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if magnitude_entry_ratio(q, k, mid / total) < target_entry_ratio:
            lo = mid
        else:
            hi = mid
    best = min(
        (lo / total, hi / total),
        key=lambda s: abs(magnitude_entry_ratio(q, k, s) - target_entry_ratio),
    )
    return best


def masking_baseline_magnitude(
    q: Matrix,
    k: Matrix,
    v: Matrix,
    save_ratio: float,
) -> tuple[Matrix, Matrix, RunStats]:
    """Zero the lowest-valued Q/K token channels, then run dense attention."""
    q, k, v = _check_inputs(q, k, v)
    n, d = q.shape
    zap_q, zap_k = magnitude_selection(q, k, save_ratio)
    qz = q.copy()
    kz = k.copy()
    qz[zap_q] = 0.0
    kz[zap_k] = 0.0

    scale = 1.0 / math.sqrt(d)
    logits = np.zeros((n, n), dtype=np.float64)
    for c in range(d):
        logits += np.outer(qz[:, c], kz[:, c]) * scale
    attn = row_softmax(logits)
    out = matmul(attn, v)

    live_q = n - zap_q.sum(axis=0)
    live_k = n - zap_k.sum(axis=0)
    computed = int(np.sum(live_q * live_k))
    stats = _make_stats(n, d, computed, float(zap_q.mean()), float(zap_k.mean()))
    return out, attn, stats
