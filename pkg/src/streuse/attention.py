"""Dense reference self-attention and its per-channel score decomposition.

The scaled logit matrix is accumulated channel by channel in ascending
channel order, each contribution being outer(Q[:, c], K[:, c]) * (1/sqrt(d)).
Summing ``partial_scores`` over all channels therefore reproduces the dense
logits bit for bit, which is what lets the reuse engine be checked against
this oracle exactly.
"""

from __future__ import annotations

import math

import numpy as np

from .numerics import Matrix, matmul, matrix, row_softmax


def _check_qk(q: Matrix, k: Matrix) -> tuple[Matrix, Matrix]:
    q = matrix(q)
    k = matrix(k)
    if q.shape != k.shape:
        raise ValueError(f"Q and K shapes differ: {q.shape} vs {k.shape}")
    if q.shape[1] == 0:
        raise ValueError("attention requires at least one channel")
    return q, k


def partial_scores(q: Matrix, k: Matrix, channel: int) -> Matrix:
    """Single-channel score contribution Q[i,c] * K[j,c] / sqrt(d)."""
    q, k = _check_qk(q, k)
    d = q.shape[1]
    if not 0 <= channel < d:
        raise ValueError(f"channel {channel} out of range for d={d}")
    scale = 1.0 / math.sqrt(d)
    return np.outer(q[:, channel], k[:, channel]) * scale


def scaled_logits(q: Matrix, k: Matrix) -> Matrix:
    """Q K^T / sqrt(d), accumulated over channels in ascending order."""
    q, k = _check_qk(q, k)
    n, d = q.shape
    scale = 1.0 / math.sqrt(d)
    logits = np.zeros((n, n), dtype=np.float64)
    for c in range(d):
        logits += np.outer(q[:, c], k[:, c]) * scale
    return logits


def dense_attention(q: Matrix, k: Matrix, v: Matrix) -> tuple[Matrix, Matrix]:
    """Full softmax(Q K^T / sqrt(d)) V. Returns (output, attention map)."""
    q, k = _check_qk(q, k)
    v = matrix(v)
    if v.shape != q.shape:
        raise ValueError(f"V shape {v.shape} does not match Q/K shape {q.shape}")
    attn = row_softmax(scaled_logits(q, k))
    return matmul(attn, v), attn


def channel_contribution_ranking(q: Matrix, k: Matrix) -> list[tuple[int, float]]:
    """Channels ordered by Frobenius norm of their partial-score matrix.

    Descending by contribution, ties broken toward the lower channel index.
    """
    q, k = _check_qk(q, k)
    d = q.shape[1]
    scores = []
    for c in range(d):
        a_c = partial_scores(q, k, c)
        scores.append((c, float(np.sqrt(np.sum(a_c * a_c)))))
    return sorted(scores, key=lambda item: (-item[1], item[0]))
