"""Per-denoising-step threshold schedules and trajectory simulation.

The threshold ramps linearly from theta_start at step i_min to theta_end at
step i_max, stays at theta_end afterwards, and is disabled (no reuse) for
the warm-up steps before i_min and for the final step. The channel-wise
variant normalises one shared threshold by the mean absolute channel
variation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .attention import dense_attention
from .detector import AxisThresholds, detect
from .engine import RunStats, reuse_attention
from .grid import DEFAULT_ROPE_BASE, TokenGrid, rope_encode
from .metrics import mse as _mse
from .metrics import psnr as _psnr

NO_REUSE = float("-inf")


@dataclass(frozen=True)
class ThresholdSchedule:
    theta_start: float
    theta_end: float
    i_min: int
    i_max: int
    total_steps: int

    def __post_init__(self):
        if not 0 <= self.i_min <= self.i_max < self.total_steps:
            raise ValueError(
                f"need 0 <= i_min <= i_max < total_steps, got "
                f"({self.i_min}, {self.i_max}, {self.total_steps})"
            )


# Per-model schedule presets, 50 denoising steps each.
PRESETS = {
    "hunyuan": ThresholdSchedule(0.2, 0.5, 10, 20, 50),
    "wan21": ThresholdSchedule(0.4, 0.6, 10, 48, 50),
    "cogvideox": ThresholdSchedule(0.2, 0.5, 10, 28, 50),
    "opensoraplan": ThresholdSchedule(0.4, 0.8, 20, 48, 50),
}


def threshold_at(schedule: ThresholdSchedule, i: int) -> float:
    """Threshold for denoising step i; NO_REUSE where the step is untouched.

    The first i_min steps and the last step are untouched. The ramp hits
    theta_start and theta_end exactly at i_min and i_max.
    """
    if not 0 <= i < schedule.total_steps:
        raise ValueError(f"step {i} out of range for {schedule.total_steps} steps")
    if i < schedule.i_min or i == schedule.total_steps - 1:
        return NO_REUSE
    if i == schedule.i_min:
        return schedule.theta_start
    if i == schedule.i_max:
        return schedule.theta_end
    if i < schedule.i_max:
        span = schedule.i_max - schedule.i_min
        return schedule.theta_start + (i - schedule.i_min) * (
            schedule.theta_end - schedule.theta_start
        ) / span
    return schedule.theta_end


def channelwise_threshold(alpha: float, channel_deltas: Sequence[float]) -> list[float]:
    """Per-channel thresholds alpha * mean(|delta_i|), shared across channels.

    One tau, normalised by the mean absolute variation along the channel
    dimension, replicated per channel.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be non-negative, got {alpha}")
    deltas = np.asarray(list(channel_deltas), dtype=np.float64)
    if deltas.size == 0:
        raise ValueError("channel delta list must not be empty")
    if not np.all(np.isfinite(deltas)):
        raise ValueError("channel deltas must be finite")
    tau = float(alpha * np.mean(np.abs(deltas)))
    return [tau] * deltas.size


@dataclass(frozen=True)
class StepResult:
    step: int
    theta: float
    stats: RunStats
    mse: float
    psnr: float


def simulate_trajectory(
    grids: Sequence[TokenGrid],
    schedule: ThresholdSchedule,
    k: int = 2,
    granularity: str = "channel",
    rope_base: float = DEFAULT_ROPE_BASE,
    workers: int = 1,
) -> list[StepResult]:
    """Run detect + reuse at each step's threshold and score against dense.

    Each step uses its grid's rotary-encoded values as both Q and K and the
    raw values as V. Untouched steps report zero reuse and zero error.
    """
    if len(grids) != schedule.total_steps:
        raise ValueError(
            f"got {len(grids)} grids for a {schedule.total_steps}-step schedule"
        )
    results = []
    for i, tokens in enumerate(grids):
        theta = threshold_at(schedule, i)
        encoded = rope_encode(tokens, rope_base)
        qk = encoded.values
        v = tokens.values
        mask = detect(encoded, AxisThresholds.uniform(theta), k, granularity)
        dense_out, _ = dense_attention(qk, qk, v)
        out, _, stats = reuse_attention(qk, qk, v, mask, mask, workers=workers)
        err = _mse(out, dense_out)
        peak = float(np.abs(dense_out).max())
        results.append(
            StepResult(
                step=i,
                theta=theta,
                stats=stats,
                mse=err,
                psnr=_psnr(out, dense_out, peak if peak > 0 else 1.0),
            )
        )
    return results
