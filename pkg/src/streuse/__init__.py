"""Channel-level spatio-temporal reuse of self-attention partial scores.

Detects spatially or temporally similar token channels on a (T, H, W) grid,
copies previously computed partial attention scores instead of recomputing
them, and accounts exactly for the compute saved and the error introduced
relative to a dense oracle and two masking baselines.
"""

from .attention import (
    channel_contribution_ranking,
    dense_attention,
    partial_scores,
    scaled_logits,
)
from .detector import (
    AxisThresholds,
    ReuseMask,
    combine_or,
    delta,
    detect,
    detect_axis,
)
from .engine import (
    RunStats,
    calibrate_magnitude_save_ratio,
    magnitude_entry_ratio,
    masking_baseline_magnitude,
    masking_baseline_skip,
    reuse_attention,
    substitute,
)
from .grid import (
    ChannelPartition,
    GridShape,
    TokenGrid,
    coords_of,
    default_partition,
    index_of,
    rope_encode,
)
from .gridfile import read_grid, write_grid
from .metrics import mse, psnr, theoretical_speedup
from .numerics import Matrix, matmul, matrix, row_softmax
from .scheduler import (
    NO_REUSE,
    PRESETS,
    StepResult,
    ThresholdSchedule,
    channelwise_threshold,
    simulate_trajectory,
    threshold_at,
)
from .synth import gen_correlated, gen_paired_qk, gen_random

__all__ = [
    "AxisThresholds",
    "ChannelPartition",
    "GridShape",
    "Matrix",
    "NO_REUSE",
    "PRESETS",
    "ReuseMask",
    "RunStats",
    "StepResult",
    "ThresholdSchedule",
    "TokenGrid",
    "calibrate_magnitude_save_ratio",
    "channel_contribution_ranking",
    "channelwise_threshold",
    "combine_or",
    "coords_of",
    "default_partition",
    "delta",
    "dense_attention",
    "detect",
    "detect_axis",
    "gen_correlated",
    "gen_paired_qk",
    "gen_random",
    "index_of",
    "magnitude_entry_ratio",
    "masking_baseline_magnitude",
    "masking_baseline_skip",
    "matmul",
    "matrix",
    "mse",
    "partial_scores",
    "psnr",
    "read_grid",
    "reuse_attention",
    "rope_encode",
    "row_softmax",
    "scaled_logits",
    "simulate_trajectory",
    "substitute",
    "theoretical_speedup",
    "threshold_at",
    "write_grid",
]
