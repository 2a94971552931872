"""Command-line benchmark driver.

Subcommands: ``gen`` writes seeded grids in the flat binary format, ``run``
scores one method against the dense oracle and prints a JSON record,
``sweep`` emits a CSV over a threshold list, and ``schedule`` emits a
per-step CSV for a model preset or an explicit schedule.

Values come from an optional JSON config file; command-line flags win over
config keys. Exit codes: 0 success, 2 usage or validation error, 1
internal error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from .attention import dense_attention
from .detector import GRANULARITIES, AxisThresholds, detect
from .engine import (
    RunStats,
    calibrate_magnitude_save_ratio,
    masking_baseline_magnitude,
    masking_baseline_skip,
    reuse_attention,
)
from .grid import ChannelPartition, GridShape, rope_encode
from .gridfile import read_grid, write_grid
from .metrics import DEFAULT_ATTENTION_FRACTION, mse, psnr, theoretical_speedup
from .scheduler import NO_REUSE, PRESETS, ThresholdSchedule, simulate_trajectory
from .synth import REGIMES, gen_correlated, gen_paired_qk, gen_random

METHODS = ("dense", "reuse", "mask-mag", "mask-skip")


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path) as f:
        cfg = json.load(f)
    if not isinstance(cfg, dict):
        raise ValueError(f"config {path} must contain a JSON object")
    return cfg


def _pick(flag, cfg: dict, key: str, default=None):
    return flag if flag is not None else cfg.get(key, default)


def _shape_from(args, cfg: dict) -> GridShape:
    sh = cfg.get("shape", {})
    t = _pick(args.t, sh, "t")
    h = _pick(args.h, sh, "h")
    w = _pick(args.w, sh, "w")
    d = _pick(args.d, sh, "d")
    if None in (t, h, w, d):
        raise ValueError("grid shape requires t, h, w and d (flags or config)")
    return GridShape(int(t), int(h), int(w), int(d))


def _partition_from(args, cfg: dict) -> ChannelPartition | None:
    pc = cfg.get("partition", {})
    dt = _pick(getattr(args, "dt", None), pc, "d_t")
    dx = _pick(getattr(args, "dx", None), pc, "d_x")
    dy = _pick(getattr(args, "dy", None), pc, "d_y")
    if (dt, dx, dy) == (None, None, None):
        return None
    if None in (dt, dx, dy):
        raise ValueError("a partition requires all of d_t, d_x and d_y")
    return ChannelPartition(int(dt), int(dx), int(dy))


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)


def _write_lines(lines: list[str], out: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _dense_stats(n: int, d: int) -> RunStats:
    total = n * n * d
    return RunStats(total, 0, 2 * total, 2 * total, 0.0, 0.0, 0.0)


# ---------------------------------------------------------------------------
# gen


def cmd_gen(args) -> int:
    cfg = _load_config(args.config)
    shape = _shape_from(args, cfg)
    partition = _partition_from(args, cfg)
    kind = _pick(args.kind, cfg, "kind", "random")
    seed = int(_pick(args.seed, cfg, "seed", 0))
    out = _pick(args.out, cfg, "out")
    if out is None:
        raise ValueError("gen requires an output path")

    if kind == "random":
        grid = gen_random(shape, seed, partition)
        write_grid(out, grid, {"kind": kind, "seed": seed})
    elif kind == "correlated":
        rho_t = float(_pick(args.rho_t, cfg, "rho_t", 0.0))
        rho_x = float(_pick(args.rho_x, cfg, "rho_x", 0.0))
        rho_y = float(_pick(args.rho_y, cfg, "rho_y", 0.0))
        grid = gen_correlated(shape, rho_t, rho_x, rho_y, seed, partition)
        meta = {"kind": kind, "seed": seed, "rho_t": rho_t, "rho_x": rho_x, "rho_y": rho_y}
        write_grid(out, grid, meta)
    elif kind == "paired":
        regime = _pick(args.regime, cfg, "regime", "mixed")
        noise = float(_pick(args.noise, cfg, "noise", 0.0))
        out_k = _pick(args.out_k, cfg, "out_k")
        if out_k is None:
            raise ValueError("gen --kind paired requires an --out-k path for K")
        q, k = gen_paired_qk(shape, regime, seed, partition, noise)
        meta = {"kind": kind, "seed": seed, "regime": regime, "noise": noise}
        write_grid(out, q, dict(meta, role="q"))
        write_grid(out_k, k, dict(meta, role="k"))
    else:
        raise ValueError(f"unknown kind {kind!r}, expected random, correlated or paired")
    return 0


# ---------------------------------------------------------------------------
# run


def _method_outputs(method, q, k, v, theta, window, granularity, rope, workers):
    """Returns (output, stats) for one method, with Q/K optionally encoded."""
    qv = rope_encode(q).values if rope else q.values
    kv = rope_encode(k).values if rope else k.values
    vv = v.values
    if method == "dense":
        out, _ = dense_attention(qv, kv, vv)
        n, d = qv.shape
        return out, _dense_stats(n, d), (qv, kv, vv)
    if method == "mask-mag":
        if theta is None:
            raise ValueError("mask-mag interprets --theta as its save ratio; required")
        out, _, stats = masking_baseline_magnitude(qv, kv, vv, float(theta))
        return out, stats, (qv, kv, vv)
    if theta is None:
        raise ValueError(f"method {method} requires --theta")
    thresholds = AxisThresholds.uniform(float(theta))
    mask_q = detect(q.with_values(qv), thresholds, window, granularity)
    mask_k = detect(k.with_values(kv), thresholds, window, granularity)
    fn = reuse_attention if method == "reuse" else masking_baseline_skip
    out, _, stats = fn(qv, kv, vv, mask_q, mask_k, workers=workers)
    return out, stats, (qv, kv, vv)


def cmd_run(args) -> int:
    q = read_grid(args.q)
    k = read_grid(args.k)
    v = read_grid(args.v)
    if not (q.shape == k.shape == v.shape):
        raise ValueError(f"grid shapes differ: {q.shape}, {k.shape}, {v.shape}")

    start = time.perf_counter()
    out, stats, (qv, kv, vv) = _method_outputs(
        args.method, q, k, v, args.theta, args.window, args.granularity,
        not args.no_rope, args.workers,
    )
    wall_ms = (time.perf_counter() - start) * 1000.0

    dense_out, _ = dense_attention(qv, kv, vv)
    err = mse(out, dense_out)
    peak = float(np.abs(dense_out).max())
    record = {
        "method": args.method,
        "theta": args.theta,
        "window": args.window,
        "reuse_ratio_q": stats.reuse_ratio_q,
        "reuse_ratio_k": stats.reuse_ratio_k,
        "entry_reuse_ratio": stats.entry_reuse_ratio,
        "mse_vs_dense": err,
        "psnr_vs_dense": psnr(out, dense_out, peak if peak > 0 else 1.0),
        "qk_flops_dense": stats.qk_flops_dense,
        "qk_flops_actual": stats.qk_flops_actual,
        "theoretical_speedup": theoretical_speedup(stats, args.attention_fraction),
        "attention_fraction": args.attention_fraction,
        "wall_ms": wall_ms,
    }
    print(json.dumps(record))
    return 0


# ---------------------------------------------------------------------------
# sweep


def _thetas_from(cfg: dict, flag_thetas) -> list[float]:
    if flag_thetas:
        return sorted(float(t) for t in flag_thetas)
    given = cfg.get("thetas")
    if isinstance(given, list) and given:
        return sorted(float(t) for t in given)
    if isinstance(given, dict):
        start, stop, count = given["start"], given["stop"], int(given["count"])
        if count < 1:
            raise ValueError("theta range count must be >= 1")
        return list(np.linspace(start, stop, count))
    raise ValueError("sweep requires a theta list (--theta flags or config 'thetas')")


def cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    shape = _shape_from(args, cfg)
    partition = _partition_from(args, cfg)
    seed = int(_pick(args.seed, cfg, "seed", 0))
    rho_t = float(_pick(args.rho_t, cfg, "rho_t", 0.0))
    rho_x = float(_pick(args.rho_x, cfg, "rho_x", 0.0))
    rho_y = float(_pick(args.rho_y, cfg, "rho_y", 0.0))
    window = int(_pick(args.window, cfg, "window", 2))
    granularity = _pick(args.granularity, cfg, "granularity", "channel")
    rope = not args.no_rope if args.no_rope is not None else bool(cfg.get("rope", True))
    workers = int(_pick(args.workers, cfg, "workers", 1))
    methods = sorted(set(_pick(args.methods, cfg, "methods", ["mask-mag", "mask-skip", "reuse"])))
    for m in methods:
        if m not in ("reuse", "mask-skip", "mask-mag"):
            raise ValueError(f"sweep method {m!r} not in (reuse, mask-skip, mask-mag)")
    thetas = _thetas_from(cfg, args.theta)
    out_path = _pick(args.out, cfg, "out")

    tokens = gen_correlated(shape, rho_t, rho_x, rho_y, seed, partition)
    encoded = rope_encode(tokens) if rope else tokens
    qk = encoded.values
    v = tokens.values
    dense_out, _ = dense_attention(qk, qk, v)
    peak = float(np.abs(dense_out).max())
    peak = peak if peak > 0 else 1.0

    lines = ["theta,method,entry_reuse_ratio,mse,psnr,qk_flops_actual"]
    for theta in thetas:
        mask = detect(encoded, AxisThresholds.uniform(theta), window, granularity)
        reuse_out, _, reuse_stats = reuse_attention(qk, qk, v, mask, mask, workers=workers)
        per_method = {"reuse": (reuse_out, reuse_stats)}
        if "mask-skip" in methods:
            skip_out, _, skip_stats = masking_baseline_skip(qk, qk, v, mask, mask, workers=workers)
            per_method["mask-skip"] = (skip_out, skip_stats)
        if "mask-mag" in methods:
            # rows compare methods at equal savings: match the reuse run's entry ratio
            save = calibrate_magnitude_save_ratio(qk, qk, reuse_stats.entry_reuse_ratio)
            mag_out, _, mag_stats = masking_baseline_magnitude(qk, qk, v, save)
            per_method["mask-mag"] = (mag_out, mag_stats)
        for method in methods:
            out, stats = per_method[method]
            lines.append(
                ",".join(
                    [
                        _fmt(float(theta)),
                        method,
                        _fmt(stats.entry_reuse_ratio),
                        _fmt(mse(out, dense_out)),
                        _fmt(psnr(out, dense_out, peak)),
                        str(stats.qk_flops_actual),
                    ]
                )
            )
    _write_lines(lines, out_path)
    return 0


# ---------------------------------------------------------------------------
# schedule


def cmd_schedule(args) -> int:
    cfg = _load_config(args.config)
    preset = _pick(args.preset, cfg, "preset")
    if preset is not None:
        if preset not in PRESETS:
            raise ValueError(
                f"unknown preset {preset!r}; valid presets: {', '.join(sorted(PRESETS))}"
            )
        schedule = PRESETS[preset]
    else:
        fields = {}
        for name, flag in (
            ("theta_start", args.theta_start),
            ("theta_end", args.theta_end),
            ("i_min", args.i_min),
            ("i_max", args.i_max),
            ("total_steps", args.total_steps),
        ):
            val = _pick(flag, cfg, name)
            if val is None:
                raise ValueError("schedule requires a preset or explicit "
                                 "theta_start/theta_end/i_min/i_max/total_steps")
            fields[name] = val
        schedule = ThresholdSchedule(
            float(fields["theta_start"]), float(fields["theta_end"]),
            int(fields["i_min"]), int(fields["i_max"]), int(fields["total_steps"]),
        )

    shape = _shape_from(args, cfg)
    partition = _partition_from(args, cfg)
    seed = int(_pick(args.seed, cfg, "seed", 0))
    rho_t = float(_pick(args.rho_t, cfg, "rho_t", 0.0))
    rho_x = float(_pick(args.rho_x, cfg, "rho_x", 0.0))
    rho_y = float(_pick(args.rho_y, cfg, "rho_y", 0.0))
    window = int(_pick(args.window, cfg, "window", 2))
    granularity = _pick(args.granularity, cfg, "granularity", "channel")
    workers = int(_pick(args.workers, cfg, "workers", 1))
    out_path = _pick(args.out, cfg, "out")

    grids = [
        gen_correlated(shape, rho_t, rho_x, rho_y, seed + i, partition)
        for i in range(schedule.total_steps)
    ]
    results = simulate_trajectory(grids, schedule, window, granularity, workers=workers)

    lines = ["step,theta,entry_reuse_ratio,mse,psnr"]
    for r in results:
        theta_field = "" if r.theta == NO_REUSE else _fmt(r.theta)
        lines.append(
            ",".join(
                [
                    str(r.step),
                    theta_field,
                    _fmt(r.stats.entry_reuse_ratio),
                    _fmt(r.mse),
                    _fmt(r.psnr),
                ]
            )
        )
    _write_lines(lines, out_path)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="streuse", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_shape(p):
        p.add_argument("--t", type=int)
        p.add_argument("--h", type=int)
        p.add_argument("--w", type=int)
        p.add_argument("--d", type=int)
        p.add_argument("--dt", type=int, help="temporal channel group size")
        p.add_argument("--dx", type=int, help="x channel group size")
        p.add_argument("--dy", type=int, help="y channel group size")

    def add_rho(p):
        p.add_argument("--rho-t", dest="rho_t", type=float)
        p.add_argument("--rho-x", dest="rho_x", type=float)
        p.add_argument("--rho-y", dest="rho_y", type=float)

    g = sub.add_parser("gen", help="generate grid files")
    g.add_argument("--config")
    g.add_argument("--kind", choices=["random", "correlated", "paired"])
    add_shape(g)
    add_rho(g)
    g.add_argument("--seed", type=int)
    g.add_argument("--regime", choices=list(REGIMES))
    g.add_argument("--noise", type=float)
    g.add_argument("--out")
    g.add_argument("--out-k", dest="out_k", help="K output path for --kind paired")
    g.set_defaults(fn=cmd_gen)

    r = sub.add_parser("run", help="run one method against the dense oracle")
    r.add_argument("q")
    r.add_argument("k")
    r.add_argument("v")
    r.add_argument("--method", choices=list(METHODS), required=True)
    r.add_argument("--theta", type=float, help="threshold; save ratio for mask-mag")
    r.add_argument("--window", type=int, default=2)
    r.add_argument("--granularity", choices=list(GRANULARITIES), default="channel")
    r.add_argument("--no-rope", action="store_true", help="skip rotary encoding of Q/K")
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--attention-fraction", dest="attention_fraction", type=float,
                   default=DEFAULT_ATTENTION_FRACTION)
    r.set_defaults(fn=cmd_run)

    s = sub.add_parser("sweep", help="CSV over a threshold list")
    s.add_argument("--config")
    add_shape(s)
    add_rho(s)
    s.add_argument("--seed", type=int)
    s.add_argument("--theta", type=float, action="append", help="repeatable theta value")
    s.add_argument("--methods", nargs="+")
    s.add_argument("--window", type=int)
    s.add_argument("--granularity", choices=list(GRANULARITIES))
    s.add_argument("--no-rope", action="store_true", default=None)
    s.add_argument("--workers", type=int)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_sweep)

    c = sub.add_parser("schedule", help="per-step CSV for a schedule or preset")
    c.add_argument("--config")
    c.add_argument("--preset")
    c.add_argument("--theta-start", dest="theta_start", type=float)
    c.add_argument("--theta-end", dest="theta_end", type=float)
    c.add_argument("--i-min", dest="i_min", type=int)
    c.add_argument("--i-max", dest="i_max", type=int)
    c.add_argument("--total-steps", dest="total_steps", type=int)
    add_shape(c)
    add_rho(c)
    c.add_argument("--seed", type=int)
    c.add_argument("--window", type=int)
    c.add_argument("--granularity", choices=list(GRANULARITIES))
    c.add_argument("--workers", type=int)
    c.add_argument("--out")
    c.set_defaults(fn=cmd_schedule)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
