"""Penalty sweep on a tuning split and knee-point selection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .conformal import calibrate, predict_socop_batch
from .hull import ScoreConfig
from .metrics import evaluate
from .scoring import ProbMatrix, score_batch_socop

# 20-point default grid: dense at small penalties where the trade-off moves
# fastest, coarser up to 1.
DEFAULT_LAMBDA_GRID = tuple(
    [0.0] + [i / 100 for i in range(1, 11)] + [i / 10 for i in range(2, 11)]
)


class CurvePoint(NamedTuple):
    lam: float
    avg_size: float
    p_size_gt: float
    coverage: float


@dataclass(frozen=True)
class TradeoffCurve:
    """Size / non-singleton trade-off measured at increasing penalties."""

    points: list[CurvePoint]

    def __len__(self) -> int:
        return len(self.points)


def sweep_lambda(
    tune_data: ProbMatrix,
    alpha: float,
    grid=DEFAULT_LAMBDA_GRID,
    k0: int = 1,
    seed: int = 0,
) -> TradeoffCurve:
    """Trace the trade-off curve over a penalty grid.

    The tuning data is split once, half for calibration and half for
    evaluation (seeded, so the curve is reproducible); every grid point runs
    a full calibrate / predict / evaluate pass on that split.
    """
    grid = [float(l) for l in grid]
    if len(grid) == 0:
        raise ValueError("empty penalty grid")
    if any(l < 0 for l in grid):
        raise ValueError("penalty grid entries must be >= 0")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("penalty grid must be strictly increasing")
    if tune_data.N < 2:
        raise ValueError("need at least 2 tuning instances")
    rng = np.random.default_rng([seed, 0x50C0])
    perm = rng.permutation(tune_data.N)
    half = tune_data.N // 2
    cal = tune_data.take(perm[:half])
    ev = tune_data.take(perm[half:])
    points = []
    for lam in grid:
        cfg = ScoreConfig(lam=lam, k0=k0)
        q = calibrate(score_batch_socop(cal, cfg), alpha)
        report = evaluate(predict_socop_batch(ev.probs, q, cfg), ev.labels, k0=k0)
        points.append(
            CurvePoint(
                lam=lam,
                avg_size=report.avg_size,
                p_size_gt=report.p_size_gt,
                coverage=report.coverage,
            )
        )
    return TradeoffCurve(points=points)


def knee_point(curve: TradeoffCurve) -> float:
    """Penalty at the knee of the (avg size, non-singleton rate) curve.

    Both axes are min-max normalized, then the point farthest from the
    chord joining the curve endpoints wins; ties go to the larger penalty.
    Normalization makes the choice invariant to rescaling either axis.
    """
    if len(curve) < 3:
        raise ValueError("need at least 3 curve points")
    lams = np.array([p.lam for p in curve.points])
    x = np.array([p.avg_size for p in curve.points])
    y = np.array([p.p_size_gt for p in curve.points])

    def norm(v):
        span = v.max() - v.min()
        return np.zeros_like(v) if span == 0 else (v - v.min()) / span

    x, y = norm(x), norm(y)
    dx, dy = x[-1] - x[0], y[-1] - y[0]
    chord = np.hypot(dx, dy)
    if chord == 0:
        dist = np.hypot(x - x[0], y - y[0])
    else:
        dist = np.abs(dx * (y[0] - y) - (x[0] - x) * dy) / chord
    best = 0
    for i in range(1, len(dist)):
        if dist[i] >= dist[best]:
            best = i
    return float(lams[best])
