"""Split-conformal calibration and prediction-set construction."""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Iterator

import numpy as np

from .hull import ScoreConfig, _lower_hull, _size_costs, build_hull, sort_dist
from .scoring import ScoreVector, _sorted_batch


@dataclass(frozen=True)
class CalibrationResult:
    """Conformal threshold: the ceil((1-alpha)(n+1))-th smallest score.

    When that rank exceeds n the threshold saturates to +inf and downstream
    prediction returns full label sets.
    """

    q_hat: float
    alpha: float
    n: int


@dataclass(frozen=True)
class PredictionSet:
    """A set of original label indices; may be empty."""

    members: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.members)

    def __contains__(self, label: int) -> bool:
        return int(label) in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)


def conformal_rank(alpha: float, n: int) -> int:
    """ceil((1-alpha)(n+1)) in exact decimal arithmetic.

    Evaluating the product in floats can push an exact integer over the next
    ceiling; the stated rank is restored by treating alpha as the decimal
    it was written as.
    """
    a = Fraction(Decimal(str(alpha)))
    return math.ceil((1 - a) * (n + 1))


def calibrate(scores: ScoreVector, alpha: float) -> CalibrationResult:
    """Split-conformal threshold from calibration scores."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must be in (0, 1)")
    n = len(scores)
    if n < 1:
        raise ValueError("need at least one calibration score")
    rank = conformal_rank(alpha, n)
    if rank > n:
        q_hat = math.inf
    else:
        q_hat = float(np.sort(scores.values)[rank - 1])
    return CalibrationResult(q_hat=q_hat, alpha=alpha, n=n)


def predict_socop(row, q: CalibrationResult, cfg: ScoreConfig) -> PredictionSet:
    """Hull-walk prediction: largest vertex whose incoming slope is <= q_hat.

    Walking the hull edges gives the same set as thresholding all K label
    scores, in O(K) after sorting. The set is empty when even the first
    slope exceeds the threshold.
    """
    dist = sort_dist(row)
    hull = build_hull(dist, cfg)
    k_final = hull.vertices[bisect_right(hull.slopes, q.q_hat)]
    return PredictionSet(members=frozenset(int(y) for y in dist.perm[:k_final]))


def predict_generic(per_label_scores, q: CalibrationResult) -> PredictionSet:
    """Standard split-conformal set: every label whose score is <= q_hat."""
    scores = np.asarray(per_label_scores, dtype=np.float64)
    members = np.nonzero(scores <= q.q_hat)[0]
    return PredictionSet(members=frozenset(int(y) for y in members))


def predict_socop_batch(probs: np.ndarray, q: CalibrationResult, cfg: ScoreConfig) -> list[PredictionSet]:
    """Hull-walk prediction for every row of a cleaned probability matrix."""
    K = probs.shape[1]
    if cfg.k0 >= K:
        raise ValueError(f"k0={cfg.k0} must be < K={K}")
    order, _, prefix = _sorted_batch(probs)
    g = _size_costs(K, cfg).tolist()
    out = []
    for i in range(probs.shape[0]):
        verts, slopes = _lower_hull(prefix[i].tolist(), g)
        k_final = verts[bisect_right(slopes, q.q_hat)]
        out.append(PredictionSet(members=frozenset(int(y) for y in order[i, :k_final])))
    return out


def predict_generic_batch(label_scores: np.ndarray, q: CalibrationResult) -> list[PredictionSet]:
    """Per-label thresholding for every row of an N x K score matrix."""
    hits = np.asarray(label_scores, dtype=np.float64) <= q.q_hat
    return [
        PredictionSet(members=frozenset(int(y) for y in np.nonzero(row)[0]))
        for row in hits
    ]
