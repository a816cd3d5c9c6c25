"""Per-instance geometry behind the singleton-optimized nonconformity score.

For a probability vector sorted in decreasing order, each candidate set size
k in {0..K} is mapped to a planar point (prefix mass, size cost). The lower
convex hull of these K+1 points determines everything we need: the optimal
set size as a function of the dual penalty eta is a step function whose jump
locations are the hull edge slopes, and the nonconformity score of the label
ranked i is the smallest edge slope whose vertex reaches size i. This gives
an O(K) algorithm past sorting.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field

import numpy as np

# Probabilities below this floor are lifted before renormalizing so that
# prefix masses stay strictly increasing and all slopes stay finite.
PROB_FLOOR = 1e-12

# Input vectors are renormalized when their sum is off by at most this much;
# anything further from 1 is treated as malformed data.
SUM_SLACK = 1e-3
SUM_SLACK_STRICT = 1e-6


@dataclass(frozen=True)
class ScoreConfig:
    """Objective family: size penalty `lam` and tolerated set size `k0`.

    The cost of a size-k set is I(k > k0) + lam * k. The default k0=1
    penalizes any non-singleton set.
    """

    lam: float
    k0: int = 1

    def __post_init__(self):
        if not np.isfinite(self.lam) or self.lam < 0:
            raise ValueError(f"lam must be finite and >= 0, got {self.lam}")
        if int(self.k0) != self.k0 or self.k0 < 1:
            raise ValueError(f"k0 must be an integer >= 1, got {self.k0}")


@dataclass(frozen=True)
class SortedDist:
    """A probability vector sorted in decreasing order.

    `values[i]` is the (i+1)-th largest probability and `perm[i]` is its
    original label index. Ties keep the smaller original index first, so
    ranks are deterministic.
    """

    values: np.ndarray
    perm: np.ndarray

    @property
    def K(self) -> int:
        return len(self.values)

    def rank_of(self, label: int) -> int:
        """1-based rank of an original label index in the sorted order."""
        pos = np.nonzero(self.perm == label)[0]
        if len(pos) == 0:
            raise ValueError(f"label {label} out of range 0..{self.K - 1}")
        return int(pos[0]) + 1


@dataclass(frozen=True)
class HullProfile:
    """Lower convex hull of the (prefix mass, size cost) points of one instance.

    gamma_prefix[k] is the mass of the top-k labels (gamma_prefix[0] = 0,
    gamma_prefix[K] = 1), g[k] the cost of a size-k set, `vertices` the
    strictly increasing hull vertex sizes (first 0, last K), and `slopes`
    the strictly increasing positive-or-zero edge slopes, one per edge.
    """

    gamma_prefix: np.ndarray
    g: np.ndarray
    vertices: list[int]
    slopes: list[float]

    @property
    def K(self) -> int:
        return len(self.gamma_prefix) - 1


@dataclass(frozen=True)
class KappaStep:
    """Optimal set size as a left-continuous step function of the dual penalty.

    Evaluates to 0 on [0, slopes[0]], to vertices[i] on
    (slopes[i-1], slopes[i]], and to K beyond the last slope. At a jump the
    smaller size wins, matching the minimal-size tie-break.
    """

    vertices: np.ndarray = field(repr=False)
    slopes: np.ndarray = field(repr=False)

    @classmethod
    def from_hull(cls, hull: HullProfile) -> "KappaStep":
        return cls(np.asarray(hull.vertices), np.asarray(hull.slopes))

    def at(self, eta):
        """Evaluate at a scalar or array of penalties (all >= 0)."""
        eta = np.asarray(eta)
        if np.any(eta < 0):
            raise ValueError("eta must be >= 0")
        idx = np.searchsorted(self.slopes, eta, side="left")
        out = self.vertices[idx]
        return int(out) if out.ndim == 0 else out


def _normalize(probs: np.ndarray, renormalize: bool = True) -> np.ndarray:
    """Validate a raw probability vector and return a clean copy summing to 1."""
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 1 or len(probs) < 2:
        raise ValueError("need a 1-D vector with at least 2 classes")
    if not np.all(np.isfinite(probs)):
        raise ValueError("probabilities must be finite")
    if np.any(probs < 0):
        raise ValueError("probabilities must be nonnegative")
    total = float(probs.sum())
    slack = SUM_SLACK if renormalize else SUM_SLACK_STRICT
    if abs(total - 1.0) > slack:
        raise ValueError(f"probabilities sum to {total:.6g}, expected 1 within {slack:g}")
    clean = np.maximum(probs, PROB_FLOOR)
    return clean / clean.sum()


def sort_dist(probs, renormalize: bool = True) -> SortedDist:
    """Clean a raw probability vector and sort it in decreasing order.

    Entries are floored at PROB_FLOOR and renormalized; the sort is stable
    so equal probabilities keep their original index order.
    """
    values = _normalize(probs, renormalize=renormalize)
    perm = np.argsort(-values, kind="stable")
    return SortedDist(values=values[perm], perm=perm)


def _size_costs(K: int, cfg: ScoreConfig) -> np.ndarray:
    k = np.arange(K + 1)
    return (k > cfg.k0).astype(np.float64) + cfg.lam * k


def _prefix_masses(sorted_values: np.ndarray) -> np.ndarray:
    gamma = np.concatenate(([0.0], np.cumsum(sorted_values)))
    # The exact total is known to be 1; pinning it removes accumulated
    # rounding so the limiting closed forms hold bit-for-bit.
    gamma[-1] = 1.0
    return gamma


def _lower_hull(gamma: list[float], g: list[float]) -> tuple[list[int], list[float]]:
    """Monotone chain over points (gamma[k], g[k]), already sorted by x.

    Pops on cross product <= 0, so collinear interior points are dropped
    and every kept turn is strictly convex.
    """
    verts: list[int] = []
    for k in range(len(gamma)):
        while len(verts) >= 2:
            j, i = verts[-2], verts[-1]
            cross = (gamma[i] - gamma[j]) * (g[k] - g[i]) - (
                g[i] - g[j]
            ) * (gamma[k] - gamma[i])
            if cross <= 0.0:
                verts.pop()
            else:
                break
        verts.append(k)
    slopes = [
        (g[verts[t]] - g[verts[t - 1]]) / (gamma[verts[t]] - gamma[verts[t - 1]])
        for t in range(1, len(verts))
    ]
    return verts, slopes


def build_hull(dist: SortedDist, cfg: ScoreConfig) -> HullProfile:
    """Compute the lower convex hull profile of one sorted distribution."""
    K = dist.K
    if cfg.k0 >= K:
        raise ValueError(f"k0={cfg.k0} must be < K={K}")
    gamma = _prefix_masses(dist.values)
    g = _size_costs(K, cfg)
    verts, slopes = _lower_hull(gamma.tolist(), g.tolist())
    return HullProfile(gamma_prefix=gamma, g=g, vertices=verts, slopes=slopes)


def kappa_at(hull: HullProfile, eta: float) -> int:
    """Optimal set size at dual penalty eta (left-continuous in eta)."""
    if eta < 0:
        raise ValueError("eta must be >= 0")
    return hull.vertices[bisect_left(hull.slopes, eta)]


def score_for_rank(hull: HullProfile, rank: int) -> float:
    """Nonconformity score of the label ranked `rank` (1-based).

    The smallest edge slope whose vertex size covers the rank; finite for
    every rank because prefix masses are strictly increasing.
    """
    if not 1 <= rank <= hull.K:
        raise ValueError(f"rank must be in 1..{hull.K}, got {rank}")
    idx = bisect_left(hull.vertices, rank)
    score = hull.slopes[idx - 1]
    if not np.isfinite(score):
        raise AssertionError("non-finite score; input should have been clamped")
    return score


def socop_score(probs, label: int, cfg: ScoreConfig) -> float:
    """Singleton-optimized nonconformity score of one (probs, label) pair."""
    dist = sort_dist(probs)
    return score_for_rank(build_hull(dist, cfg), dist.rank_of(label))
