"""Brute-force reference implementations, for testing the hull path only.

Everything here evaluates the size-cost objective exhaustively instead of
walking the convex hull, and is deliberately quadratic. Slow but flat:
these functions share no code with the hull module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hull import ScoreConfig, SortedDist


@dataclass(frozen=True)
class OracleResult:
    """Exhaustive evaluation of one instance: kappa on a grid plus all scores."""

    kappa_grid: dict[float, int]
    scores: list[float]


def _objective_terms(dist: SortedDist, cfg: ScoreConfig):
    K = dist.K
    gamma = np.concatenate(([0.0], np.cumsum(dist.values)))
    k = np.arange(K + 1)
    g = (k > cfg.k0).astype(np.float64) + cfg.lam * k
    return gamma, g


def oracle_kappa(dist: SortedDist, cfg: ScoreConfig, eta: float) -> int:
    """argmin over k of g_k - eta * Gamma_k, smallest k on ties."""
    if eta < 0:
        raise ValueError("eta must be >= 0")
    gamma, g = _objective_terms(dist, cfg)
    return int(np.argmin(g - eta * gamma))


def kappa_scan(dist: SortedDist, cfg: ScoreConfig, etas) -> np.ndarray:
    """Exhaustive argmin over a whole eta grid at once.

    Uses extended precision for the objective so that grid points lying
    extremely close to a jump are still resolved by value rather than by
    rounding luck.
    """
    etas = np.asarray(etas, dtype=np.float64)
    if np.any(etas < 0):
        raise ValueError("etas must be >= 0")
    gamma, g = _objective_terms(dist, cfg)
    psi = g.astype(np.longdouble)[None, :] - np.asarray(
        etas, dtype=np.longdouble
    )[:, None] * gamma.astype(np.longdouble)[None, :]
    return np.argmin(psi, axis=1)


def oracle_score(dist: SortedDist, cfg: ScoreConfig, rank: int) -> float:
    """Exact nonconformity score by exhaustive max-min over candidate sizes.

    A size k first becomes optimal at the largest pairwise slope from any
    smaller size, so the score of rank i is the least such entry threshold
    over sizes k >= i. O(K^2).
    """
    K = dist.K
    if not 1 <= rank <= K:
        raise ValueError(f"rank must be in 1..{K}, got {rank}")
    gamma, g = _objective_terms(dist, cfg)
    best = np.inf
    for k in range(rank, K + 1):
        worst = max((g[k] - g[j]) / (gamma[k] - gamma[j]) for j in range(k))
        best = min(best, worst)
    return float(best)


def oracle_profile(dist: SortedDist, cfg: ScoreConfig, etas) -> OracleResult:
    """All scores plus kappa over a grid, both exhaustively computed."""
    kappas = kappa_scan(dist, cfg, etas)
    grid = {float(e): int(k) for e, k in zip(etas, kappas)}
    scores = [oracle_score(dist, cfg, i) for i in range(1, dist.K + 1)]
    return OracleResult(kappa_grid=grid, scores=scores)
