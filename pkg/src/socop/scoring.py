"""Batch scoring over datasets, baseline scores, and the plug-in set builder."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hull import ScoreConfig, _lower_hull, _normalize, _size_costs

METHODS = ("socop", "las", "singleton", "plugin", "external")


@dataclass(frozen=True)
class ProbMatrix:
    """N instances of K class probabilities, cleaned row by row, plus labels.

    Rows are validated, floored and renormalized with the same routine used
    for single instances, so batch and per-instance scoring agree bit for bit.
    """

    probs: np.ndarray
    labels: np.ndarray | None = None

    @property
    def N(self) -> int:
        return self.probs.shape[0]

    @property
    def K(self) -> int:
        return self.probs.shape[1]

    @classmethod
    def from_raw(cls, rows, labels=None) -> "ProbMatrix":
        rows = np.asarray(rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 2:
            raise ValueError("need a 2-D array with >= 1 row and >= 2 classes")
        clean = np.empty_like(rows)
        for i in range(rows.shape[0]):
            try:
                clean[i] = _normalize(rows[i])
            except ValueError as err:
                raise ValueError(f"row {i}: {err}") from None
        if labels is not None:
            labels = np.asarray(labels, dtype=np.int64)
            if labels.shape != (rows.shape[0],):
                raise ValueError("labels must have one entry per row")
            bad = np.nonzero((labels < 0) | (labels >= rows.shape[1]))[0]
            if len(bad) > 0:
                raise ValueError(
                    f"row {bad[0]}: label {labels[bad[0]]} out of range 0..{rows.shape[1] - 1}"
                )
        return cls(probs=clean, labels=labels)

    def take(self, indices) -> "ProbMatrix":
        """Row subset, keeping the already-cleaned probabilities as-is."""
        indices = np.asarray(indices)
        labels = None if self.labels is None else self.labels[indices]
        return ProbMatrix(probs=self.probs[indices], labels=labels)


@dataclass(frozen=True)
class ScoreVector:
    """Per-instance nonconformity scores with the method that produced them."""

    values: np.ndarray
    method: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")

    def __len__(self) -> int:
        return len(self.values)


def _require_labels(data: ProbMatrix) -> np.ndarray:
    if data.labels is None:
        raise ValueError("dataset has no labels")
    return data.labels


def _sorted_batch(probs: np.ndarray):
    """Stable descending sort of every row plus prefix masses.

    Returns (order, sorted_values, prefix) where prefix[:, k] is the mass of
    the top-k labels with prefix[:, 0] = 0 and prefix[:, K] pinned to 1.
    """
    order = np.argsort(-probs, axis=1, kind="stable")
    svals = np.take_along_axis(probs, order, axis=1)
    prefix = np.concatenate([np.zeros((probs.shape[0], 1)), np.cumsum(svals, axis=1)], axis=1)
    prefix[:, -1] = 1.0
    return order, svals, prefix


def _label_ranks(order: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """1-based rank of each row's label in that row's sorted order."""
    return np.argmax(order == labels[:, None], axis=1) + 1


def score_batch_socop(data: ProbMatrix, cfg: ScoreConfig) -> ScoreVector:
    """Singleton-optimized score of the true label, one hull per row."""
    labels = _require_labels(data)
    if cfg.k0 >= data.K:
        raise ValueError(f"k0={cfg.k0} must be < K={data.K}")
    order, _, prefix = _sorted_batch(data.probs)
    ranks = _label_ranks(order, labels)
    g = _size_costs(data.K, cfg).tolist()
    out = np.empty(data.N)
    from bisect import bisect_left

    for i in range(data.N):
        verts, slopes = _lower_hull(prefix[i].tolist(), g)
        out[i] = slopes[bisect_left(verts, ranks[i]) - 1]
    return ScoreVector(values=out, method="socop")


def score_batch_las(data: ProbMatrix) -> ScoreVector:
    """Least-ambiguous-sets score: one minus the true label's probability."""
    labels = _require_labels(data)
    values = 1.0 - data.probs[np.arange(data.N), labels]
    return ScoreVector(values=values, method="las")


def score_batch_singleton(data: ProbMatrix, k0: int = 1) -> ScoreVector:
    """Pure top-k0 score: 0 inside the top k0, else 1 / (tail mass)."""
    labels = _require_labels(data)
    if not 1 <= k0 < data.K:
        raise ValueError(f"k0 must be in 1..{data.K - 1}, got {k0}")
    order, _, prefix = _sorted_batch(data.probs)
    ranks = _label_ranks(order, labels)
    outside = 1.0 / (1.0 - prefix[:, k0])
    values = np.where(ranks <= k0, 0.0, outside)
    return ScoreVector(values=values, method="singleton")


def las_label_scores(probs: np.ndarray) -> np.ndarray:
    """Per-label LAS scores for each row: 1 - p."""
    return 1.0 - np.asarray(probs, dtype=np.float64)


def singleton_label_scores(probs: np.ndarray, k0: int = 1) -> np.ndarray:
    """Per-label pure top-k0 scores for each row."""
    probs = np.asarray(probs, dtype=np.float64)
    order, _, prefix = _sorted_batch(probs)
    out = np.repeat(1.0 / (1.0 - prefix[:, k0])[:, None], probs.shape[1], axis=1)
    np.put_along_axis(out, order[:, :k0], 0.0, axis=1)
    return out


def plugin_set(row, alpha: float) -> frozenset[int]:
    """Smallest top-probability prefix whose mass reaches 1 - alpha.

    A direct, calibration-free baseline; it carries no coverage guarantee.
    Never empty because the target mass is positive.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must be in (0, 1)")
    values = _normalize(row)
    order = np.argsort(-values, kind="stable")
    masses = np.cumsum(values[order])
    size = int(np.searchsorted(masses, 1.0 - alpha, side="left")) + 1
    size = min(size, len(values))
    return frozenset(int(y) for y in order[:size])
