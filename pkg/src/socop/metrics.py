"""Evaluation metrics for prediction sets: coverage, size, non-singleton rate."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass


@dataclass(frozen=True)
class EvalReport:
    """Summary of one evaluation pass over labeled prediction sets."""

    coverage: float
    avg_size: float
    p_size_gt: float
    histogram: dict[int, float]
    empty_rate: float
    n_eval: int

    def as_dict(self) -> dict:
        return {
            "coverage": self.coverage,
            "avg_size": self.avg_size,
            "p_size_gt": self.p_size_gt,
            "empty_rate": self.empty_rate,
            "n_eval": self.n_eval,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }


def evaluate(sets, labels, k0: int = 1) -> EvalReport:
    """Coverage, average size, P(size > k0) and the size histogram."""
    sets = list(sets)
    labels = list(labels)
    if len(sets) != len(labels):
        raise ValueError(f"{len(sets)} sets but {len(labels)} labels")
    n = len(sets)
    if n < 1:
        raise ValueError("need at least one prediction set")
    covered = sum(1 for s, y in zip(sets, labels) if int(y) in s)
    sizes = [len(s) for s in sets]
    counts = Counter(sizes)
    histogram = {size: counts[size] / n for size in sorted(counts)}
    return EvalReport(
        coverage=covered / n,
        avg_size=sum(sizes) / n,
        p_size_gt=sum(1 for s in sizes if s > k0) / n,
        histogram=histogram,
        empty_rate=histogram.get(0, 0.0),
        n_eval=n,
    )


def excess_mass_delta(hist_a: dict[int, float], hist_b: dict[int, float]) -> float:
    """Total histogram mass by which A exceeds B on sizes two and up.

    Quantifies how much more often method A produces each non-singleton
    size; empty and singleton bins are excluded.
    """
    sizes = set(hist_a) | set(hist_b)
    return sum(
        max(0.0, hist_a.get(s, 0.0) - hist_b.get(s, 0.0)) for s in sizes if s >= 2
    )
