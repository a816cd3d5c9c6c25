"""Dataset ingestion, synthetic data generation, and CSV round-tripping.

Probabilities arrive as plain CSV (one column per class, optional trailing
label column), precomputed by whatever model pipeline the user runs. All
randomness flows through seeded generators so outputs are reproducible.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .conformal import PredictionSet
from .scoring import ProbMatrix


class InputDataError(ValueError):
    """Malformed input file or dataset; mapped to exit code 2 by the CLI."""


@dataclass(frozen=True)
class SyntheticSpec:
    """Dirichlet-distributed probability rows with labels drawn from each row.

    Labels are sampled from the row's own distribution, so the synthetic
    classifier is perfectly calibrated by construction.
    """

    K: int
    N: int
    concentration: float | tuple[float, ...] = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.K < 2:
            raise ValueError("need K >= 2 classes")
        if self.N < 1:
            raise ValueError("need N >= 1 rows")
        conc = np.atleast_1d(np.asarray(self.concentration, dtype=np.float64))
        if np.any(conc <= 0) or not np.all(np.isfinite(conc)):
            raise ValueError("concentration entries must be positive and finite")
        if conc.size not in (1, self.K):
            raise ValueError(f"concentration must be scalar or length {self.K}")


def generate_synthetic(spec: SyntheticSpec) -> ProbMatrix:
    """Sample a labeled ProbMatrix per the spec, deterministically in the seed."""
    rng = np.random.default_rng(spec.seed)
    conc = np.atleast_1d(np.asarray(spec.concentration, dtype=np.float64))
    if conc.size == 1:
        conc = np.full(spec.K, conc[0])
    rows = rng.dirichlet(conc, size=spec.N)
    cum = np.cumsum(rows, axis=1)
    u = rng.random(spec.N)
    labels = np.minimum((cum < u[:, None]).sum(axis=1), spec.K - 1)
    return ProbMatrix.from_raw(rows, labels=labels)


def split_indices(n: int, sizes: tuple[int, int, int], seed: int, trial: int):
    """Disjoint (tune, cal, eval) index arrays for one trial.

    Each (seed, trial) pair seeds an independent stream, so trials are
    reproducible individually and distinct from each other.
    """
    n_tune, n_cal, n_eval = sizes
    if min(n_tune, n_cal, n_eval) < 0:
        raise ValueError("split sizes must be >= 0")
    if n_tune + n_cal + n_eval > n:
        raise ValueError(f"split sizes {sizes} exceed dataset size {n}")
    rng = np.random.default_rng([seed, trial])
    perm = rng.permutation(n)
    return (
        perm[:n_tune],
        perm[n_tune : n_tune + n_cal],
        perm[n_tune + n_cal : n_tune + n_cal + n_eval],
    )


def _prob_header(K: int, with_label: bool) -> list[str]:
    cols = [f"p_{k}" for k in range(K)]
    return cols + ["label"] if with_label else cols


def load_probs_csv(path) -> ProbMatrix:
    """Read a probability CSV with header p_0,...,p_{K-1}[,label]."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputDataError(f"{path}: empty file") from None
        with_label = header and header[-1] == "label"
        K = len(header) - 1 if with_label else len(header)
        if K < 2 or header[:K] != _prob_header(K, False):
            raise InputDataError(
                f"{path}: header must be p_0,...,p_{{K-1}} with optional trailing label"
            )
        rows, labels = [], []
        for lineno, rec in enumerate(reader, start=1):
            if len(rec) != len(header):
                raise InputDataError(
                    f"{path}: row {lineno} has {len(rec)} fields, expected {len(header)}"
                )
            try:
                rows.append([float(v) for v in rec[:K]])
            except ValueError:
                raise InputDataError(f"{path}: row {lineno}: non-numeric probability") from None
            if with_label:
                try:
                    labels.append(int(rec[K]))
                except ValueError:
                    raise InputDataError(f"{path}: row {lineno}: non-integer label") from None
    if not rows:
        raise InputDataError(f"{path}: no data rows")
    try:
        return ProbMatrix.from_raw(
            np.array(rows, dtype=np.float64),
            labels=np.array(labels, dtype=np.int64) if with_label else None,
        )
    except ValueError as err:
        raise InputDataError(f"{path}: {err}") from None


def write_probs_csv(path, data: ProbMatrix) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_prob_header(data.K, data.labels is not None))
        for i in range(data.N):
            row = [repr(float(v)) for v in data.probs[i]]
            if data.labels is not None:
                row.append(str(int(data.labels[i])))
            writer.writerow(row)


def load_score_column(path) -> np.ndarray:
    """Read a one-column score CSV (header `score`)."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["score"]:
            raise InputDataError(f"{path}: expected a single `score` column")
        out = []
        for lineno, rec in enumerate(reader, start=1):
            if len(rec) != 1:
                raise InputDataError(f"{path}: row {lineno} has {len(rec)} fields")
            try:
                out.append(float(rec[0]))
            except ValueError:
                raise InputDataError(f"{path}: row {lineno}: non-numeric score") from None
    if not out:
        raise InputDataError(f"{path}: no data rows")
    return np.array(out, dtype=np.float64)


def write_score_column(path, values) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["score"])
        for v in values:
            writer.writerow([repr(float(v))])


def load_score_matrix(path) -> np.ndarray:
    """Read an N x K per-label score CSV (header s_0,...,s_{K-1})."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header != [f"s_{k}" for k in range(len(header))]:
            raise InputDataError(f"{path}: header must be s_0,...,s_{{K-1}}")
        out = []
        for lineno, rec in enumerate(reader, start=1):
            if len(rec) != len(header):
                raise InputDataError(
                    f"{path}: row {lineno} has {len(rec)} fields, expected {len(header)}"
                )
            try:
                out.append([float(v) for v in rec])
            except ValueError:
                raise InputDataError(f"{path}: row {lineno}: non-numeric score") from None
    if not out:
        raise InputDataError(f"{path}: no data rows")
    return np.array(out, dtype=np.float64)


def write_sets_csv(path, sets) -> None:
    """Write prediction sets, one row per instance, members joined with `;`."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "size", "members"])
        for i, s in enumerate(sets):
            members = ";".join(str(y) for y in sorted(s))
            writer.writerow([i, len(s), members])


def load_sets_csv(path) -> list[PredictionSet]:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["index", "size", "members"]:
            raise InputDataError(f"{path}: expected header index,size,members")
        out = []
        for lineno, rec in enumerate(reader, start=1):
            if len(rec) != 3:
                raise InputDataError(f"{path}: row {lineno} has {len(rec)} fields")
            members = frozenset(int(v) for v in rec[2].split(";") if v != "")
            if int(rec[1]) != len(members):
                raise InputDataError(f"{path}: row {lineno}: size does not match members")
            out.append(PredictionSet(members=members))
    return out
