"""Data containers and CSV ingestion for right-censored regression samples.

A sample is a triple (y, delta, x): observed outcomes Y_i = min(T_i, C_i) on
the log-duration scale, censoring indicators delta_i = 1{T_i <= C_i}, and an
n x p covariate matrix.  No intercept column is added implicitly; supply an
all-ones column if you want one.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class SurvivalSample:
    """Right-censored regression sample.

    Attributes
    ----------
    y : (n,) float array
        Observed outcomes, Y_i = min(T_i, C_i).
    delta : (n,) int array
        Censoring indicators, 1 = uncensored (event observed), 0 = censored.
    x : (n, p) float array
        Covariates, one row per observation.
    """

    y: np.ndarray
    delta: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        delta = np.asarray(self.delta)
        x = np.asarray(self.x, dtype=float)
        if y.ndim != 1:
            raise ValueError("y must be a 1-d vector")
        if x.ndim != 2:
            raise ValueError("x must be a 2-d matrix")
        n = y.shape[0]
        if delta.shape != (n,) or x.shape[0] != n:
            raise ValueError("y, delta and x must have matching lengths")
        p = x.shape[1]
        if p < 1:
            raise ValueError("at least one covariate column is required")
        if n <= p:
            raise ValueError(f"n must exceed p (got n={n}, p={p})")
        if not np.all(np.isfinite(y)) or not np.all(np.isfinite(x)):
            raise ValueError("y and x entries must be finite")
        if not np.all(np.isin(delta, (0, 1))):
            raise ValueError("delta entries must be 0 or 1")
        object.__setattr__(self, "y", _frozen(y))
        object.__setattr__(self, "delta", _frozen(delta.astype(np.int64)))
        object.__setattr__(self, "x", _frozen(x))

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class SortedSample:
    """A sample reordered by nondecreasing y, with the sorting permutation.

    ``perm`` maps sorted position -> original row index, so
    ``base.y[i] == original.y[perm[i]]``.  Within a tie group of equal y,
    uncensored observations come first (deaths before censorings, the
    standard Kaplan-Meier convention).
    """

    base: SurvivalSample
    perm: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "perm", _frozen(np.asarray(self.perm, dtype=np.int64)))


def sort_sample(sample: SurvivalSample) -> SortedSample:
    """Stable sort by (y ascending, delta descending) and record the permutation."""
    order = np.lexsort((-sample.delta, sample.y))
    base = SurvivalSample(y=sample.y[order], delta=sample.delta[order], x=sample.x[order])
    return SortedSample(base=base, perm=order)


def load_csv(path) -> SurvivalSample:
    """Read a sample from a CSV file with header ``y,delta,x1,...,xp``.

    Row numbers in error messages are 1-based file lines (the header is
    line 1).  Raises ValueError on any malformed content.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        p = len(header) - 2
        expected = ["y", "delta"] + [f"x{k}" for k in range(1, p + 1)]
        if p < 1 or header != expected:
            raise ValueError(
                f"{path}: header must be 'y,delta,x1,...,xp', got {','.join(header)!r}"
            )
        ys, deltas, rows = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != p + 2:
                raise ValueError(f"{path}: row {lineno}: expected {p + 2} fields, got {len(row)}")
            vals = []
            for col, (name, text) in enumerate(zip(expected, row), start=1):
                try:
                    vals.append(float(text))
                except ValueError:
                    raise ValueError(
                        f"{path}: row {lineno}, column {col} ({name}): cannot parse {text.strip()!r}"
                    ) from None
            if vals[1] not in (0.0, 1.0):
                raise ValueError(f"{path}: row {lineno}: delta must be 0 or 1, got {row[1].strip()}")
            if not all(np.isfinite(v) for v in vals):
                raise ValueError(f"{path}: row {lineno}: non-finite entry")
            ys.append(vals[0])
            deltas.append(int(vals[1]))
            rows.append(vals[2:])
    if not ys:
        raise ValueError(f"{path}: no data rows")
    return SurvivalSample(y=np.array(ys), delta=np.array(deltas), x=np.array(rows))


def write_csv(sample: SurvivalSample, path) -> None:
    """Write a sample in the ``load_csv`` format.

    Floats use the shortest decimal text that round-trips, so a
    load -> write -> load cycle reproduces the sample bit-exactly.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["y", "delta"] + [f"x{k}" for k in range(1, sample.p + 1)])
        for i in range(sample.n):
            writer.writerow(
                [repr(float(sample.y[i])), int(sample.delta[i])]
                + [repr(float(v)) for v in sample.x[i]]
            )
