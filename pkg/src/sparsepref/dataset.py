"""Tabular ingestion, normalization, skylines, and dimension projections.

A loaded :class:`Dataset` keeps every value in ``(0, 1]`` with each column's
maximum exactly 1. Strict positivity is load-bearing for the interaction
semantics downstream: a displayed tuple scores 0 under a partial utility
iff every displayed weight is 0, which is what makes an opt-out answer
informative.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

Dims = tuple[int, ...]


class Direction(enum.Enum):
    """Whether larger or smaller raw values are better for a column."""

    HIGHER_BETTER = "max"
    LOWER_BETTER = "min"

    @classmethod
    def from_token(cls, token: str) -> "Direction":
        t = token.strip().lower()
        if t == "max":
            return cls.HIGHER_BETTER
        if t == "min":
            return cls.LOWER_BETTER
        raise ValueError(f"unknown direction token {token!r} (expected 'max' or 'min')")


class TableError(ValueError):
    """Raised for structurally invalid raw tables."""


@dataclass(frozen=True)
class RawTable:
    """Unnormalized input: ``cells[i][j] is None`` marks a missing value."""

    column_names: tuple[str, ...]
    directions: tuple[Direction, ...]
    cells: tuple[tuple[float | None, ...], ...]

    def __post_init__(self):
        d = len(self.column_names)
        if d == 0:
            raise TableError("table needs at least one column")
        if len(set(self.column_names)) != d:
            raise TableError("column names must be unique")
        if len(self.directions) != d:
            raise TableError("one direction flag per column required")
        if len(self.cells) == 0:
            raise TableError("table needs at least one row")
        for row in self.cells:
            if len(row) != d:
                raise TableError("ragged row: every row must have d cells")

    @property
    def n(self) -> int:
        return len(self.cells)

    @property
    def d(self) -> int:
        return len(self.column_names)


@dataclass(frozen=True)
class Dataset:
    """Normalized n x d table; rows keep their identity via ``origin_ids``."""

    values: np.ndarray
    attribute_names: tuple[str, ...]
    origin_ids: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 2 or values.size == 0:
            raise TableError("values must be a nonempty 2-d array")
        n, d = values.shape
        if len(self.attribute_names) != d:
            raise TableError("attribute name count must match column count")
        if self.origin_ids is None:
            object.__setattr__(self, "origin_ids", np.arange(n))
        else:
            ids = np.asarray(self.origin_ids)
            object.__setattr__(self, "origin_ids", ids)
            if ids.shape != (n,):
                raise TableError("origin_ids must have one entry per row")
            if len(np.unique(ids)) != n:
                raise TableError("origin_ids must be unique")
        if np.any(values <= 0.0) or np.any(values > 1.0):
            raise TableError("values must lie in (0, 1]")
        values.setflags(write=False)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def subset(self, row_indices: Sequence[int]) -> "Dataset":
        """Rows by position, keeping names and origin identity."""
        idx = np.asarray(row_indices, dtype=int)
        return Dataset(self.values[idx].copy(), self.attribute_names,
                       self.origin_ids[idx].copy())


def assert_normalized(X: Dataset) -> None:
    """Normalization guarantee: each column attains its maximum of exactly 1.

    Holds for loaded/generated datasets and survives projection and skyline
    reduction, but not arbitrary row subsets.
    """
    if np.any(X.values.max(axis=0) < 1.0 - 1e-9):
        raise TableError("dataset is not normalized: some column never reaches 1")


def check_dims(dims: Sequence[int], d: int) -> Dims:
    """Validate an ordered dimension subset against a d-column table."""
    out = tuple(int(i) for i in dims)
    if len(out) == 0:
        raise ValueError("dimension set must be nonempty")
    if len(set(out)) != len(out):
        raise ValueError("dimension indices must be distinct")
    for i in out:
        if not 0 <= i < d:
            raise IndexError(f"dimension {i} out of range [0, {d})")
    return out


def load_table(raw: RawTable, delta_fraction: float = 0.01) -> Dataset:
    """Normalize a raw table into ``(0, 1]`` with per-column max exactly 1.

    Missing cells take the column's minimum observed raw value first;
    lower-better columns are inverted via ``max - x``; each column is then
    mapped by ``(x - min + delta) / (max - min + delta)`` with
    ``delta = delta_fraction * (max - min)``, so the best value lands on 1
    and the worst stays strictly positive. Constant columns map to all-1.
    """
    if not 0.0 < delta_fraction <= 0.1:
        raise ValueError("delta_fraction must be in (0, 0.1]")
    n, d = raw.n, raw.d
    out = np.empty((n, d), dtype=float)
    for j in range(d):
        col = np.array([row[j] if row[j] is not None else np.nan for row in raw.cells],
                       dtype=float)
        observed = col[~np.isnan(col)]
        if observed.size == 0:
            raise TableError(f"column {raw.column_names[j]!r} has no observed values")
        col[np.isnan(col)] = observed.min()
        if raw.directions[j] is Direction.LOWER_BETTER:
            col = col.max() - col
        lo, hi = col.min(), col.max()
        span = hi - lo
        if span == 0.0:
            out[:, j] = 1.0
        else:
            delta = delta_fraction * span
            out[:, j] = (col - lo + delta) / (span + delta)
    return Dataset(out, raw.column_names)


def _dominated_by(block: np.ndarray, against: np.ndarray,
                  against_sums: np.ndarray | None = None) -> np.ndarray:
    """For each row of `block`, whether some row of `against` dominates it.

    Works dimension by dimension on 2-d boolean masks to avoid 3-d
    temporaries; q >= p everywhere plus sum(q) > sum(p) is exactly
    dominance.
    """
    if against_sums is None:
        against_sums = against.sum(axis=1)
    ge = np.ones((block.shape[0], against.shape[0]), dtype=bool)
    for j in range(block.shape[1]):
        ge &= against[:, j][None, :] >= block[:, j][:, None]
    ge &= against_sums[None, :] > block.sum(axis=1)[:, None]
    return ge.any(axis=1)


def _skyline_mask(values: np.ndarray, chunk: int = 512) -> np.ndarray:
    """Boolean mask of rows not dominated by any other row.

    q dominates p iff q >= p componentwise and q != p. Rows are processed in
    descending sum order and in chunks: a dominator always has a strictly
    larger sum, so checking against previously accepted rows plus the own
    chunk covers every case (domination by an already-rejected row implies
    domination by whatever rejected it).
    """
    n = values.shape[0]
    sums = values.sum(axis=1)
    order = np.argsort(-sums, kind="stable")
    kept_rows: list[np.ndarray] = []
    kept_idx: list[np.ndarray] = []
    for start in range(0, n, chunk):
        idx = order[start:start + chunk]
        block = values[idx]
        bad = np.zeros(len(idx), dtype=bool)
        if kept_rows:
            kept = np.vstack(kept_rows) if len(kept_rows) > 1 else kept_rows[0]
            kept_rows = [kept]
            bad = _dominated_by(block, kept)
        intra = _dominated_by(block, block)
        ok = ~(bad | intra)
        if ok.any():
            kept_rows.append(block[ok])
            kept_idx.append(idx[ok])
    mask = np.zeros(n, dtype=bool)
    if kept_idx:
        mask[np.concatenate(kept_idx)] = True
    return mask


def skyline(X: Dataset) -> Dataset:
    """Rows not dominated by any other row, original order preserved."""
    mask = _skyline_mask(X.values)
    return X.subset(np.flatnonzero(mask))


def project(X: Dataset, dims: Sequence[int]) -> Dataset:
    """Restrict to the given columns, in the given order."""
    dims = check_dims(dims, X.d)
    cols = list(dims)
    return Dataset(X.values[:, cols].copy(),
                   tuple(X.attribute_names[i] for i in cols),
                   X.origin_ids.copy())


def read_raw_csv(path) -> RawTable:
    """Read the CSV shape documented in the README.

    First row: attribute names. Optional second row: per-column direction
    tokens ``max``/``min`` (default ``max`` when absent). Empty cells are
    missing values.
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise TableError(f"{path}: empty file")
    names = tuple(s.strip() for s in rows[0])
    body = rows[1:]
    directions = tuple(Direction.HIGHER_BETTER for _ in names)
    if body and all(cell.strip().lower() in ("max", "min") for cell in body[0]):
        directions = tuple(Direction.from_token(c) for c in body[0])
        body = body[1:]
    if not body:
        raise TableError(f"{path}: no data rows")

    def parse(cell: str) -> float | None:
        cell = cell.strip()
        return None if cell == "" else float(cell)

    cells = tuple(tuple(parse(c) for c in row) for row in body)
    return RawTable(names, directions, cells)


def load_csv(path, delta_fraction: float = 0.01, apply_skyline: bool = True) -> Dataset:
    """Read, normalize, and (by default) reduce a CSV to its skyline rows."""
    ds = load_table(read_raw_csv(path), delta_fraction)
    return skyline(ds) if apply_skyline else ds


def write_csv(X: Dataset, path) -> None:
    """Write a dataset back out in the ingestible CSV shape."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(X.attribute_names)
        w.writerow(["max"] * X.d)
        for row in X.values:
            w.writerow([repr(float(v)) for v in row])
