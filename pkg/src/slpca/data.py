"""Numeric data container, CSV ingestion, centering and covariance.

All covariance-like quantities in this package use the maximum-likelihood
denominator ``n`` rather than ``n - 1``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import InputError


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class DataMatrix:
    """An ``n x p`` table of finite reals with unique column labels."""

    values: np.ndarray
    column_names: tuple = field(default=())

    def __post_init__(self):
        values = _frozen(self.values)
        if values.ndim == 1:
            values = _frozen(values.reshape(-1, 1))
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise InputError(f"data must be a non-empty 2-D table, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            rows, cols = np.nonzero(~np.isfinite(values))
            raise InputError(f"non-finite value at row {rows[0] + 1}, column {cols[0] + 1}")
        names = tuple(self.column_names) or default_names(values.shape[1])
        if len(names) != values.shape[1]:
            raise InputError(f"expected {values.shape[1]} column names, got {len(names)}")
        if len(set(names)) != len(names):
            raise InputError(f"column names must be unique: {names}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "column_names", names)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


def default_names(p: int) -> tuple:
    return tuple(f"V{j + 1}" for j in range(p))


@dataclass(frozen=True)
class CenteringInfo:
    """Column means and scales of the (C) step; ``scales`` are all 1 unless standardized."""

    means: np.ndarray
    scales: np.ndarray
    standardized: bool = False

    def __post_init__(self):
        means, scales = _frozen(self.means), _frozen(self.scales)
        if means.shape != scales.shape or means.ndim != 1:
            raise InputError("means and scales must be vectors of equal length")
        if np.any(scales <= 0):
            raise InputError("centering scales must be strictly positive")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "scales", scales)

    def apply(self, values) -> np.ndarray:
        return (np.asarray(values, dtype=float) - self.means) / self.scales

    def invert(self, values) -> np.ndarray:
        return np.asarray(values, dtype=float) * self.scales + self.means


def _looks_numeric(cells: Sequence[str]) -> bool:
    try:
        [float(c) for c in cells]
    except ValueError:
        return False
    return True


def load_csv(path, has_header: Optional[bool] = False, delimiter: str = ",") -> DataMatrix:
    """Read a numeric CSV file.

    ``has_header=None`` sniffs the first line: it is taken as a header when
    any of its cells fails to parse as a number.
    """
    if delimiter not in (",", ";"):
        raise InputError(f"unsupported delimiter {delimiter!r}; use ',' or ';'")
    path = Path(path)
    if not path.is_file():
        raise InputError(f"file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        lines = [(i + 1, row) for i, row in enumerate(csv.reader(fh, delimiter=delimiter))]
    lines = [(lineno, row) for lineno, row in lines if row and any(c.strip() for c in row)]
    if not lines:
        raise InputError(f"empty file: {path}")

    if has_header is None:
        has_header = not _looks_numeric(lines[0][1])
    names = None
    if has_header:
        names = [c.strip() for c in lines[0][1]]
        lines = lines[1:]
        if not lines:
            raise InputError(f"no data rows after header in {path}")

    width = len(names) if names is not None else len(lines[0][1])
    rows = []
    for lineno, row in lines:
        if len(row) != width:
            raise InputError(
                f"ragged row at line {lineno}: expected {width} fields, got {len(row)}")
        parsed = []
        for col, cell in enumerate(row):
            try:
                value = float(cell)
            except ValueError:
                raise InputError(
                    f"cannot parse {cell.strip()!r} at line {lineno}, column {col + 1}") from None
            if not math.isfinite(value):
                raise InputError(f"non-finite value at line {lineno}, column {col + 1}")
            parsed.append(value)
        rows.append(parsed)
    return DataMatrix(np.array(rows), tuple(names) if names else ())


def write_csv(path, data: DataMatrix, delimiter: str = ",") -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        writer.writerow(data.column_names)
        for row in data.values:
            writer.writerow([repr(float(v)) for v in row])


def center_standardize(data: DataMatrix, standardize: bool = False):
    """Center the columns and optionally divide by their population standard deviation.

    Returns the transformed ``DataMatrix`` and the ``CenteringInfo`` needed to undo it.
    """
    y = data.values
    means = y.mean(axis=0)
    centered = y - means
    if standardize:
        if data.n < 2:
            raise InputError("standardization needs at least 2 rows")
        scales = np.sqrt(np.mean(centered ** 2, axis=0))
        spread = np.ptp(y, axis=0)
        for j, (s, r) in enumerate(zip(scales, spread)):
            if r == 0 or s <= 1e-14 * max(1.0, np.max(np.abs(y[:, j]))):
                raise InputError(f"column {data.column_names[j]!r} has zero variance")
        centered = centered / scales
    else:
        scales = np.ones(data.p)
    info = CenteringInfo(means, scales, bool(standardize))
    return DataMatrix(centered, data.column_names), info


def total_covariance(data) -> np.ndarray:
    """Covariance matrix with denominator ``n``; accepts a DataMatrix or a 2-D array."""
    y = data.values if isinstance(data, DataMatrix) else np.asarray(data, dtype=float)
    if y.shape[0] < 2:
        raise InputError("covariance needs at least 2 rows")
    c = y - y.mean(axis=0)
    v = c.T @ c / y.shape[0]
    # exact symmetry
    return np.triu(v) + np.triu(v, 1).T
