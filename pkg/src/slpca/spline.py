"""Clamped uniform B-spline bases and additive design matrices."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class BSplineBasis:
    """``num_basis`` B-splines of a given degree on a clamped knot vector over ``[lo, hi]``."""

    degree: int
    num_basis: int
    knots: np.ndarray

    @property
    def lo(self) -> float:
        return float(self.knots[0])

    @property
    def hi(self) -> float:
        return float(self.knots[-1])

    @property
    def domain(self) -> tuple:
        return (self.lo, self.hi)

    def __call__(self, x) -> np.ndarray:
        return eval_basis(self, x)


def make_basis(degree: int, m: int, lo: float, hi: float) -> BSplineBasis:
    """Clamped basis with ``m - degree - 1`` equally spaced interior knots."""
    if degree < 0:
        raise InputError(f"degree must be >= 0, got {degree}")
    if m < degree + 1:
        raise InputError(f"need at least degree+1 = {degree + 1} basis functions, got {m}")
    if not lo < hi:
        raise InputError(f"empty spline domain [{lo}, {hi}]")
    n_interior = m - degree - 1
    interior = lo + (hi - lo) * np.arange(1, n_interior + 1) / (n_interior + 1)
    knots = np.concatenate([np.full(degree + 1, lo), interior, np.full(degree + 1, hi)])
    knots.flags.writeable = False
    return BSplineBasis(int(degree), int(m), knots)


def eval_basis(basis: BSplineBasis, x) -> np.ndarray:
    """Cox-de Boor evaluation; scalar ``x`` gives a length-m vector, arrays give ``(len(x), m)``.

    Points outside the domain are clamped to it.
    """
    scalar = np.ndim(x) == 0
    x = np.clip(np.atleast_1d(np.asarray(x, dtype=float)), basis.lo, basis.hi)
    t = basis.knots
    k = basis.degree
    m = basis.num_basis

    # span index s with t[s] <= x < t[s+1]; the right end belongs to the last span
    s = np.searchsorted(t, x, side="right") - 1
    s = np.clip(s, k, m - 1)

    # N[:, r] holds B_{s-j+r, j} during the recursion over j
    N = np.zeros((x.size, k + 1))
    N[:, 0] = 1.0
    left = np.zeros((x.size, k + 1))
    right = np.zeros((x.size, k + 1))
    for j in range(1, k + 1):
        left[:, j] = x - t[s + 1 - j]
        right[:, j] = t[s + j] - x
        saved = np.zeros(x.size)
        for r in range(j):
            denom = right[:, r + 1] + left[:, j - r]
            temp = np.where(denom > 0, N[:, r] / np.where(denom > 0, denom, 1.0), 0.0)
            N[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        N[:, j] = saved

    out = np.zeros((x.size, m))
    rows = np.arange(x.size)
    for r in range(k + 1):
        out[rows, s - k + r] = N[:, r]
    return out[0] if scalar else out


def bases_for(X, m: int, degree: int = 3) -> list:
    """One basis per column of ``X`` spanning that column's observed range."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    bases = []
    for j in range(X.shape[1]):
        lo, hi = float(X[:, j].min()), float(X[:, j].max())
        if not lo < hi:
            raise InputError(f"projected coordinate {j + 1} is constant; cannot place knots")
        bases.append(make_basis(degree, m, lo, hi))
    return bases


def design_matrix(bases, X) -> np.ndarray:
    """``[1 | B_1(x_1) | ... | B_d(x_d)]`` with one block of ``m_j`` columns per axis."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.shape[1] != len(bases):
        raise InputError(f"X has {X.shape[1]} columns but {len(bases)} bases were given")
    blocks = [np.ones((X.shape[0], 1))]
    blocks += [eval_basis(b, X[:, j]) for j, b in enumerate(bases)]
    return np.hstack(blocks)
