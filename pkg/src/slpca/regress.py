"""Least-squares estimation of the map from projected coordinates to the complement.

Two families are supported: an affine map ``z = mu + R' x`` and an additive
B-spline map ``z = alpha_0 + sum_j sum_l alpha_jl s_jl(x_j)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import InputError, NumericalError
from .spline import bases_for, design_matrix, eval_basis

RANK_TOL = 1e-10


@dataclass(frozen=True)
class LinearRegression:
    intercept: np.ndarray     # (p-d,)
    coefficients: np.ndarray  # (d, p-d)

    kind = "linear"

    @property
    def d(self) -> int:
        return self.coefficients.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.coefficients.shape[1]


@dataclass(frozen=True)
class AdditiveRegression:
    """Intercept plus one ``(m_j, p-d)`` coefficient block per axis.

    The first row of every block is fixed at zero (identifiability constraint);
    its effect is carried by the intercept.
    """

    intercept: np.ndarray
    blocks: tuple
    bases: tuple

    kind = "spline"

    @property
    def d(self) -> int:
        return len(self.bases)

    @property
    def n_outputs(self) -> int:
        return self.intercept.shape[0]


def _as_2d(a, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise InputError(f"{name} must be a matrix")
    return a


def fit_linear(X, Z) -> LinearRegression:
    X, Z = _as_2d(X, "X"), _as_2d(Z, "Z")
    n, d = X.shape
    if Z.shape[0] != n:
        raise InputError("X and Z have different row counts")
    if n <= d:
        raise InputError(f"need more than d={d} rows, got {n}")
    mu_x, mu_z = X.mean(axis=0), Z.mean(axis=0)
    Xc, Zc = X - mu_x, Z - mu_z
    s = linalg.svdvals(Xc)
    if s[-1] <= RANK_TOL * s[0]:
        raise NumericalError("projected coordinates are rank deficient")
    R = linalg.lstsq(Xc, Zc)[0]
    return LinearRegression(mu_z - mu_x @ R, R)


def constrained_design(bases, X) -> np.ndarray:
    """Design matrix with the first column of each basis block removed."""
    S = design_matrix(bases, X)
    keep = [0]
    col = 1
    for b in bases:
        keep.extend(range(col + 1, col + b.num_basis))
        col += b.num_basis
    return S[:, keep]


def fit_additive_spline(X, Z, m: int | None = None, degree: int = 3, bases=None) -> AdditiveRegression:
    """Joint least-squares fit of all additive components.

    Knots are placed uniformly over each column's range unless ``bases`` is given.
    """
    X, Z = _as_2d(X, "X"), _as_2d(Z, "Z")
    n, d = X.shape
    if Z.shape[0] != n:
        raise InputError("X and Z have different row counts")
    if bases is None:
        if m is None:
            raise InputError("number of basis functions m is required")
        bases = bases_for(X, m, degree)
    bases = tuple(bases)
    if len(bases) != d:
        raise InputError(f"{len(bases)} bases given for {d} projected coordinates")
    width = 1 + sum(b.num_basis for b in bases)
    if n <= width:
        raise InputError(f"need more than {width} rows for this spline design, got {n}")
    S = constrained_design(bases, X)
    Qf, Rf, piv = linalg.qr(S, mode="economic", pivoting=True)
    diag = np.abs(np.diag(Rf))
    if diag[-1] <= RANK_TOL * diag[0]:
        raise NumericalError("spline design is rank deficient; reduce the number of control points")
    beta = np.empty((S.shape[1], Z.shape[1]))
    beta[piv] = linalg.solve_triangular(Rf, Qf.T @ Z)

    blocks, row = [], 1
    for b in bases:
        block = np.zeros((b.num_basis, Z.shape[1]))
        block[1:] = beta[row:row + b.num_basis - 1]
        row += b.num_basis - 1
        blocks.append(block)
    return AdditiveRegression(beta[0].copy(), tuple(blocks), bases)


def predict(reg, x) -> np.ndarray:
    """Evaluate the fitted map at one point (vector) or many (rows of a matrix)."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = x.reshape(1, -1) if single else x
    if X.ndim != 2 or X.shape[1] != reg.d:
        raise InputError(f"expected {reg.d} projected coordinates, got shape {x.shape}")
    if isinstance(reg, LinearRegression):
        out = reg.intercept + X @ reg.coefficients
    else:
        out = np.tile(reg.intercept, (X.shape[0], 1))
        for j, (b, block) in enumerate(zip(reg.bases, reg.blocks)):
            out = out + eval_basis(b, X[:, j]) @ block
    return out[0] if single else out


def component_curve(reg: AdditiveRegression, j: int, grid) -> np.ndarray:
    """Additive component of axis ``j`` (0-based) on ``grid``, without the intercept."""
    if not isinstance(reg, AdditiveRegression):
        raise InputError("component curves exist only for additive spline regressions")
    if not 0 <= j < reg.d:
        raise InputError(f"axis index {j} out of range for d={reg.d}")
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    return eval_basis(reg.bases[j], grid) @ reg.blocks[j]


def n_coefficients(reg) -> int:
    """Free coefficients stored by a regression (intercept included)."""
    q = reg.n_outputs
    if isinstance(reg, LinearRegression):
        return q + reg.d * q
    return q + sum((b.num_basis - 1) * q for b in reg.bases)

