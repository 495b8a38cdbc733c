"""Projection axes: PCA, contiguity analysis, orthonormal completion and projection.

Contiguity analysis looks for directions along which k-nearest neighbours stay
close relative to the overall spread of the cloud.  The axes are the leading
eigenvectors of ``inv(V*) @ V`` where ``V*`` is the local (neighbour
difference) covariance and ``V`` the total covariance.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .data import DataMatrix, total_covariance
from .errors import InputError, NumericalError

ORTHO_TOL = 1e-8


def _values(data) -> np.ndarray:
    return data.values if isinstance(data, DataMatrix) else np.asarray(data, dtype=float)


@dataclass(frozen=True)
class ContiguityMatrix:
    """Row-wise k-NN graph: ``neighbors[i]`` holds the k nearest rows to row ``i``."""

    neighbors: np.ndarray  # (n, k) int
    k: int

    @property
    def n(self) -> int:
        return self.neighbors.shape[0]

    def dense(self) -> np.ndarray:
        m = np.zeros((self.n, self.n), dtype=bool)
        rows = np.repeat(np.arange(self.n), self.k)
        m[rows, self.neighbors.ravel()] = True
        return m


@dataclass(frozen=True)
class ProjectionBasis:
    """Ordered orthonormal axes, one per row of ``axes`` (``d_max x p``)."""

    axes: np.ndarray
    source: str = "user"

    def __post_init__(self):
        axes = np.atleast_2d(np.array(self.axes, dtype=float))
        check_orthonormal(axes, tol=ORTHO_TOL)
        axes.flags.writeable = False
        object.__setattr__(self, "axes", axes)

    @property
    def p(self) -> int:
        return self.axes.shape[1]

    @property
    def d_max(self) -> int:
        return self.axes.shape[0]


@dataclass(frozen=True)
class CompletedBasis:
    """First ``d`` axes ``P`` and an orthonormal complement ``Pbar``; ``Q`` stacks them."""

    P: np.ndarray
    Pbar: np.ndarray

    @property
    def d(self) -> int:
        return self.P.shape[0]

    @property
    def p(self) -> int:
        return self.P.shape[1]

    @property
    def Q(self) -> np.ndarray:
        return np.vstack([self.P, self.Pbar])


def check_orthonormal(rows: np.ndarray, tol: float = ORTHO_TOL) -> None:
    gram = rows @ rows.T
    err = np.max(np.abs(gram - np.eye(rows.shape[0]))) if rows.size else 0.0
    if err > tol:
        raise InputError(f"axes are not orthonormal (max Gram deviation {err:.3g})")


def fix_signs(rows: np.ndarray) -> np.ndarray:
    """Flip each row so that its largest-magnitude entry is positive (first index on ties)."""
    rows = np.array(rows, dtype=float)
    for r in rows:
        if r[np.argmax(np.abs(r))] < 0:
            r *= -1.0
    return rows


def gram_schmidt(vectors: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt on the rows of ``vectors``, in order."""
    out = np.array(vectors, dtype=float)
    for i in range(out.shape[0]):
        for j in range(i):
            out[i] -= (out[j] @ out[i]) * out[j]
        norm = np.linalg.norm(out[i])
        if norm < 1e-12:
            raise NumericalError("axes are linearly dependent")
        out[i] /= norm
    # second pass keeps orthogonality near machine precision
    for i in range(out.shape[0]):
        for j in range(i):
            out[i] -= (out[j] @ out[i]) * out[j]
        out[i] /= np.linalg.norm(out[i])
    return out


def knn_contiguity(data, k: int, block: int = 256) -> ContiguityMatrix:
    """Exact k-nearest-neighbour graph by brute force, ties broken by lower row index."""
    y = _values(data)
    n = y.shape[0]
    if not 1 <= k <= n - 1:
        raise InputError(f"k must be in [1, n-1] = [1, {n - 1}], got {k}")
    neighbors = np.empty((n, k), dtype=np.intp)
    for start in range(0, n, block):
        stop = min(start + block, n)
        diff = y[start:stop, None, :] - y[None, :, :]
        dist = np.sum(diff * diff, axis=2)
        dist[np.arange(stop - start), np.arange(start, stop)] = np.inf
        # stable sort keeps lower indices first among equal distances
        order = np.argsort(dist, axis=1, kind="stable")
        neighbors[start:stop] = order[:, :k]
    return ContiguityMatrix(neighbors, k)


def local_covariance(data, M: ContiguityMatrix, k: int | None = None) -> np.ndarray:
    """``V* = 1/(2kn) sum_ij m_ij (y_i - y_j)(y_i - y_j)'`` over the stored graph."""
    y = _values(data)
    n = y.shape[0]
    if M.n != n:
        raise InputError(f"contiguity graph has {M.n} nodes but data has {n} rows")
    k = M.k if k is None else k
    diff = (y[:, None, :] - y[M.neighbors]).reshape(-1, y.shape[1])
    v = diff.T @ diff / (2.0 * k * n)
    return np.triu(v) + np.triu(v, 1).T


def contiguity_axes(Vstar: np.ndarray, V: np.ndarray, d_max: int) -> ProjectionBasis:
    """Leading eigenvectors of ``inv(Vstar) @ V``, re-orthonormalized in eigenvalue order.

    The pencil is reduced with the Cholesky factor ``Vstar = L L'`` to the
    symmetric problem ``inv(L) V inv(L')``; eigenvectors map back through
    ``inv(L')``.  Those are ``Vstar``-orthogonal, so Gram-Schmidt is applied to
    obtain an orthonormal projection.
    """
    Vstar = np.asarray(Vstar, dtype=float)
    V = np.asarray(V, dtype=float)
    p = V.shape[0]
    if Vstar.shape != (p, p) or V.shape != (p, p):
        raise InputError("Vstar and V must be square matrices of equal size")
    if not 1 <= d_max <= p:
        raise InputError(f"d_max must be in [1, {p}], got {d_max}")
    scale = max(np.trace(Vstar), np.finfo(float).tiny)
    if np.linalg.eigvalsh(Vstar)[0] <= 1e-10 * scale:
        raise NumericalError("local covariance is singular; increase k")
    L = linalg.cholesky(Vstar, lower=True)
    A = linalg.solve_triangular(L, V, lower=True)
    C = linalg.solve_triangular(L, A.T, lower=True)
    C = 0.5 * (C + C.T)
    w, U = linalg.eigh(C)
    order = np.argsort(-w, kind="stable")[:d_max]
    vecs = linalg.solve_triangular(L.T, U[:, order], lower=False).T
    axes = fix_signs(gram_schmidt(vecs))
    return ProjectionBasis(axes, source="contiguity")


def pca_axes(V: np.ndarray, d_max: int) -> ProjectionBasis:
    V = np.asarray(V, dtype=float)
    p = V.shape[0]
    if not 1 <= d_max <= p:
        raise InputError(f"d_max must be in [1, {p}], got {d_max}")
    w, U = linalg.eigh(0.5 * (V + V.T))
    order = np.argsort(-w, kind="stable")[:d_max]
    return ProjectionBasis(fix_signs(U[:, order].T), source="pca")


def complete_basis(P_axes, p: int | None = None) -> CompletedBasis:
    """Append a deterministic orthonormal complement taken from a Householder QR."""
    P = np.atleast_2d(np.array(P_axes, dtype=float))
    if P.size == 0:
        raise InputError("at least one axis is required")
    p = P.shape[1] if p is None else p
    if P.shape[1] != p or P.shape[0] > p:
        raise InputError(f"axes of shape {P.shape} incompatible with p={p}")
    check_orthonormal(P, tol=ORTHO_TOL)
    d = P.shape[0]
    Qfull, _ = linalg.qr(P.T, mode="full")
    Pbar = fix_signs(Qfull[:, d:].T) if d < p else np.zeros((0, p))
    return CompletedBasis(P, Pbar)


def estimate_axes(data, method: str = "pca", d_max: int | None = None, k: int = 3) -> ProjectionBasis:
    """Axes from already centered (and possibly standardized) data."""
    y = _values(data)
    d_max = y.shape[1] if d_max is None else d_max
    V = total_covariance(y)
    if method == "pca":
        return pca_axes(V, d_max)
    if method == "contiguity":
        M = knn_contiguity(y, k)
        return contiguity_axes(local_covariance(y, M), V, d_max)
    raise InputError(f"unknown axes method {method!r}; use 'pca' or 'contiguity'")


def project(data, basis: CompletedBasis):
    """Coordinates on the axes ``X = Y P'`` and on the complement ``Z = Y Pbar'``."""
    y = _values(data)
    if y.ndim != 2 or y.shape[1] != basis.p:
        raise InputError(f"data has {y.shape[-1]} columns, basis expects {basis.p}")
    return y @ basis.P.T, y @ basis.Pbar.T


def axis_correlations(X, data) -> np.ndarray:
    """Pearson correlations between projected coordinates (rows) and data columns."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = _values(data)
    if X.shape[0] != y.shape[0]:
        raise InputError("projected and original data have different row counts")
    xc = X - X.mean(axis=0)
    yc = y - y.mean(axis=0)
    sx = np.sqrt(np.sum(xc ** 2, axis=0))
    sy = np.sqrt(np.sum(yc ** 2, axis=0))
    if np.any(sx == 0) or np.any(sy == 0):
        raise InputError("correlation undefined for a zero-variance column")
    r = (xc.T @ yc) / np.outer(sx, sy)
    return np.clip(r, -1.0, 1.0)
