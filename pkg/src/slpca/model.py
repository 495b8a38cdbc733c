"""Probabilistic semi-linear PCA: fitting, likelihood, BIC selection, sampling.

In the rotated basis ``Q = (P | Pbar)'`` a point splits into latent
coordinates ``x = P y`` with ``x ~ N(mu_x, Sigma_x)`` and complement
coordinates ``z = Pbar y`` with ``z | x ~ N(r(x), sigma2 I)``.  All of this
lives in the centered (optionally standardized) working space of the data.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy import linalg

from .axes import CompletedBasis, ProjectionBasis, complete_basis, estimate_axes, project
from .data import CenteringInfo, DataMatrix, center_standardize
from .errors import DegenerateModelError, InputError, SlpcaError
from .regress import (AdditiveRegression, LinearRegression, fit_additive_spline, fit_linear,
                      predict)

SIGMA2_FLOOR = 1e-12
LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class RegressionSpec:
    kind: str = "spline"
    m: Optional[int] = None
    degree: int = 3

    def __post_init__(self):
        if self.kind not in ("linear", "spline"):
            raise InputError(f"unknown regression kind {self.kind!r}")
        if self.kind == "spline":
            if self.m is None:
                raise InputError("spline regression needs the number of control points m")
            if self.m < self.degree + 1:
                raise InputError(f"m={self.m} is too small for degree {self.degree}")


@dataclass(frozen=True)
class SlpcaModel:
    basis: CompletedBasis
    regression: object  # LinearRegression | AdditiveRegression
    mu_x: np.ndarray
    sigma_x: np.ndarray
    sigma2: float
    centering: CenteringInfo
    n_train: int
    column_names: tuple
    axes_source: str = "user"
    log_likelihood: Optional[float] = None
    gamma: Optional[int] = None
    bic: Optional[float] = None
    degenerate: bool = False
    seed: Optional[int] = None

    @property
    def d(self) -> int:
        return self.basis.d

    @property
    def p(self) -> int:
        return self.basis.p

    @property
    def kind(self) -> str:
        return self.regression.kind

    @property
    def m(self) -> Optional[int]:
        if isinstance(self.regression, AdditiveRegression):
            return self.regression.bases[0].num_basis
        return None


def mle_gaussian(X):
    """Sample mean and covariance with denominator ``n``."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.shape[0] < 2:
        raise InputError("Gaussian estimates need at least 2 rows")
    mu = X.mean(axis=0)
    Xc = X - mu
    sigma = Xc.T @ Xc / X.shape[0]
    return mu, np.triu(sigma) + np.triu(sigma, 1).T


def residual_variance(Z, Zhat) -> float:
    """Pooled residual variance ``sum ||z_i - zhat_i||^2 / (n (p-d))``."""
    Z, Zhat = np.asarray(Z, dtype=float), np.asarray(Zhat, dtype=float)
    if Z.shape != Zhat.shape:
        raise InputError(f"shape mismatch {Z.shape} vs {Zhat.shape}")
    if Z.ndim == 1:
        Z, Zhat = Z.reshape(1, -1), Zhat.reshape(1, -1)
    if Z.shape[1] == 0:
        raise InputError("no complement coordinates (d = p): residual variance undefined")
    return float(np.sum((Z - Zhat) ** 2) / Z.size)


def parameter_count(d: int, p: int, kind: str = "linear", m: Optional[int] = None) -> int:
    """Free parameters: mean and covariance of x, noise variance, intercept and coefficients."""
    if not 1 <= d <= p:
        raise InputError(f"need 1 <= d <= p, got d={d}, p={p}")
    gaussian = d + d * (d + 1) // 2
    q = p - d
    if q == 0:
        return gaussian
    if kind == "linear":
        coef = d * q
    elif kind == "spline":
        if m is None:
            raise InputError("spline parameter count needs m")
        coef = d * (m - 1) * q
    else:
        raise InputError(f"unknown regression kind {kind!r}")
    return gaussian + 1 + q + coef


def bic(log_likelihood: float, gamma: int, n: float) -> float:
    """``-2 log L + gamma log n``; smaller is better."""
    if n < 1:
        raise InputError("n must be >= 1")
    return -2.0 * log_likelihood + gamma * math.log(n)


def _working(model: SlpcaModel, Y) -> np.ndarray:
    y = Y.values if isinstance(Y, DataMatrix) else np.asarray(Y, dtype=float)
    if y.ndim == 1:
        y = y.reshape(1, -1)
    if y.shape[1] != model.p:
        raise InputError(f"data has {y.shape[1]} columns, model expects {model.p}")
    return model.centering.apply(y)


def coordinates(model: SlpcaModel, Y):
    """Latent and complement coordinates ``(X, Z)`` of raw data under the model."""
    return project(_working(model, Y), model.basis)


def log_likelihood(model: SlpcaModel, Y) -> float:
    """Gaussian log-likelihood of ``Y`` in the working space (``Q`` has unit Jacobian)."""
    X, Z = coordinates(model, Y)
    n, d = X.shape
    q = Z.shape[1]

    sigma_x = np.atleast_2d(model.sigma_x)
    w = np.linalg.eigvalsh(sigma_x)
    if w[0] <= SIGMA2_FLOOR * max(w[-1], 1.0):
        raise DegenerateModelError("latent covariance is singular")
    L = linalg.cholesky(sigma_x, lower=True)
    u = linalg.solve_triangular(L, (X - model.mu_x).T, lower=True)
    logdet = 2.0 * np.sum(np.log(np.diag(L)))
    ll = -0.5 * (n * d * LOG_2PI + n * logdet + np.sum(u * u))

    if q:
        if model.sigma2 < SIGMA2_FLOOR:
            raise DegenerateModelError(f"residual variance {model.sigma2:.3g} is zero")
        r = Z - predict(model.regression, X)
        ll -= 0.5 * (n * q * (LOG_2PI + math.log(model.sigma2)) + np.sum(r * r) / model.sigma2)
    return float(ll)


def fit(Y: DataMatrix, axes, d: int, spec: RegressionSpec = RegressionSpec("linear"),
        standardize: bool = False, centering: Optional[CenteringInfo] = None,
        bases: Optional[Sequence] = None) -> SlpcaModel:
    """Fit a model on the first ``d`` axes: center, project, regress, score.

    ``axes`` must live in the working space produced by the same centering.
    ``centering`` and ``bases`` let a refit reuse the transform and spline
    knots of another model instead of re-deriving them from ``Y``.
    """
    if not isinstance(Y, DataMatrix):
        Y = DataMatrix(Y)
    if centering is None:
        Yc, centering = center_standardize(Y, standardize)
        yc = Yc.values
    else:
        yc = centering.apply(Y.values)
    if isinstance(axes, ProjectionBasis):
        source, A = axes.source, axes.axes
    else:
        source, A = "user", np.atleast_2d(np.asarray(axes, dtype=float))
    if A.shape[1] != Y.p:
        raise InputError(f"axes have dimension {A.shape[1]}, data has {Y.p} columns")
    if not 1 <= d <= A.shape[0]:
        raise InputError(f"d must be in [1, {A.shape[0]}], got {d}")

    basis = complete_basis(A[:d], Y.p)
    X, Z = project(yc, basis)
    mu_x, sigma_x = mle_gaussian(X)
    q = Y.p - d
    if q == 0:
        reg, sigma2 = LinearRegression(np.zeros(0), np.zeros((d, 0))), 0.0
    else:
        if spec.kind == "linear":
            reg = fit_linear(X, Z)
        else:
            reg = fit_additive_spline(X, Z, spec.m, spec.degree, bases=bases)
        sigma2 = residual_variance(Z, predict(reg, X))

    model = SlpcaModel(basis, reg, mu_x, sigma_x, sigma2, centering, Y.n,
                       Y.column_names, source)
    gamma = parameter_count(d, Y.p, spec.kind, model.m)
    try:
        ll = log_likelihood(model, Y)
    except DegenerateModelError:
        return replace(model, gamma=gamma, degenerate=True)
    return replace(model, log_likelihood=ll, gamma=gamma, bic=bic(ll, gamma, Y.n))


def reconstruct(model: SlpcaModel, Y) -> DataMatrix:
    """Map each point onto the fitted manifold: ``y -> Q'(P y, r(P y))`` in working space."""
    X, _ = coordinates(model, Y)
    Zhat = predict(model.regression, X) if model.p > model.d else np.zeros((X.shape[0], 0))
    yhat = np.hstack([X, Zhat]) @ model.basis.Q
    return DataMatrix(model.centering.invert(yhat), model.column_names)


def _matrix_sqrt(sigma: np.ndarray) -> np.ndarray:
    try:
        return linalg.cholesky(sigma, lower=True)
    except linalg.LinAlgError:
        w, U = np.linalg.eigh(sigma)
        return U * np.sqrt(np.clip(w, 0.0, None))


def sample(model: SlpcaModel, n: int, seed: int) -> DataMatrix:
    """Draw ``n`` points from the generative model.

    Uses numpy's PCG64 generator (``default_rng(seed)``) with its ziggurat
    standard normals: all latent draws ``(n, d)`` first, then the noise
    ``(n, p-d)``, both row-major.
    """
    if n < 1:
        raise InputError("n must be >= 1")
    rng = np.random.default_rng(seed)
    d, q = model.d, model.p - model.d
    e = rng.standard_normal((n, d))
    X = model.mu_x + e @ _matrix_sqrt(np.atleast_2d(model.sigma_x)).T
    noise = rng.standard_normal((n, q)) * math.sqrt(max(model.sigma2, 0.0))
    Z = (predict(model.regression, X) if q else np.zeros((n, 0))) + noise
    y = np.hstack([X, Z]) @ model.basis.Q
    return DataMatrix(model.centering.invert(y), model.column_names)


@dataclass(frozen=True)
class ModelFamily:
    """Candidate grid for selection: dimensions ``1..d_max`` times regression kinds."""

    d_max: int
    kinds: tuple = ("linear", "spline")
    m_values: tuple = ()
    degree: int = 3
    axes_source: str = "pca"
    k: int = 3

    def candidates(self):
        for d in range(1, self.d_max + 1):
            for kind in sorted(set(self.kinds)):
                if kind == "linear":
                    yield d, RegressionSpec("linear", None, self.degree)
                else:
                    for m in sorted(set(self.m_values)):
                        yield d, RegressionSpec("spline", m, self.degree)


@dataclass
class SelectionRow:
    d: int
    kind: str
    m: Optional[int]
    gamma: Optional[int] = None
    log_likelihood: Optional[float] = None
    bic: Optional[float] = None
    sigma2: Optional[float] = None
    error: Optional[str] = None


@dataclass
class SelectionReport:
    rows: list
    selected: Optional[int]
    axes: Optional[ProjectionBasis] = None
    models: list = field(default_factory=list, repr=False)

    @property
    def best(self) -> Optional[SlpcaModel]:
        return None if self.selected is None else self.models[self.selected]


def select_index(rows) -> Optional[int]:
    """Row with minimal BIC; ties go to fewer parameters, then smaller d."""
    ok = [i for i, r in enumerate(rows) if r.bic is not None and np.isfinite(r.bic)]
    if not ok:
        return None
    return min(ok, key=lambda i: (rows[i].bic, rows[i].gamma, rows[i].d))


def select(Y: DataMatrix, family: ModelFamily, standardize: bool = False,
           axes: Optional[ProjectionBasis] = None) -> SelectionReport:
    """Fit every candidate of ``family`` on shared axes and pick the minimal BIC."""
    if not isinstance(Y, DataMatrix):
        Y = DataMatrix(Y)
    if family.d_max < 1 or family.d_max > Y.p:
        raise InputError(f"d_max must be in [1, {Y.p}], got {family.d_max}")
    if not any(True for _ in family.candidates()):
        raise InputError("model family is empty")
    if axes is None:
        Yc, _ = center_standardize(Y, standardize)
        axes = estimate_axes(Yc, family.axes_source, family.d_max, family.k)

    rows, models = [], []
    for d, spec in family.candidates():
        row = SelectionRow(d, spec.kind, spec.m)
        model = None
        try:
            model = fit(Y, axes, d, spec, standardize)
            row.gamma, row.sigma2 = model.gamma, model.sigma2
            row.log_likelihood, row.bic = model.log_likelihood, model.bic
            if model.degenerate:
                row.error = "degenerate model"
        except SlpcaError as exc:
            row.error = str(exc)
        rows.append(row)
        models.append(model)
    return SelectionReport(rows, select_index(rows), axes, models)
