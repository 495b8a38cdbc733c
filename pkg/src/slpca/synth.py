"""Seeded generators for the helix and hat test manifolds.

Random numbers come from ``numpy.random.default_rng(seed)``.  The stream is
consumed in a fixed order: all latent coordinates first, then the noise,
each row-major, so changing the noise level never shifts the latent draws.
"""
from __future__ import annotations

import numpy as np
from scipy import linalg

from .data import DataMatrix
from .errors import InputError

# standard deviations 1.8 and 1.5 on the two latent axes
HAT_COVARIANCE = np.diag([1.8 ** 2, 1.5 ** 2])


def helix_surface(x):
    """Noiseless helix ``x -> (x, sin x, cos x)``."""
    x = np.asarray(x, dtype=float)
    return np.stack([x, np.sin(x), np.cos(x)], axis=-1)


def hat_height(x, y):
    """``cos(pi r / 3) (1 - exp(-64 r^2)) exp(0.2 r)`` with ``r = sqrt(x^2 + y^2)``."""
    r = np.hypot(x, y)
    return np.cos(np.pi * r / 3.0) * (1.0 - np.exp(-64.0 * r * r)) * np.exp(0.2 * r)


def gen_helix(n: int, sigma_x: float = 3.0, sigma: float = 1.0, seed: int = 0) -> DataMatrix:
    """Gaussian ``x`` with sd ``sigma_x``; noise of sd ``sigma`` on the second and third columns."""
    if n < 1:
        raise InputError("n must be >= 1")
    if sigma_x < 0 or sigma < 0:
        raise InputError("standard deviations must be non-negative")
    rng = np.random.default_rng(seed)
    x = sigma_x * rng.standard_normal(n)
    noise = sigma * rng.standard_normal((n, 2))
    y = helix_surface(x)
    y[:, 1:] += noise
    return DataMatrix(y, ("x", "y", "z"))


def gen_hat(n: int, sigma_x=HAT_COVARIANCE, sigma: float = 0.5, seed: int = 0) -> DataMatrix:
    """Gaussian ``(x, y)`` with covariance ``sigma_x``; noise of sd ``sigma`` on the height."""
    if n < 1:
        raise InputError("n must be >= 1")
    if sigma < 0:
        raise InputError("noise standard deviation must be non-negative")
    cov = np.asarray(sigma_x, dtype=float)
    if cov.shape != (2, 2) or not np.allclose(cov, cov.T):
        raise InputError("hat covariance must be a symmetric 2x2 matrix")
    try:
        L = linalg.cholesky(cov, lower=True)
    except linalg.LinAlgError:
        raise InputError("hat covariance is not positive definite") from None
    rng = np.random.default_rng(seed)
    xy = rng.standard_normal((n, 2)) @ L.T
    noise = sigma * rng.standard_normal(n)
    z = hat_height(xy[:, 0], xy[:, 1]) + noise
    return DataMatrix(np.column_stack([xy, z]), ("x", "y", "z"))
