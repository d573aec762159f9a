"""Gaussian log-likelihoods for the chirp model.

Dependent errors have correlation ``exp(-rho |i - j|)``, which is the
Kac-Murdock-Szego matrix with ``phi = exp(-rho)``, i.e. a stationary AR(1)
correlation. Its inverse is tridiagonal,

    Delta^{-1} = 1/(1 - phi^2) * tridiag(-phi; 1, 1 + phi^2, ..., 1 + phi^2, 1; -phi)

and ``log det Delta = (T - 1) log(1 - phi^2)``, so every quadratic form
costs O(T).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import ChirpParams, mean_vector

LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class NoiseModel:
    """Error variance ``sigma2`` and, for dependent errors, decay rate ``rho``."""

    sigma2: float
    rho: Optional[float] = None

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")
        if self.rho is not None and not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho}")

    @property
    def dependent(self) -> bool:
        return self.rho is not None


def _check_rho(rho: float) -> None:
    if not rho > 0:
        raise ValueError(f"rho must be positive for a positive definite correlation, got {rho}")


@dataclass(frozen=True)
class CorrelationStructure:
    """Exponential-decay correlation of a length-``T`` series."""

    T: int
    rho: float

    def __post_init__(self):
        _check_rho(self.rho)

    @property
    def phi(self) -> float:
        return math.exp(-self.rho)

    @property
    def logdet(self) -> float:
        return kms_logdet(self.T, self.rho)

    def solve(self, v):
        return kms_solve(v, self.rho)

    def quadform(self, v):
        return kms_quadform(v, self.rho)


def kms_logdet(T: int, rho: float) -> float:
    _check_rho(rho)
    return (T - 1) * math.log(-math.expm1(-2.0 * rho)) if T > 1 else 0.0


def kms_whiten(v, rho: float) -> np.ndarray:
    """Map ``v`` to ``L^{-1} v`` where ``Delta = L L'``; whitening runs along the last axis.

    ``kms_whiten(u) @ kms_whiten(v) == u' Delta^{-1} v``.
    """
    _check_rho(rho)
    v = np.asarray(v, dtype=float)
    phi = math.exp(-rho)
    w = np.empty_like(v)
    w[..., :1] = v[..., :1]
    w[..., 1:] = (v[..., 1:] - phi * v[..., :-1]) / math.sqrt(-math.expm1(-2.0 * rho))
    return w


def kms_solve(v, rho: float) -> np.ndarray:
    """``Delta^{-1} v`` by tridiagonal multiplication along the last axis."""
    _check_rho(rho)
    v = np.asarray(v, dtype=float)
    phi = math.exp(-rho)
    if v.shape[-1] == 1:
        return v.copy()  # Delta = [1]
    out = v.copy()
    out[..., 1:-1] *= 1.0 + phi * phi
    out[..., :-1] -= phi * v[..., 1:]
    out[..., 1:] -= phi * v[..., :-1]
    return out / -math.expm1(-2.0 * rho)


def kms_quadform(v, rho: float) -> tuple[float, float]:
    """Return ``(v' Delta^{-1} v, log det Delta)`` for a 1-d vector ``v``."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("kms_quadform expects a non-empty 1-d vector")
    w = kms_whiten(v, rho)
    return float(w @ w), kms_logdet(v.size, rho)


def kms_bilinear(u, v, rho: float) -> float:
    """``u' Delta^{-1} v``."""
    return float(kms_whiten(u, rho) @ kms_whiten(v, rho))


def _validate_series(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size == 0:
        raise ValueError("series must be a non-empty 1-d array")
    return y


def gaussian_loglik(resid_quad: float, T: int, sigma2: float, logdet: float = 0.0) -> float:
    """Log density of a zero-mean Gaussian with covariance ``sigma2 * Delta`` given ``r' Delta^{-1} r``."""
    return -0.5 * T * (LOG_2PI + math.log(sigma2)) - 0.5 * logdet - 0.5 * resid_quad / sigma2


def loglik_iid(y, params: ChirpParams, sigma2: float) -> float:
    y = _validate_series(y)
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    resid = y - mean_vector(params, y.size)
    return gaussian_loglik(float(resid @ resid), y.size, sigma2)


def loglik_dep(y, params: ChirpParams, noise: NoiseModel) -> float:
    y = _validate_series(y)
    if noise.rho is None:
        raise ValueError("loglik_dep needs a NoiseModel with rho")
    quad, logdet = kms_quadform(y - mean_vector(params, y.size), noise.rho)
    return gaussian_loglik(quad, y.size, noise.sigma2, logdet)


def loglik(y, params: ChirpParams, noise: NoiseModel) -> float:
    """Dispatch on ``noise.rho``: i.i.d. errors when it is ``None``."""
    if noise.rho is None:
        return loglik_iid(y, params, noise.sigma2)
    return loglik_dep(y, params, noise)
