"""Single chirp mean function and amplitude parameterizations.

The signal is

    mu_t = A cos(alpha t + beta t^2) + B sin(alpha t + beta t^2),   t = 1, ..., T

with ``A = r cos(theta)`` and ``B = r sin(theta)``. Time is 1-indexed.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi


class AmplitudePair(NamedTuple):
    A: float
    B: float


@dataclass(frozen=True)
class ChirpParams:
    """Amplitude ``r``, phase ``theta``, frequency ``alpha`` and chirp rate ``beta``."""

    r: float
    theta: float
    alpha: float
    beta: float

    @property
    def A(self) -> float:
        return self.r * math.cos(self.theta)

    @property
    def B(self) -> float:
        return self.r * math.sin(self.theta)

    @classmethod
    def from_amplitudes(cls, A: float, B: float, alpha: float, beta: float) -> "ChirpParams":
        r, theta = amp_to_polar(A, B)
        return cls(r, theta, alpha, beta)

    def with_(self, **changes) -> "ChirpParams":
        return replace(self, **changes)

    def validate(self, M: float = math.inf) -> None:
        """Raise ``ValueError`` if the parameters leave the parameter space."""
        if not 0.0 <= self.r < M:
            raise ValueError(f"r={self.r} outside [0, {M})")
        if not 0.0 <= self.theta <= TWO_PI:
            raise ValueError(f"theta={self.theta} outside [0, 2pi]")
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not 0.0 < v < math.pi:
                raise ValueError(f"{name}={v} outside (0, pi)")


def wrap_angle(x):
    """Reduce an angle modulo 2pi into [0, 2pi)."""
    return x % TWO_PI


def polar_to_amp(r: float, theta: float) -> AmplitudePair:
    return AmplitudePair(r * math.cos(theta), r * math.sin(theta))


def amp_to_polar(A: float, B: float) -> tuple[float, float]:
    """Return ``(r, theta)`` with theta in [0, 2pi).

    ``(0, 0)`` has no defined phase; it maps to ``(0, 0)`` with a warning.
    """
    if A == 0.0 and B == 0.0:
        warnings.warn("amp_to_polar(0, 0) is degenerate; using theta=0", RuntimeWarning, stacklevel=2)
        return 0.0, 0.0
    return math.hypot(A, B), wrap_angle(math.atan2(B, A))


def phase(alpha: float, beta: float, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return alpha * t + beta * t * t


def chirp_mean(params: ChirpParams, t: int) -> float:
    return params.r * math.cos(params.alpha * t + params.beta * t * t - params.theta)


def basis_vector(theta: float, alpha: float, beta: float, T: int, start: int = 1) -> np.ndarray:
    """Unit-amplitude mean ``b_T`` for t = start, ..., start + T - 1, so that ``mu_T = r * b_T``."""
    return np.cos(phase(alpha, beta, np.arange(start, start + T)) - theta)


def mean_vector(params: ChirpParams, T: int, start: int = 1) -> np.ndarray:
    """``(mu_start, ..., mu_{start+T-1})`` for the given parameters."""
    if T < 0:
        raise ValueError("T must be non-negative")
    return params.r * basis_vector(params.theta, params.alpha, params.beta, T, start)
