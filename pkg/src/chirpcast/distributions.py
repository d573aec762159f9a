"""Log densities and samplers used by the chirp posterior.

All log densities return ``-inf`` outside their support. Samplers take a
``numpy.random.Generator`` and are deterministic given its state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

LOG_2PI = math.log(2.0 * math.pi)

# Below this interval mass the inverse-CDF route loses all precision.
_MIN_INVCDF_MASS = 1e-12


@dataclass(frozen=True)
class VonMisesParams:
    mu: float
    kappa: float

    def __post_init__(self):
        if not self.kappa >= 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")


@dataclass(frozen=True)
class InvGammaParams:
    """Inverse gamma with density proportional to ``x**(-shape-1) * exp(-scale/x)``.

    The mean is ``scale / (shape - 1)`` for ``shape > 1``.
    """

    shape: float
    scale: float

    def __post_init__(self):
        if not (self.shape > 0 and self.scale > 0):
            raise ValueError(f"inverse gamma needs shape, scale > 0, got {self}")

    @property
    def mean(self) -> float:
        return self.scale / (self.shape - 1.0) if self.shape > 1 else math.inf

    @property
    def var(self) -> float:
        if self.shape <= 2:
            return math.inf
        return self.scale**2 / ((self.shape - 1.0) ** 2 * (self.shape - 2.0))


@dataclass(frozen=True)
class GammaParams:
    """Gamma in shape-rate form: mean ``shape / rate``, variance ``shape / rate**2``."""

    shape: float
    rate: float

    def __post_init__(self):
        if not (self.shape > 0 and self.rate > 0):
            raise ValueError(f"gamma needs shape, rate > 0, got {self}")

    @property
    def mean(self) -> float:
        return self.shape / self.rate

    @property
    def var(self) -> float:
        return self.shape / self.rate**2


@dataclass(frozen=True)
class TruncNormalParams:
    mean: float
    sd: float
    lower: float
    upper: float

    def __post_init__(self):
        if not self.sd > 0:
            raise ValueError(f"sd must be positive, got {self.sd}")
        if not self.lower < self.upper:
            raise ValueError(f"need lower < upper, got ({self.lower}, {self.upper})")


def log_bessel_i0(kappa):
    """``log I_0(kappa)``, stable for large ``kappa``."""
    kappa = np.asarray(kappa, dtype=float)
    return np.log(special.i0e(kappa)) + np.abs(kappa)


def vonmises_logpdf(x, p: VonMisesParams, normalized: bool = True):
    """von Mises log density on the circle.

    With ``normalized=False`` the ``log(2 pi I_0(kappa))`` term is dropped; that
    is all a Metropolis ratio at fixed ``kappa`` needs.
    """
    out = p.kappa * np.cos(np.asarray(x, dtype=float) - p.mu)
    if normalized:
        out = out - (LOG_2PI + log_bessel_i0(p.kappa))
    return out if np.ndim(out) else float(out)


def invgamma_logpdf(x, p: InvGammaParams):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (p.shape * math.log(p.scale) - special.gammaln(p.shape)
               - (p.shape + 1.0) * np.log(x) - p.scale / x)
    out = np.where(x > 0, out, -np.inf)
    return out if out.ndim else float(out)


def invgamma_sample(p: InvGammaParams, rng: np.random.Generator, size=None):
    return p.scale / rng.gamma(p.shape, 1.0, size=size)


def gamma_logpdf(x, p: GammaParams):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (p.shape * math.log(p.rate) - special.gammaln(p.shape)
               + (p.shape - 1.0) * np.log(x) - p.rate * x)
    out = np.where(x > 0, out, -np.inf)
    return out if out.ndim else float(out)


def uniform_logpdf(x, lo: float, hi: float):
    x = np.asarray(x, dtype=float)
    out = np.where((x > lo) & (x < hi), -math.log(hi - lo), -np.inf)
    return out if out.ndim else float(out)


def truncnormal_logpdf(x, p: TruncNormalParams):
    """Log density of N(mean, sd^2) restricted to (lower, upper)."""
    a = (p.lower - p.mean) / p.sd
    b = (p.upper - p.mean) / p.sd
    z = (np.asarray(x, dtype=float) - p.mean) / p.sd
    out = -0.5 * z * z - 0.5 * LOG_2PI - math.log(p.sd) - _log_mass(a, b)
    out = np.where((z > a) & (z < b), out, -np.inf)
    return out if out.ndim else float(out)


def _log_mass(a: float, b: float) -> float:
    """``log(Phi(b) - Phi(a))`` without cancellation in either tail."""
    if a > 0:
        a, b = -b, -a
    # now a <= 0, mass is dominated by Phi(b)
    lb, la = special.log_ndtr(b), special.log_ndtr(a)
    return float(lb + np.log1p(-np.exp(la - lb)))


def truncnormal_sample(p: TruncNormalParams, rng: np.random.Generator) -> float:
    """One draw from N(mean, sd^2) restricted to the open interval (lower, upper).

    Uses the inverse CDF when the interval carries at least 1e-12 of the normal
    mass and an exponential-proposal tail rejection sampler otherwise.
    """
    a = (p.lower - p.mean) / p.sd
    b = (p.upper - p.mean) / p.sd
    flip = a > 0
    if flip:
        # work in the lower tail where Phi keeps its relative precision
        a, b = -b, -a
    pa, pb = special.ndtr(a), special.ndtr(b)
    mass = pb - pa
    if mass >= _MIN_INVCDF_MASS:
        z = float(special.ndtri(pa + rng.random() * mass))
    elif b < 0:
        z = -_tail_sample(-b, -a, rng)
    else:
        # straddles zero yet carries no mass: the interval is vanishingly narrow
        z = a + (b - a) * rng.random()
    z = min(max(z, np.nextafter(a, math.inf)), np.nextafter(b, -math.inf))
    if flip:
        z = -z
    return p.mean + p.sd * z


def _tail_sample(a: float, b: float, rng: np.random.Generator) -> float:
    """Standard normal restricted to (a, b) with ``a > 0`` far in the tail."""
    lam = 0.5 * (a + math.sqrt(a * a + 4.0))
    if lam * (b - a) < 1.0:
        # narrow window: uniform proposal, acceptance stays above exp(-1)
        while True:
            z = a + (b - a) * rng.random()
            if rng.random() <= math.exp(-0.5 * (z - a) * (z + a)):
                return z
    while True:
        z = a + rng.exponential(1.0 / lam)
        if z < b and rng.random() <= math.exp(-0.5 * (z - lam) ** 2):
            return z
