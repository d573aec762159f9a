"""Posterior predictive forecasting.

For each kept posterior draw the future values are sampled from their
conditional distribution given the parameters and the data. With i.i.d.
errors that is ``N(mu_{T+j}, sigma2)`` for every horizon. With dependent
errors ``y_{T+1} | y`` is normal with

    mean = mu_{T+1} + c' (sigma2 Delta_T)^{-1} (y - mu_T)
    var  = sigma2 - c' (sigma2 Delta_T)^{-1} c,     c = sigma2 (phi^T, ..., phi)'

and later horizons append each simulated value to the conditioning set. The
parameters of a draw are reused across horizons; no refit happens on the
augmented series.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .likelihood import NoiseModel, kms_solve
from .model import ChirpParams, chirp_mean, mean_vector
from .sampler import ChainOutput, normalize_mode

QUANTILE_METHOD = "hazen"


@dataclass(frozen=True)
class ForecastConfig:
    horizon: int = 1
    level: float = 0.95
    bins: int = 50
    # Reserved: re-run the sampler on each augmented series. Not implemented.
    refit: bool = False

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if not 0.0 < self.level < 1.0:
            raise ValueError("level must be in (0, 1)")
        if self.bins < 1:
            raise ValueError("bins must be >= 1")
        if self.refit:
            raise NotImplementedError("refitting on augmented data is not implemented")


@dataclass
class ForecastResult:
    """Predictive draws for horizons 1..k (column j is horizon j + 1)."""

    draws: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    mean: np.ndarray
    median: np.ndarray
    level: float
    T: int

    @property
    def horizon(self) -> int:
        return self.draws.shape[1]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.T + 1, self.T + self.horizon + 1)


def credible_interval(draws, level: float = 0.95) -> tuple[float, float]:
    """Equal-tailed interval.

    Quantiles interpolate linearly between order statistics placed at
    plotting positions ``(k - 0.5) / n`` (numpy's ``"hazen"`` method), so the
    90% interval of 1, ..., 100 is exactly (5.5, 95.5).
    """
    draws = np.asarray(draws, dtype=float)
    if draws.size == 0:
        raise ValueError("no draws")
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    lo, hi = np.quantile(draws, [(1 - level) / 2, (1 + level) / 2], method=QUANTILE_METHOD)
    return float(lo), float(hi)


def density_histogram(draws, bins: int = 50) -> tuple[np.ndarray, np.ndarray]:
    """Bin edges and a density normalized to integrate to one."""
    draws = np.asarray(draws, dtype=float)
    if draws.size == 0:
        raise ValueError("no draws")
    density, edges = np.histogram(draws, bins=bins, density=True)
    if not np.all(np.isfinite(density)):
        # constant draws: a single unit-width bin around the value
        v = float(draws[0])
        edges = np.array([v - 0.5, v + 0.5])
        density = np.array([1.0])
    return edges, density


def predictive_draw_iid(params: ChirpParams, sigma2: float, T: int, rng: np.random.Generator) -> float:
    """One draw of ``y_{T+1}`` given the parameters (i.i.d. errors)."""
    return chirp_mean(params, T + 1) + math.sqrt(sigma2) * rng.standard_normal()


def predictive_moments_dep(params: ChirpParams, noise: NoiseModel, y) -> tuple[float, float]:
    """Conditional mean and variance of ``y_{T+1}`` given ``y_1..y_T`` under dependent errors."""
    if noise.rho is None:
        raise ValueError("predictive_moments_dep needs a NoiseModel with rho")
    y = np.asarray(y, dtype=float)
    T = y.size
    mu_next = chirp_mean(params, T + 1)
    if T == 0:
        return mu_next, noise.sigma2
    # c / sigma2; the sigma2 factors cancel in c' (sigma2 Delta)^{-1}
    c = np.exp(-noise.rho * np.arange(T, 0, -1, dtype=float))
    w = kms_solve(c, noise.rho)
    mean = mu_next + float(w @ (y - mean_vector(params, T)))
    var = noise.sigma2 * (1.0 - float(w @ c))
    return mean, var


def _draw_arrays(chain: ChainOutput):
    d = chain.draws
    return d["r"], d["theta"], d["alpha"], d["beta"], d["sigma2"], d.get("rho")


def _mu(r, theta, alpha, beta, t):
    """Mean at time(s) ``t`` for every draw; ``t`` broadcasts against the draw axis."""
    t = np.asarray(t, dtype=float)
    return r * np.cos(alpha * t + beta * t * t - theta)


def multistep_forecast(chain: ChainOutput, y, config: ForecastConfig = ForecastConfig(),
                       mode: Optional[str] = None, rng: Optional[np.random.Generator] = None) -> ForecastResult:
    """Sample ``y_{T+1}, ..., y_{T+k}`` once per kept posterior draw.

    In dependent mode the conditioning set grows by one simulated value per
    horizon. Because the inverse correlation matrix is tridiagonal, the
    conditioning weight vector ``Delta^{-1} c`` is ``(0, ..., 0, phi)``, so
    each step only needs the previous residual:
    ``mean = mu_{T+j} + phi * (y_{T+j-1} - mu_{T+j-1})`` and
    ``var = sigma2 * (1 - phi^2)``.
    """
    y = np.asarray(y, dtype=float)
    T = y.size
    mode = normalize_mode(mode or chain.mode)
    if len(chain) == 0:
        raise ValueError("chain output holds no draws")
    rng = np.random.default_rng() if rng is None else rng
    r, theta, alpha, beta, sigma2, rho = _draw_arrays(chain)
    sd = np.sqrt(sigma2)
    k = config.horizon
    out = np.empty((len(chain), k))
    if mode == "iid":
        for j in range(k):
            out[:, j] = _mu(r, theta, alpha, beta, T + j + 1) + sd * rng.standard_normal(len(chain))
    else:
        if rho is None:
            raise ValueError("dependent forecasting needs rho draws")
        if T == 0:
            raise ValueError("dependent forecasting needs at least one observation")
        phi = np.exp(-rho)
        innov_sd = sd * np.sqrt(-np.expm1(-2.0 * rho))
        resid = y[-1] - _mu(r, theta, alpha, beta, T)
        for j in range(k):
            mu = _mu(r, theta, alpha, beta, T + j + 1)
            resid = phi * resid + innov_sd * rng.standard_normal(len(chain))
            out[:, j] = mu + resid
    return summarize_draws(out, config.level, T)


def summarize_draws(draws: np.ndarray, level: float, T: int) -> ForecastResult:
    draws = np.atleast_2d(np.asarray(draws, dtype=float))
    bounds = np.array([credible_interval(draws[:, j], level) for j in range(draws.shape[1])])
    return ForecastResult(draws, bounds[:, 0], bounds[:, 1], draws.mean(axis=0),
                          np.median(draws, axis=0), level, T)


def signal_band(chain: ChainOutput, T: int, level: float = 0.95, chunk: int = 4096) -> dict:
    """Pointwise equal-tailed band and posterior mean of ``mu_t`` for t = 1..T."""
    r, theta, alpha, beta, *_ = _draw_arrays(chain)
    q = [(1 - level) / 2, (1 + level) / 2]
    t = np.arange(1, T + 1, dtype=float)
    lower, upper, mean = np.empty(T), np.empty(T), np.empty(T)
    for s in range(0, T, chunk):
        tt = t[s:s + chunk]
        mu = _mu(r[:, None], theta[:, None], alpha[:, None], beta[:, None], tt[None, :])
        lo, hi = np.quantile(mu, q, axis=0, method=QUANTILE_METHOD)
        lower[s:s + chunk], upper[s:s + chunk] = lo, hi
        mean[s:s + chunk] = mu.mean(axis=0)
    return {"t": t.astype(int), "lower": lower, "upper": upper, "mean": mean}
