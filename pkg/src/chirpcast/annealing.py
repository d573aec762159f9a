"""Frequency and chirp-rate initialization.

Two pieces:

* ``anneal``/``anneal_init``: simulated annealing of the log-likelihood over
  one of ``alpha`` or ``beta`` with the other held fixed.
* ``coarse_search``: a dechirp-and-FFT grid search of the 2-d periodogram
  ``|sum_t y_t exp(-i(alpha t + beta t^2))|^2`` that puts the start inside the
  main likelihood lobe before annealing refines it.

The likelihood is profiled: for fixed ``(alpha, beta)`` the amplitudes are the
least-squares fit and the variance is ``RSS / T``.

Note that for integer ``t`` the signal is unchanged under
``(alpha, beta, theta) -> (pi - alpha, pi - beta, 2 pi - theta)``, so the
likelihood always has two equal global maxima in ``(0, pi)^2``. Only a prior
on ``alpha``/``beta`` can tell them apart.
"""
from __future__ import annotations

import math
from typing import Callable, NamedTuple, Optional

import numpy as np

from .distributions import VonMisesParams, vonmises_logpdf

LOG_2PI = math.log(2.0 * math.pi)


class AnnealResult(NamedTuple):
    x: float
    value: float
    history: np.ndarray  # best-so-far objective after each step, length n_steps + 1


def anneal(objective: Callable[[float], float], x0: float, n_steps: int, rng: np.random.Generator,
           *, lower: float = 0.0, upper: float = math.pi, step: float = 0.2,
           tau0: float = 1.0, cooling: Optional[float] = None) -> AnnealResult:
    """Maximize a scalar function on the open interval ``(lower, upper)``.

    Temperature follows ``tau_k = tau0 * cooling**k``. The default cooling
    factor is ``0.9 ** (50 / n_steps)``: 0.9 for a 50-step run, and longer
    runs stretch the same schedule instead of freezing early. Proposals are Gaussian
    with standard deviation ``step``; out-of-range proposals are redrawn. A
    proposal is accepted with probability ``min(1, exp(delta / tau_k))``. The
    best point visited is returned.
    """
    if cooling is None:
        cooling = 0.9 ** (50.0 / max(n_steps, 1))
    x, fx = x0, objective(x0)
    best, fbest = x, fx
    history = np.empty(n_steps + 1)
    history[0] = fbest
    for k in range(n_steps):
        tau = tau0 * cooling**k
        while True:
            cand = x + step * rng.standard_normal()
            if lower < cand < upper:
                break
        fc = objective(cand)
        # delta >= 0 always accepts; the exponential draw keeps the comparison in log space
        if fc - fx >= -tau * rng.standard_exponential():
            x, fx = cand, fc
            if fx > fbest:
                best, fbest = x, fx
        history[k + 1] = fbest
    return AnnealResult(best, fbest, history)


def profile_loglik(y, alpha: float, beta: float) -> float:
    """Log-likelihood maximized over the amplitudes and the (i.i.d.) error variance."""
    y = np.asarray(y, dtype=float)
    T = y.size
    t = np.arange(1, T + 1, dtype=float)
    ph = alpha * t + beta * t * t
    X = np.column_stack([np.cos(ph), np.sin(ph)])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    rss = max(float(resid @ resid), 1e-300 * T)
    return -0.5 * T * (LOG_2PI + math.log(rss / T) + 1.0)


def anneal_init(y, target: str, n_steps: int = 50, rng: Optional[np.random.Generator] = None, *,
                other: float = math.pi / 2, start: Optional[float] = None, step: float = 0.2,
                tau0: float = 1.0, cooling: Optional[float] = None) -> float:
    """Anneal the profile log-likelihood over ``alpha`` or ``beta``.

    Parameters
    ----------
    y : array_like
        Observed series, ``y[0]`` is time 1.
    target : {"alpha", "beta"}
        Which parameter to optimize.
    n_steps : int
        Annealing iterations.
    rng : numpy.random.Generator, optional
    other : float
        Value at which the non-target parameter is held.
    start : float, optional
        Starting point; drawn uniformly on (0, pi) when omitted.

    Returns
    -------
    float
        Best value found, in (0, pi).
    """
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise ValueError("empty series")
    rng = np.random.default_rng() if rng is None else rng
    if target == "alpha":
        objective = lambda a: profile_loglik(y, a, other)  # noqa: E731
    elif target == "beta":
        objective = lambda b: profile_loglik(y, other, b)  # noqa: E731
    else:
        raise ValueError(f"target must be 'alpha' or 'beta', got {target!r}")
    if start is None:
        start = rng.uniform(0.0, math.pi)
    return anneal(objective, start, n_steps, rng, step=step, tau0=tau0, cooling=cooling).x


def _grid_scores(y: np.ndarray, betas: np.ndarray, n_fft: int, batch: int = 2048) -> np.ndarray:
    T = y.size
    t = np.arange(1, T + 1, dtype=float)
    out = np.empty((betas.size, n_fft // 2 + 1))
    for i in range(0, betas.size, batch):
        b = betas[i:i + batch, None]
        z = y * np.exp(-1j * b * t * t)
        out[i:i + batch] = np.abs(np.fft.fft(z, n=n_fft, axis=1)[:, :n_fft // 2 + 1]) ** 2
    return out


def coarse_search(y, *, alpha_prior: Optional[VonMisesParams] = None,
                  beta_prior: Optional[VonMisesParams] = None, n_candidates: int = 25,
                  oversample: int = 8) -> tuple[float, float]:
    """Grid search of the chirp periodogram over ``(0, pi)^2``.

    The ``beta`` grid spacing is ``0.5 / T^2`` and ``alpha`` is resolved by an
    FFT zero-padded to ``oversample * T`` points. The best ``n_candidates``
    grid cells are rescored with the exact profile log-likelihood plus the
    (unnormalized) von Mises log priors, which is what separates the two
    aliased maxima.
    """
    y = np.asarray(y, dtype=float)
    T = y.size
    if T < 2:
        raise ValueError("need at least 2 observations")
    n_fft = 1 << max(6, int(math.ceil(math.log2(oversample * T))))
    betas = np.arange(0.5 / T**2, math.pi, 0.5 / T**2)
    scores = _grid_scores(y, betas, n_fft)
    scores[:, 0] = -np.inf  # alpha = 0
    scores[:, -1] = -np.inf  # alpha = pi
    flat = np.argpartition(scores.ravel(), -n_candidates)[-n_candidates:]
    bi, ai = np.unravel_index(flat, scores.shape)

    def score(a, b):
        s = profile_loglik(y, a, b)
        if alpha_prior is not None:
            s += vonmises_logpdf(a, alpha_prior, normalized=False)
        if beta_prior is not None:
            s += vonmises_logpdf(b, beta_prior, normalized=False)
        return s

    cands = [(2.0 * math.pi * k / n_fft, betas[j]) for j, k in zip(bi, ai)]
    # each cell and its alias both get rescored
    cands += [(math.pi - a, math.pi - b) for a, b in cands]
    a, b = max(cands, key=lambda ab: score(*ab))
    return float(a), float(b)


def initial_frequencies(y, rng: np.random.Generator, *, n_steps: int = 50,
                        alpha_prior: Optional[VonMisesParams] = None,
                        beta_prior: Optional[VonMisesParams] = None,
                        coarse: bool = True) -> tuple[float, float]:
    """Starting ``(alpha, beta)``: coarse grid search, then annealing of each separately.

    With ``coarse=False`` this is plain annealing from random starts with the
    default 0.2 step, ``alpha`` first with ``beta`` at pi/2. With the grid,
    the annealing steps shrink to the grid resolution so that annealing
    refines the grid point instead of leaving its lobe.
    """
    y = np.asarray(y, dtype=float)
    T = y.size
    if not coarse:
        alpha = anneal_init(y, "alpha", n_steps, rng)
        beta = anneal_init(y, "beta", n_steps, rng, other=alpha)
        return alpha, beta
    alpha, beta = coarse_search(y, alpha_prior=alpha_prior, beta_prior=beta_prior)
    alpha = anneal_init(y, "alpha", n_steps, rng, other=beta, start=alpha, step=1.0 / (4 * T))
    beta = anneal_init(y, "beta", n_steps, rng, other=alpha, start=beta, step=0.25 / T**2)
    return alpha, beta
