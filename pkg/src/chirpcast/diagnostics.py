"""Chain summaries: effective sample size and posterior tables."""
from __future__ import annotations

import math
import warnings

import numpy as np

from .forecast import credible_interval


def autocorrelation(x) -> np.ndarray:
    """Sample autocorrelation at all lags via FFT (biased autocovariance)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    xc = x - x.mean()
    m = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(xc, n=m)
    acov = np.fft.irfft(f * np.conj(f), n=m)[:n] / n
    return acov / acov[0]


def effective_sample_size(x) -> float:
    """Autocorrelation-based ESS using Geyer's initial monotone positive sequence.

    Returns ``nan`` (with a warning) for a constant chain.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 4:
        raise ValueError("need at least 4 draws")
    if np.ptp(x) == 0:
        warnings.warn("constant chain: effective sample size is undefined", RuntimeWarning, stacklevel=2)
        return math.nan
    rho = autocorrelation(x)
    # sums of adjacent pairs Gamma_k = rho_{2k} + rho_{2k+1}
    npairs = n // 2
    gam = rho[: 2 * npairs].reshape(npairs, 2).sum(axis=1)
    pos = np.flatnonzero(gam <= 0)
    m = pos[0] if pos.size else npairs
    gam = np.minimum.accumulate(gam[:m])
    tau = -1.0 + 2.0 * gam.sum()
    tau = max(tau, 1.0 / math.log10(n))
    return float(n / tau)


def posterior_table(draws: dict, level: float = 0.95) -> dict:
    """Per-parameter mean, sd, median, equal-tailed interval and ESS."""
    out = {}
    for name, x in draws.items():
        x = np.asarray(x, dtype=float)
        lo, hi = credible_interval(x, level)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            ess = effective_sample_size(x) if x.size >= 4 else math.nan
        out[name] = {
            "mean": float(x.mean()),
            "sd": float(x.std(ddof=1)) if x.size > 1 else 0.0,
            "median": float(np.median(x)),
            "lower": lo,
            "upper": hi,
            "ess": ess,
        }
    return out


def format_table(table: dict, acceptance: dict | None = None, level: float = 0.95) -> str:
    pct = f"{100 * level:g}%"
    lines = [f"{'param':>8} {'mean':>12} {'sd':>11} {'median':>12} {pct + ' lower':>12} {pct + ' upper':>12} {'ESS':>9}"]
    for name, s in table.items():
        ess = "degenerate" if math.isnan(s["ess"]) else f"{s['ess']:.0f}"
        lines.append(f"{name:>8} {s['mean']:12.6g} {s['sd']:11.4g} {s['median']:12.6g} "
                     f"{s['lower']:12.6g} {s['upper']:12.6g} {ess:>9}")
    if acceptance:
        lines.append("")
        lines.append("acceptance rates: " + ", ".join(f"{k}={v:.4f}" for k, v in acceptance.items()))
    return "\n".join(lines)
