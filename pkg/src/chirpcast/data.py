"""Synthetic series and plain-text file formats.

Series files hold one observation per line; row ``k`` (1-based) is time
``t = k``. Lines starting with ``#`` and blank lines are skipped, and a single
non-numeric header line is tolerated. For CSV rows the last column is taken.
All numbers are written with 17 significant digits so doubles round-trip.
"""
from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Optional

import numpy as np

from .model import ChirpParams, mean_vector

FLOAT_FMT = "%.17g"

# Simulation settings; sigma is the error standard deviation.
PRESETS = {
    "sample1": dict(A=2.0, B=1.25, alpha=1.75, beta=1.05, sigma=math.sqrt(0.5), T=101),
    "sample2": dict(A=1.5, B=1.5, alpha=1.0, beta=1.0, sigma=math.sqrt(0.5), T=101),
    "sample3": dict(A=2.0, B=2.0, alpha=1.75, beta=1.75, sigma=math.sqrt(2.0), T=101),
    "sample4": dict(A=2.0, B=2.0, alpha=1.75, beta=1.75, sigma=math.sqrt(2.0), T=20),
    "dependent": dict(A=2.93, B=1.91, alpha=2.5, beta=0.1, sigma=math.sqrt(0.5), rho=math.log(2.0), T=101),
}


def simulate(A: float, B: float, alpha: float, beta: float, sigma: float, T: int,
             rng: np.random.Generator, rho: Optional[float] = None) -> np.ndarray:
    """Draw ``y_1..y_T`` from the chirp model.

    With ``rho`` the errors are a stationary Gaussian AR(1) with coefficient
    ``exp(-rho)`` and marginal variance ``sigma**2``, which has correlation
    ``exp(-rho |i - j|)``.
    """
    if not (0 < alpha < math.pi and 0 < beta < math.pi):
        raise ValueError("alpha and beta must lie in (0, pi)")
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if rho is not None and not rho > 0:
        raise ValueError("rho must be positive")
    if T < 1:
        raise ValueError("T must be >= 1")
    mu = mean_vector(ChirpParams.from_amplitudes(A, B, alpha, beta), T)
    z = rng.standard_normal(T)
    if rho is None:
        return mu + sigma * z
    phi = math.exp(-rho)
    innov = math.sqrt(-math.expm1(-2.0 * rho))
    e = np.empty(T)
    e[0] = z[0]
    for t in range(1, T):
        e[t] = phi * e[t - 1] + innov * z[t]
    return mu + sigma * e


def read_series(path) -> np.ndarray:
    path = Path(path)
    values = []
    with path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            try:
                values.append(float(row[-1]))
            except ValueError:
                if values or lineno > 1:
                    raise ValueError(f"{path}:{lineno}: not a number: {row[-1]!r}") from None
    y = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError(f"{path}: series contains non-finite values")
    return y


def write_series(path, y) -> None:
    np.savetxt(path, np.asarray(y, dtype=float), fmt=FLOAT_FMT)


def write_table(path, columns: dict) -> None:
    """CSV with a header row; every column must have the same length."""
    names = list(columns)
    data = np.column_stack([np.asarray(columns[k], dtype=float) for k in names])
    np.savetxt(path, data, fmt=FLOAT_FMT, delimiter=",", header=",".join(names), comments="")


def read_table(path) -> dict:
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip()
    if not header:
        raise ValueError(f"{path}: empty file")
    names = header.split(",")
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as exc:
        raise ValueError(f"{path}: malformed table: {exc}") from None
    if data.shape[0] and data.shape[1] != len(names):
        raise ValueError(f"{path}: {data.shape[1]} columns but {len(names)} names")
    return {k: data[:, i] for i, k in enumerate(names)}
