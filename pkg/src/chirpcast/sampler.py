"""Metropolis-within-Gibbs sampler for the single chirp model.

One sweep updates, in order,

    r       exact draw from its truncated normal full conditional on (0, M)
    theta   random-walk Metropolis, proposals wrapped modulo 2 pi
    alpha   random-walk Metropolis, proposals outside (0, pi) rejected
    beta    random-walk Metropolis, proposals outside (0, pi) rejected
    sigma2  exact draw from its inverse gamma full conditional
    rho     random-walk Metropolis, proposals <= 0 rejected (dependent mode only)

Priors: r ~ U(0, M), theta ~ U(0, 2 pi), alpha ~ vonMises(alpha0, alpha1) and
beta ~ vonMises(beta0, beta1) restricted to (0, pi), sigma2 ~ InvGamma(sigma0,
sigma1) and rho ~ Gamma(rho0, rho1) with rate rho1.
"""
from __future__ import annotations

import copy
import logging
import math
from dataclasses import dataclass, field, fields
from typing import Callable, Mapping, Optional, Union

import numpy as np

from .annealing import anneal_init, initial_frequencies  # noqa: F401  (re-exported)
from .distributions import (
    GammaParams,
    InvGammaParams,
    TruncNormalParams,
    VonMisesParams,
    gamma_logpdf,
    invgamma_logpdf,
    invgamma_sample,
    truncnormal_sample,
    vonmises_logpdf,
)
from .likelihood import NoiseModel, gaussian_loglik, kms_logdet, kms_solve, kms_whiten
from .model import TWO_PI, ChirpParams

log = logging.getLogger(__name__)

RW_PARAMS = ("theta", "alpha", "beta", "rho")
PARAM_NAMES = ("r", "theta", "alpha", "beta", "sigma2", "rho")
DEFAULT_PROPOSAL_SD = math.sqrt(0.5)

ProposalSpec = Union[float, str, Mapping[str, float]]


def normalize_mode(mode: str) -> str:
    if mode in ("iid", "i.i.d."):
        return "iid"
    if mode in ("dep", "dependent"):
        return "dependent"
    raise ValueError(f"unknown mode {mode!r}; expected 'iid' or 'dependent'")


@dataclass(frozen=True)
class PriorConfig:
    """Hyperparameters. Defaults: M = 100, von Mises scale 3, sigma0 = 4, prior mean of sigma2 = 1."""

    M: float = 100.0
    alpha0: float = math.pi / 2
    alpha1: float = 3.0
    beta0: float = math.pi / 2
    beta1: float = 3.0
    sigma0: float = 4.0
    sigma1: float = 3.0
    rho0: float = 2.0
    rho1: float = 2.0

    def __post_init__(self):
        if not self.M > 0:
            raise ValueError("M must be positive")
        if self.alpha1 < 0 or self.beta1 < 0:
            raise ValueError("von Mises scales must be non-negative")
        for name in ("sigma0", "sigma1", "rho0", "rho1"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @staticmethod
    def sigma1_for_mean(a: float, sigma0: float = 4.0) -> float:
        """``sigma1`` giving an inverse gamma prior mean ``a`` for sigma2."""
        if not sigma0 > 1:
            raise ValueError("prior mean is finite only for sigma0 > 1")
        return a * (sigma0 - 1.0)

    @property
    def alpha_prior(self) -> VonMisesParams:
        return VonMisesParams(self.alpha0, self.alpha1)

    @property
    def beta_prior(self) -> VonMisesParams:
        return VonMisesParams(self.beta0, self.beta1)

    @property
    def sigma2_prior(self) -> InvGammaParams:
        return InvGammaParams(self.sigma0, self.sigma1)

    @property
    def rho_prior(self) -> GammaParams:
        return GammaParams(self.rho0, self.rho1)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class ChainConfig:
    """MCMC settings.

    ``proposal_sd`` is the random-walk standard deviation: a float used for
    every random-walk parameter, a mapping from parameter name to float, or
    ``"auto"`` for :func:`suggest_proposal_sd` at the initial state. Names in
    ``fixed`` are never updated.
    """

    n_iter: int = 500_000
    burn_in: int = 50_000
    proposal_sd: ProposalSpec = DEFAULT_PROPOSAL_SD
    thin: int = 1
    seed: Optional[int] = None
    fixed: tuple = ()

    def __post_init__(self):
        if not 0 <= self.burn_in < self.n_iter:
            raise ValueError(f"need 0 <= burn_in < n_iter, got {self.burn_in}, {self.n_iter}")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if isinstance(self.proposal_sd, str):
            if self.proposal_sd != "auto":
                raise ValueError("proposal_sd string must be 'auto'")
        elif isinstance(self.proposal_sd, Mapping):
            if any(not v > 0 for v in self.proposal_sd.values()):
                raise ValueError("proposal_sd values must be positive")
        elif not self.proposal_sd > 0:
            raise ValueError("proposal_sd must be positive")
        unknown = set(self.fixed) - set(PARAM_NAMES)
        if unknown:
            raise ValueError(f"unknown fixed parameters {sorted(unknown)}")

    @property
    def n_keep(self) -> int:
        return (self.n_iter - self.burn_in) // self.thin


@dataclass
class ChainState:
    r: float
    theta: float
    alpha: float
    beta: float
    sigma2: float
    rho: Optional[float] = None
    accepted: dict = field(default_factory=lambda: dict.fromkeys(RW_PARAMS, 0))
    proposed: dict = field(default_factory=lambda: dict.fromkeys(RW_PARAMS, 0))

    @classmethod
    def from_params(cls, params: ChirpParams, noise: NoiseModel) -> "ChainState":
        return cls(params.r, params.theta, params.alpha, params.beta, noise.sigma2, noise.rho)

    @property
    def params(self) -> ChirpParams:
        return ChirpParams(self.r, self.theta, self.alpha, self.beta)

    @property
    def noise(self) -> NoiseModel:
        return NoiseModel(self.sigma2, self.rho)

    @property
    def dependent(self) -> bool:
        return self.rho is not None

    def copy(self) -> "ChainState":
        return copy.deepcopy(self)

    def check(self, M: float) -> None:
        """Raise ``ValueError`` if the state left the parameter space."""
        ok = (0.0 < self.r < M and 0.0 <= self.theta <= TWO_PI
              and 0.0 < self.alpha < math.pi and 0.0 < self.beta < math.pi
              and self.sigma2 > 0 and (self.rho is None or self.rho > 0))
        if not ok:
            raise ValueError(f"state outside parameter space: {self}")

    def acceptance_rates(self) -> dict:
        return {k: (self.accepted[k] / self.proposed[k] if self.proposed[k] else float("nan"))
                for k in RW_PARAMS if k != "rho" or self.dependent}


@dataclass
class ChainOutput:
    """Kept draws, one array per parameter, plus derived ``A`` and ``B``."""

    draws: dict
    acceptance: dict
    logpost: np.ndarray
    mode: str
    T: int
    config: Optional[ChainConfig] = None
    priors: Optional[PriorConfig] = None

    def __len__(self) -> int:
        return self.logpost.size

    @property
    def names(self) -> list:
        return list(self.draws)

    def as_array(self) -> np.ndarray:
        return np.column_stack([self.draws[k] for k in self.draws])

    def state(self, i: int) -> ChainState:
        d = self.draws
        rho = float(d["rho"][i]) if "rho" in d else None
        return ChainState(float(d["r"][i]), float(d["theta"][i]), float(d["alpha"][i]),
                          float(d["beta"][i]), float(d["sigma2"][i]), rho)


def rw_metropolis_step(x: float, logp: float, log_target: Callable, sd: float,
                       rng: np.random.Generator, *, lower: float = -math.inf,
                       upper: float = math.inf, period: Optional[float] = None):
    """One random-walk Metropolis step for a scalar.

    ``log_target(x)`` returns ``(log density, aux)``. With ``period`` the
    proposal is wrapped into ``[0, period)``; otherwise proposals outside
    ``(lower, upper)`` are rejected without evaluating the target.

    Returns ``(x, logp, aux, accepted)``; ``aux`` is ``None`` on rejection.
    """
    cand = x + sd * rng.standard_normal()
    if period is not None:
        cand %= period
    elif not lower < cand < upper:
        return x, logp, None, False
    lp, aux = log_target(cand)
    if math.isnan(lp):
        raise FloatingPointError(f"log target is NaN at {cand}")
    # log U ~ -Exp(1)
    if lp - logp > -rng.standard_exponential():
        return cand, lp, aux, True
    return x, logp, None, False


class ChirpPosterior:
    """Posterior of the chirp parameters given a series ``y`` (``y[0]`` is t = 1)."""

    def __init__(self, y, priors: PriorConfig, mode: str = "iid"):
        self.y = np.asarray(y, dtype=float)
        if self.y.ndim != 1:
            raise ValueError("series must be 1-d")
        self.T = self.y.size
        self.priors = priors
        self.mode = normalize_mode(mode)
        self.t = np.arange(1, self.T + 1, dtype=float)
        self.t2 = self.t * self.t

    @property
    def dependent(self) -> bool:
        return self.mode == "dependent"

    def basis(self, theta: float, alpha: float, beta: float) -> np.ndarray:
        return np.cos(alpha * self.t + beta * self.t2 - theta)

    # weighted inner products: identity weight or Delta^{-1}
    def _inner(self, u, v, rho):
        if rho is None:
            return float(u @ v)
        return float(u @ kms_solve(v, rho))

    def _quad(self, v, rho):
        if rho is None:
            return float(v @ v)
        w = kms_whiten(v, rho)
        return float(w @ w)

    def _loglik(self, quad, sigma2, rho):
        logdet = 0.0 if rho is None else kms_logdet(self.T, rho)
        return gaussian_loglik(quad, self.T, sigma2, logdet)

    def loglik(self, state: ChainState) -> float:
        resid = self.y - state.r * self.basis(state.theta, state.alpha, state.beta)
        return self._loglik(self._quad(resid, state.rho), state.sigma2, state.rho)

    def log_prior(self, state: ChainState) -> float:
        p = self.priors
        if not (0.0 < state.r < p.M and 0.0 <= state.theta <= TWO_PI
                and 0.0 < state.alpha < math.pi and 0.0 < state.beta < math.pi):
            return -math.inf
        lp = (-math.log(p.M) - math.log(TWO_PI)
              + vonmises_logpdf(state.alpha, p.alpha_prior)
              + vonmises_logpdf(state.beta, p.beta_prior)
              + invgamma_logpdf(state.sigma2, p.sigma2_prior))
        if self.dependent:
            lp += gamma_logpdf(state.rho, p.rho_prior)
        return lp

    def log_posterior(self, state: ChainState) -> float:
        """Unnormalized log posterior (normalized priors times likelihood)."""
        lp = self.log_prior(state)
        return lp + self.loglik(state) if lp > -math.inf else lp

    def r_conditional(self, state: ChainState, b: Optional[np.ndarray] = None) -> TruncNormalParams:
        if b is None:
            b = self.basis(state.theta, state.alpha, state.beta)
        rho = state.rho if self.dependent else None
        bb = self._inner(b, b, rho)
        if bb < 1e-300:
            raise ZeroDivisionError("basis vector b_T is identically zero; r is not identified")
        yb = self._inner(self.y, b, rho)
        return TruncNormalParams(yb / bb, math.sqrt(state.sigma2 / bb), 0.0, self.priors.M)

    def sigma2_conditional(self, state: ChainState, resid: Optional[np.ndarray] = None) -> InvGammaParams:
        if resid is None:
            resid = self.y - state.r * self.basis(state.theta, state.alpha, state.beta)
        rho = state.rho if self.dependent else None
        quad = self._quad(resid, rho) if self.T else 0.0
        return InvGammaParams(self.priors.sigma0 + 0.5 * self.T, self.priors.sigma1 + 0.5 * quad)

    def _log_angle_prior(self, name: str, value: float) -> float:
        if name == "alpha":
            return vonmises_logpdf(value, self.priors.alpha_prior, normalized=False)
        if name == "beta":
            return vonmises_logpdf(value, self.priors.beta_prior, normalized=False)
        return 0.0  # theta: uniform

    def rwmh_update(self, name: str, state: ChainState, sd: float, rng: np.random.Generator,
                    resid: Optional[np.ndarray] = None):
        """Random-walk Metropolis update of ``name`` in place.

        Returns ``(accepted, resid)`` with ``resid`` the residual at the new state.
        """
        if resid is None:
            resid = self.y - state.r * self.basis(state.theta, state.alpha, state.beta)
        rho = state.rho if self.dependent else None
        state.proposed[name] += 1

        if name == "rho":
            def target(x):
                return self._loglik(self._quad(resid, x), state.sigma2, x) + gamma_logpdf(x, self.priors.rho_prior), None

            cur = target(state.rho)[0]
            x, _, _, acc = rw_metropolis_step(state.rho, cur, target, sd, rng, lower=0.0)
            state.rho = x
        else:
            def target(x):
                kw = {"theta": state.theta, "alpha": state.alpha, "beta": state.beta, name: x}
                res = self.y - state.r * self.basis(**kw)
                ll = self._loglik(self._quad(res, rho), state.sigma2, rho)
                return ll + self._log_angle_prior(name, x), res

            cur = self._loglik(self._quad(resid, rho), state.sigma2, rho) + self._log_angle_prior(name, getattr(state, name))
            bounds = {"period": TWO_PI} if name == "theta" else {"lower": 0.0, "upper": math.pi}
            x, _, res, acc = rw_metropolis_step(getattr(state, name), cur, target, sd, rng, **bounds)
            setattr(state, name, x)
            if acc:
                resid = res
        state.accepted[name] += acc
        return acc, resid

    def sweep(self, state: ChainState, proposal_sd: Mapping[str, float], rng: np.random.Generator,
              fixed=()) -> ChainState:
        """One Gibbs sweep over (r, theta, alpha, beta, sigma2[, rho]), in place."""
        if "r" not in fixed:
            b = self.basis(state.theta, state.alpha, state.beta)
            state.r = truncnormal_sample(self.r_conditional(state, b), rng)
            resid = self.y - state.r * b
        else:
            resid = None
        for name in ("theta", "alpha", "beta"):
            if name not in fixed:
                _, resid = self.rwmh_update(name, state, proposal_sd[name], rng, resid)
        if "sigma2" not in fixed:
            state.sigma2 = invgamma_sample(self.sigma2_conditional(state, resid), rng)
        if self.dependent and "rho" not in fixed:
            self.rwmh_update("rho", state, proposal_sd["rho"], rng, resid)
        return state


def suggest_proposal_sd(y, state: ChainState, priors: PriorConfig, mode: str = "iid",
                        scale: float = 2.4) -> dict:
    """Random-walk scales from the expected curvature of the log posterior at ``state``.

    Each random-walk parameter gets ``scale / sqrt(I_pp)`` with ``I_pp`` the
    Fisher information of that parameter with the others held fixed, plus the
    prior's curvature. This is the single-site analogue of the usual 2.4
    scaling and needs no pilot run.
    """
    post = ChirpPosterior(y, priors, mode)
    rho = state.rho if post.dependent else None
    s = state.r * np.sin(post.t * state.alpha + post.t2 * state.beta - state.theta)
    grads = {"theta": s, "alpha": -post.t * s, "beta": -post.t2 * s}
    out = {}
    for name, g in grads.items():
        info = post._quad(g, rho) / state.sigma2
        if name == "alpha":
            info += priors.alpha1
        elif name == "beta":
            info += priors.beta1
        out[name] = scale / math.sqrt(max(info, 1e-12))
    phi2 = math.exp(-2.0 * (state.rho if state.rho is not None else 1.0))
    info_rho = post.T * phi2 / (1.0 - phi2) + max(priors.rho0 - 1.0, 0.0) / (state.rho or 1.0) ** 2
    out["rho"] = min(scale / math.sqrt(max(info_rho, 1e-12)), 1.0)
    return out


def resolve_proposal_sd(setting: ProposalSpec, y, state: ChainState, priors: PriorConfig, mode: str) -> dict:
    if isinstance(setting, str):
        return suggest_proposal_sd(y, state, priors, mode)
    if isinstance(setting, Mapping):
        out = dict.fromkeys(RW_PARAMS, DEFAULT_PROPOSAL_SD)
        out.update(setting)
        return out
    return dict.fromkeys(RW_PARAMS, float(setting))


def default_init(y, priors: PriorConfig, mode: str = "iid", rng: Optional[np.random.Generator] = None,
                 *, n_anneal: int = 50, coarse: bool = True, use_prior: bool = True) -> ChainState:
    """Starting state.

    ``alpha`` and ``beta`` come from :func:`initial_frequencies`, which uses
    the von Mises priors to pick between aliased maxima unless ``use_prior``
    is false; ``r`` is the
    root-mean-square of ``y`` times sqrt(2) clipped into (0, M); ``theta`` is
    pi; ``sigma2`` and ``rho`` are their prior means.
    """
    y = np.asarray(y, dtype=float)
    rng = np.random.default_rng() if rng is None else rng
    mode = normalize_mode(mode)
    alpha, beta = initial_frequencies(y, rng, n_steps=n_anneal, coarse=coarse,
                                      alpha_prior=priors.alpha_prior if use_prior else None,
                                      beta_prior=priors.beta_prior if use_prior else None)
    r = float(np.sqrt(2.0 * np.mean(y * y)))
    r = min(max(r, 1e-6 * priors.M), (1.0 - 1e-9) * priors.M)
    sigma2 = priors.sigma2_prior.mean
    if not math.isfinite(sigma2):
        sigma2 = priors.sigma1 / (priors.sigma0 + 1.0)  # mode
    rho = priors.rho_prior.mean if mode == "dependent" else None
    return ChainState(r, math.pi, alpha, beta, sigma2, rho)


def r_conditional(y, state: ChainState, priors: PriorConfig) -> TruncNormalParams:
    """Truncated normal full conditional of ``r``; uses Delta^{-1} weighting when ``state.rho`` is set."""
    return ChirpPosterior(y, priors, "dependent" if state.dependent else "iid").r_conditional(state)


def sigma2_conditional(y, state: ChainState, priors: PriorConfig) -> InvGammaParams:
    return ChirpPosterior(y, priors, "dependent" if state.dependent else "iid").sigma2_conditional(state)


def rwmh_update(param_id: str, state: ChainState, y, priors: PriorConfig, proposal_sd: float,
                rng: np.random.Generator):
    """Returns ``(new_state, accepted)``; the input state is not modified."""
    if param_id not in RW_PARAMS:
        raise ValueError(f"{param_id!r} is not updated by random-walk Metropolis")
    new = state.copy()
    post = ChirpPosterior(y, priors, "dependent" if state.dependent else "iid")
    acc, _ = post.rwmh_update(param_id, new, proposal_sd, rng)
    return new, acc


def gibbs_sweep(state: ChainState, y, priors: PriorConfig, config: ChainConfig,
                rng: np.random.Generator) -> ChainState:
    """One full sweep from a copy of ``state``; the mode follows ``state.rho``."""
    mode = "dependent" if state.dependent else "iid"
    new = state.copy()
    sd = resolve_proposal_sd(config.proposal_sd, y, new, priors, mode)
    return ChirpPosterior(y, priors, mode).sweep(new, sd, rng, config.fixed)


def run_chain(y, priors: PriorConfig, config: ChainConfig, mode: str = "iid",
              init: Optional[Union[ChainState, tuple]] = None, *, progress: bool = False) -> ChainOutput:
    """Run the sampler and keep every ``thin``-th sweep after ``burn_in``.

    ``init`` is a :class:`ChainState`, a ``(ChirpParams, NoiseModel)`` pair or
    ``None`` for :func:`default_init`. The whole run, initialization
    included, is a deterministic function of ``config.seed``.
    """
    mode = normalize_mode(mode)
    post = ChirpPosterior(y, priors, mode)
    if post.T < 1:
        raise ValueError("empty series")
    rng = np.random.default_rng(config.seed)
    if init is None:
        state = default_init(post.y, priors, mode, rng)
    elif isinstance(init, ChainState):
        state = init.copy()
    else:
        state = ChainState.from_params(*init)
    if mode == "dependent" and state.rho is None:
        state.rho = priors.rho_prior.mean
    elif mode == "iid":
        state.rho = None
    state.check(priors.M)
    sd = resolve_proposal_sd(config.proposal_sd, post.y, state, priors, mode)
    log.debug("proposal sd: %s", sd)

    names = ["r", "theta", "alpha", "beta", "sigma2"] + (["rho"] if mode == "dependent" else [])
    n_keep = config.n_keep
    out = {k: np.empty(n_keep) for k in names}
    logpost = np.empty(n_keep)
    j = 0
    for i in range(config.n_iter):
        post.sweep(state, sd, rng, config.fixed)
        if i >= config.burn_in and (i - config.burn_in + 1) % config.thin == 0:
            lp = post.log_posterior(state)
            if not math.isfinite(lp):
                raise FloatingPointError(f"log posterior is {lp} at sweep {i}: {state}")
            for k in names:
                out[k][j] = getattr(state, k)
            logpost[j] = lp
            j += 1
        if progress and (i + 1) % max(config.n_iter // 20, 1) == 0:
            log.info("sweep %d/%d", i + 1, config.n_iter)

    out["A"] = out["r"] * np.cos(out["theta"])
    out["B"] = out["r"] * np.sin(out["theta"])
    acceptance = state.acceptance_rates()
    for k in config.fixed:
        acceptance.pop(k, None)
    low = [k for k, v in acceptance.items() if v < 0.01]
    if low:
        log.warning("acceptance below 1%% for %s; consider proposal_sd='auto'", ", ".join(low))
    return ChainOutput(out, acceptance, logpost, mode, post.T, config, priors)
