"""Bayesian inference and forecasting for single chirp signals."""
from .data import PRESETS, read_series, simulate, write_series
from .diagnostics import effective_sample_size, format_table, posterior_table
from .distributions import (
    GammaParams,
    InvGammaParams,
    TruncNormalParams,
    VonMisesParams,
    gamma_logpdf,
    invgamma_logpdf,
    invgamma_sample,
    truncnormal_sample,
    uniform_logpdf,
    vonmises_logpdf,
)
from .forecast import (
    ForecastConfig,
    ForecastResult,
    credible_interval,
    density_histogram,
    multistep_forecast,
    predictive_draw_iid,
    predictive_moments_dep,
    signal_band,
)
from .likelihood import CorrelationStructure, NoiseModel, kms_quadform, loglik, loglik_dep, loglik_iid
from .model import AmplitudePair, ChirpParams, amp_to_polar, chirp_mean, mean_vector, polar_to_amp
from .sampler import (
    ChainConfig,
    ChainOutput,
    ChainState,
    ChirpPosterior,
    PriorConfig,
    anneal_init,
    default_init,
    gibbs_sweep,
    r_conditional,
    run_chain,
    rwmh_update,
    sigma2_conditional,
    suggest_proposal_sd,
)

__version__ = "0.1.0"
