"""
Fitting a simulated chirp
=========================

Simulate 101 points of a chirp with i.i.d. noise, fit the first 100 and
check the one-step forecast against the value that was held back.
"""

import math

import numpy as np

import chirpcast as cc

rng = np.random.default_rng(1)
s = cc.PRESETS["sample1"]
y = cc.simulate(s["A"], s["B"], s["alpha"], s["beta"], s["sigma"], 101, rng)
y_fit, y_next = y[:100], y[100]

# Priors. The von Mises mean directions matter more than they look: the
# likelihood cannot tell (alpha, beta) from (pi - alpha, pi - beta), so the
# prior is what selects one of the two.
priors = cc.PriorConfig(alpha0=1.81, beta0=1.0, sigma0=4.0, sigma1=3.0)

# proposal_sd="auto" picks random-walk scales from the curvature of the
# log posterior at the starting point. A single wide scale would leave beta
# stuck, since its posterior sd is around 1e-4.
config = cc.ChainConfig(n_iter=20_000, burn_in=2_000, proposal_sd="auto", seed=3)
chain = cc.run_chain(y_fit, priors, config, mode="iid")

print(cc.format_table(cc.posterior_table(chain.draws), chain.acceptance))

truth = {"A": s["A"], "B": s["B"], "alpha": s["alpha"], "beta": s["beta"], "sigma2": s["sigma"] ** 2}
for name, value in truth.items():
    lo, hi = cc.credible_interval(chain.draws[name], 0.95)
    print(f"{name:>6}: truth {value:.5g} in ({lo:.5g}, {hi:.5g})? {lo <= value <= hi}")

###############################################################################
# One-step posterior predictive for y_101.

fc = cc.multistep_forecast(chain, y_fit, cc.ForecastConfig(horizon=1), rng=np.random.default_rng(4))
print(f"y_101 = {y_next:.4f}, 95% predictive interval ({fc.lower[0]:.4f}, {fc.upper[0]:.4f})")
print(f"noise sd for reference: {math.sqrt(0.5):.4f}")
