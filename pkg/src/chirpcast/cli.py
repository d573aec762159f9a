"""Command line driver: ``chirpcast {simulate,fit,forecast,summarize}``.

A fit writes into ``--out-dir``:

    manifest.json        resolved settings (input, mode, priors, chain, forecast)
    draws.csv            one column per parameter plus A, B and logpost
    summary.json         posterior table, acceptance rates, initial state
    hist/<param>.csv     density histogram per parameter

``forecast`` reads those back and adds ``forecast/`` and ``band.csv``.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import data
from .diagnostics import format_table, posterior_table
from .forecast import ForecastConfig, density_histogram, multistep_forecast, signal_band
from .sampler import (
    ChainConfig,
    ChainOutput,
    PriorConfig,
    default_init,
    normalize_mode,
    run_chain,
)

log = logging.getLogger("chirpcast")

PRIOR_KEYS = {f.name for f in fields(PriorConfig)}
CHAIN_KEYS = {f.name for f in fields(ChainConfig)} - {"fixed"}
FORECAST_KEYS = {"horizon", "level", "bins"}
OTHER_KEYS = {"mode", "holdout", "input", "prior_sigma_mean", "n_anneal"}


class CLIError(Exception):
    pass


@dataclass
class RunManifest:
    input: str
    mode: str = "iid"
    holdout: int = 0
    priors: dict = field(default_factory=dict)
    chain: dict = field(default_factory=dict)
    forecast: dict = field(default_factory=dict)
    n_anneal: int = 50
    out_dir: str = "."

    def prior_config(self) -> PriorConfig:
        return PriorConfig(**self.priors)

    def chain_config(self) -> ChainConfig:
        return ChainConfig(**self.chain)

    def forecast_config(self) -> ForecastConfig:
        return ForecastConfig(**self.forecast)


def load_config(path) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CLIError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise CLIError("config must be a JSON object")
    unknown = set(cfg) - PRIOR_KEYS - CHAIN_KEYS - FORECAST_KEYS - OTHER_KEYS
    if unknown:
        raise CLIError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return cfg


def build_manifest(args) -> RunManifest:
    cfg = load_config(args.config) if getattr(args, "config", None) else {}
    overrides = {
        "input": args.input, "mode": args.mode, "n_iter": args.iters, "burn_in": args.burnin,
        "thin": args.thin, "seed": args.seed, "holdout": args.holdout,
        "prior_sigma_mean": args.prior_sigma_mean, "proposal_sd": args.proposal_sd,
        "horizon": getattr(args, "horizon", None), "level": getattr(args, "level", None),
    }
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    if "input" not in cfg:
        raise CLIError("no input series (--input or 'input' in config)")
    # paper-scale defaults
    chain = {"n_iter": 500_000, "burn_in": 50_000, "seed": 0}
    chain.update({k: cfg[k] for k in CHAIN_KEYS if k in cfg})
    ps = chain.get("proposal_sd")
    if isinstance(ps, str) and ps != "auto":
        try:
            chain["proposal_sd"] = float(ps)
        except ValueError:
            raise CLIError(f"--proposal-sd must be a number or 'auto', got {ps!r}") from None
    priors = {k: cfg[k] for k in PRIOR_KEYS if k in cfg}
    if "prior_sigma_mean" in cfg:
        if "sigma1" in priors:
            raise CLIError("give either sigma1 or prior_sigma_mean, not both")
        priors["sigma1"] = PriorConfig.sigma1_for_mean(cfg["prior_sigma_mean"], priors.get("sigma0", 4.0))
    try:
        mode = normalize_mode(cfg.get("mode", "iid"))
    except ValueError as exc:
        raise CLIError(str(exc)) from None
    m = RunManifest(
        input=str(cfg["input"]), mode=mode, holdout=int(cfg.get("holdout", 0)),
        priors=priors, chain=chain, forecast={k: cfg[k] for k in FORECAST_KEYS if k in cfg},
        n_anneal=int(cfg.get("n_anneal", 50)), out_dir=str(args.out_dir),
    )
    try:
        m.chain_config()
        PriorConfig(**m.priors)
        m.forecast_config()
    except (TypeError, ValueError) as exc:
        raise CLIError(f"invalid configuration: {exc}") from None
    return m


def _load_input(path, holdout: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Full series and the part used for fitting."""
    p = Path(path)
    if not p.is_file():
        raise CLIError(f"input file not found: {p}")
    try:
        y = data.read_series(p)
    except (OSError, ValueError) as exc:
        raise CLIError(str(exc)) from None
    if holdout < 0:
        raise CLIError("holdout must be >= 0")
    n_fit = y.size - holdout
    if n_fit < 2:
        raise CLIError(f"need at least 2 observations to fit, have {n_fit}")
    return y, y[:n_fit]


def _dump_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n")


def cmd_simulate(args) -> int:
    params = dict(data.PRESETS[args.preset]) if args.preset else {}
    for k in ("A", "B", "alpha", "beta", "sigma", "rho", "T"):
        v = getattr(args, k)
        if v is not None:
            params[k] = v
    missing = {"A", "B", "alpha", "beta", "sigma", "T"} - set(params)
    if missing:
        raise CLIError(f"missing simulation parameters: {', '.join(sorted(missing))}")
    T = int(params.pop("T"))
    try:
        y = data.simulate(**params, T=T, rng=np.random.default_rng(args.seed))
    except ValueError as exc:
        raise CLIError(str(exc)) from None
    if args.output == "-":
        data.write_series(sys.stdout.buffer, y)
    else:
        data.write_series(args.output, y)
    return 0


def cmd_fit(args) -> int:
    m = build_manifest(args)
    _, y = _load_input(m.input, m.holdout)
    chain_cfg = m.chain_config()
    priors = dict(m.priors)
    init_rng = np.random.default_rng([chain_cfg.seed if chain_cfg.seed is not None else 0, 1])
    have_means = "alpha0" in priors and "beta0" in priors
    state = default_init(y, PriorConfig(**priors), m.mode, init_rng, n_anneal=m.n_anneal,
                         use_prior=have_means)
    if not have_means:
        # initial values double as prior mean directions
        priors.setdefault("alpha0", state.alpha)
        priors.setdefault("beta0", state.beta)
        m.priors = priors
    prior_cfg = PriorConfig(**priors)
    init = state.copy()
    try:
        out = run_chain(y, prior_cfg, chain_cfg, m.mode, init=state, progress=args.verbose)
    except (FloatingPointError, ZeroDivisionError, ValueError) as exc:
        raise CLIError(f"sampler failed: {exc}") from None

    out_dir = Path(m.out_dir)
    (out_dir / "hist").mkdir(parents=True, exist_ok=True)
    cols = dict(out.draws)
    cols["logpost"] = out.logpost
    data.write_table(out_dir / "draws.csv", cols)
    table = posterior_table(out.draws)
    _dump_json(out_dir / "manifest.json", asdict(m) | {"n_fit": int(y.size)})
    _dump_json(out_dir / "summary.json", {
        "T": int(y.size), "mode": m.mode, "n_draws": len(out),
        "acceptance": out.acceptance, "posterior": table,
        "init": {k: getattr(init, k) for k in ("r", "theta", "alpha", "beta", "sigma2", "rho")},
    })
    bins = m.forecast_config().bins
    for name, x in out.draws.items():
        edges, dens = density_histogram(x, bins)
        data.write_table(out_dir / "hist" / f"{name}.csv",
                         {"left": edges[:-1], "right": edges[1:], "density": dens})
    print(format_table(table, out.acceptance))
    return 0


def load_chain(out_dir: Path) -> tuple[ChainOutput, dict]:
    mpath = out_dir / "manifest.json"
    dpath = out_dir / "draws.csv"
    if not mpath.is_file() or not dpath.is_file():
        raise CLIError(f"{out_dir} holds no fit (manifest.json and draws.csv required)")
    manifest = json.loads(mpath.read_text())
    try:
        tbl = data.read_table(dpath)
    except (OSError, ValueError) as exc:
        raise CLIError(str(exc)) from None
    required = {"r", "theta", "alpha", "beta", "sigma2"} | ({"rho"} if manifest["mode"] == "dependent" else set())
    if not required <= set(tbl):
        raise CLIError(f"{dpath}: missing columns {sorted(required - set(tbl))}")
    logpost = tbl.pop("logpost", np.full(len(tbl["r"]), np.nan))
    acceptance = {}
    spath = out_dir / "summary.json"
    if spath.is_file():
        acceptance = json.loads(spath.read_text()).get("acceptance", {})
    return ChainOutput(tbl, acceptance, logpost, manifest["mode"], manifest["n_fit"]), manifest


def cmd_forecast(args) -> int:
    out_dir = Path(args.out_dir)
    chain, manifest = load_chain(out_dir)
    horizon = args.horizon if args.horizon is not None else manifest["forecast"].get("horizon", 1)
    level = args.level if args.level is not None else manifest["forecast"].get("level", 0.95)
    try:
        fc = ForecastConfig(horizon=horizon, level=level, bins=manifest["forecast"].get("bins", 50))
    except ValueError as exc:
        raise CLIError(str(exc)) from None
    y_all, _ = _load_input(args.input or manifest["input"], 0)
    T = manifest["n_fit"]
    if y_all.size < T:
        raise CLIError(f"input has {y_all.size} rows but the fit used {T}")
    y = y_all[:T]
    seed = args.seed if args.seed is not None else manifest["chain"].get("seed", 0)
    result = multistep_forecast(chain, y, fc, chain.mode, np.random.default_rng([seed, 2]))

    fdir = out_dir / "forecast"
    fdir.mkdir(exist_ok=True)
    observed = np.array([y_all[t - 1] if t <= y_all.size else np.nan for t in result.times])
    data.write_table(fdir / "intervals.csv", {
        "horizon": np.arange(1, fc.horizon + 1), "t": result.times, "observed": observed,
        "lower": result.lower, "upper": result.upper, "mean": result.mean, "median": result.median,
    })
    for j in range(fc.horizon):
        data.write_table(fdir / f"h{j + 1}_draws.csv", {"y": result.draws[:, j]})
        edges, dens = density_histogram(result.draws[:, j], fc.bins)
        data.write_table(fdir / f"h{j + 1}_density.csv", {"left": edges[:-1], "right": edges[1:], "density": dens})
    band = signal_band(chain, T, level)
    data.write_table(out_dir / "band.csv", {"t": band["t"], "observed": y, "lower": band["lower"],
                                             "upper": band["upper"], "mean": band["mean"]})
    pct = f"{100 * level:g}%"
    print(f"{'t':>5} {'observed':>12} {pct + ' lower':>12} {pct + ' upper':>12} {'median':>12}")
    for j in range(fc.horizon):
        print(f"{result.times[j]:5d} {observed[j]:12.6g} {result.lower[j]:12.6g} "
              f"{result.upper[j]:12.6g} {result.median[j]:12.6g}")
    return 0


def cmd_summarize(args) -> int:
    out_dir = Path(args.out_dir)
    if args.draws:
        try:
            tbl = data.read_table(args.draws)
        except (OSError, ValueError) as exc:
            raise CLIError(str(exc)) from None
        tbl.pop("logpost", None)
        acceptance = {}
    else:
        chain, _ = load_chain(out_dir)
        tbl, acceptance = chain.draws, chain.acceptance
    if not tbl or any(len(v) < 4 for v in tbl.values()):
        raise CLIError("draw file has fewer than 4 rows")
    if any(not np.all(np.isfinite(v)) for v in tbl.values()):
        raise CLIError("draw file contains non-finite values")
    table = posterior_table(tbl, args.level)
    for name, row in table.items():
        if np.isnan(row["ess"]):
            log.warning("%s is constant; effective sample size is degenerate", name)
    print(format_table(table, acceptance, args.level))
    return 0


def _add_fit_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", help="series file, one observation per row")
    p.add_argument("--mode", choices=["iid", "dep", "dependent"])
    p.add_argument("--config", help="JSON file of settings")
    p.add_argument("--iters", type=int, help="total sweeps (default 500000)")
    p.add_argument("--burnin", type=int, help="discarded sweeps (default 50000)")
    p.add_argument("--thin", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--holdout", type=int, help="drop this many trailing rows before fitting")
    p.add_argument("--prior-sigma-mean", type=float, help="set sigma1 so the sigma2 prior has this mean")
    p.add_argument("--proposal-sd", help="random-walk sd, or 'auto' (default sqrt(0.5))")
    p.add_argument("--out-dir", default="chirpcast-out")


def main(argv: Optional[list] = None) -> int:
    parser = argparse.ArgumentParser(prog="chirpcast", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic chirp series")
    p.add_argument("--preset", choices=sorted(data.PRESETS))
    for k in ("A", "B", "alpha", "beta"):
        p.add_argument(f"--{k}", type=float)
    p.add_argument("--sigma", type=float, help="error standard deviation")
    p.add_argument("--rho", type=float, help="decay rate for dependent errors")
    p.add_argument("--T", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="run the sampler on a series")
    _add_fit_args(p)
    p.add_argument("--horizon", type=int, help="default horizon recorded for forecast")
    p.add_argument("--level", type=float, help="default credible level recorded for forecast")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("forecast", help="posterior predictive draws from a fit")
    p.add_argument("--out-dir", default="chirpcast-out")
    p.add_argument("--input", help="series file (default: the one recorded by fit)")
    p.add_argument("--horizon", type=int)
    p.add_argument("--level", type=float)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("summarize", help="posterior table with effective sample sizes")
    p.add_argument("--out-dir", default="chirpcast-out")
    p.add_argument("--draws", help="draw file to summarize instead of a fit directory")
    p.add_argument("--level", type=float, default=0.95)
    p.set_defaults(func=cmd_summarize)

    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"chirpcast: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
