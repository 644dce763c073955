"""Command-line entry point.

Every subcommand resolves its options as defaults < ``--config`` JSON <
explicit flags, writes its outputs to ``--out`` and records the resolved
options in ``manifest.json``.  Passing that manifest back with ``--config``
reproduces the run.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import extremogram as ex
from . import fit, io, model, pipeline, presets, tails
from .errors import BivgarchError

COMMON = {"seed": 0, "quantile": 0.98, "lags": 40, "n_perm": 100, "band_q": 0.96}
INPUT = {"input": None, "columns": None, "time_column": None}
EXAMPLE = {"example": 1, "df": presets.EXAMPLE_DF}

DEFAULTS = {
    "simulate": {**COMMON, **EXAMPLE, "n": 50_000, "burn_in": 1000, "rho": None},
    "extremogram": {**COMMON, **INPUT, "set_a": "upper", "set_b": "upper"},
    "bands": {**COMMON, **INPUT, "set_a": "upper", "set_b": "upper"},
    "fit-uni": {**COMMON, **INPUT, "dist": "normal"},
    "fit-biv": {**COMMON, **INPUT, "grid": False},
    "var": {**COMMON, **INPUT, "max_order": 20, "criterion": "schwarz"},
    "tail-index": {**COMMON, **EXAMPLE, "a1": None, "b1": None, "n_mc": 1_000_000, "n_len": 100,
                   "replicates": 10_000, "method": "resampled"},
    "lyapunov": {**COMMON, **EXAMPLE, "n": 10_000, "replicates": 10},
    "pipeline": dict(pipeline.PIPELINE_DEFAULTS),
    "qq": {**COMMON, **INPUT, "qq_df": 4.0},
    "acf": {**COMMON, **INPUT, "transform": "none"},
    "clock-profile": {**COMMON, **INPUT, "period": 96},
}


def _df_arg(text):
    # kept as a string so an explicit Gaussian choice survives option merging
    return "gaussian" if text.lower() in ("none", "gaussian", "inf") else float(text)


def _columns_arg(text):
    return [c.strip() for c in text.split(",") if c.strip()]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int)
    common.add_argument("--config", type=Path, help="JSON options file or a previous run manifest")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--quantile", type=float, help="threshold level (default 0.98)")
    common.add_argument("--lags", type=int, help="maximum lag (default 40)")
    common.add_argument("--n-perm", dest="n_perm", type=int, help="permutations for bands (default 100)")
    common.add_argument("--band-q", dest="band_q", type=float, help="band quantile (default 0.96)")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--input", help="CSV file with a header row")
    data.add_argument("--columns", type=_columns_arg, help="comma-separated column names")
    data.add_argument("--time-column", dest="time_column")

    example = argparse.ArgumentParser(add_help=False)
    example.add_argument("--example", type=int, choices=presets.example_numbers())
    example.add_argument("--df", type=_df_arg, help="innovation t degrees of freedom, or 'none' for Gaussian")

    sets = argparse.ArgumentParser(add_help=False)
    sets.add_argument("--set-a", dest="set_a", choices=["upper", "lower"])
    sets.add_argument("--set-b", dest="set_b", choices=["upper", "lower"])

    p = argparse.ArgumentParser(prog="bivgarch", description="Bivariate GARCH extremal dependence tools")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common, example], help="simulate an example model")
    s.add_argument("--n", type=int)
    s.add_argument("--burn-in", dest="burn_in", type=int)
    s.add_argument("--rho", type=float)

    sub.add_parser("extremogram", parents=[common, data, sets], help="sample (cross-)extremograms")
    sub.add_parser("bands", parents=[common, data, sets], help="extremograms with permutation bands")

    s = sub.add_parser("fit-uni", parents=[common, data], help="componentwise univariate fits")
    s.add_argument("--dist", choices=["normal", "t"])

    s = sub.add_parser("fit-biv", parents=[common, data], help="bivariate CCC QMLE")
    s.add_argument("--grid", action="store_true", default=None, help="extra start from a 0.1 grid")

    s = sub.add_parser("var", parents=[common, data], help="VAR order selection and residuals")
    s.add_argument("--max-order", dest="max_order", type=int)
    s.add_argument("--criterion", choices=["schwarz", "fpe"])

    s = sub.add_parser("tail-index", parents=[common, example], help="Kesten tail index")
    s.add_argument("--a1", type=float, help="univariate ARCH coefficient (with --b1)")
    s.add_argument("--b1", type=float)
    s.add_argument("--n-mc", dest="n_mc", type=int)
    s.add_argument("--n-len", dest="n_len", type=int)
    s.add_argument("--replicates", type=int)
    s.add_argument("--method", choices=["resampled", "direct"])

    s = sub.add_parser("lyapunov", parents=[common, example], help="top Lyapunov exponent")
    s.add_argument("--n", type=int)
    s.add_argument("--replicates", type=int)

    s = sub.add_parser("pipeline", parents=[common, data, example, sets], help="full analysis pipeline")
    s.add_argument("--n", type=int)
    s.add_argument("--burn-in", dest="burn_in", type=int)
    s.add_argument("--var-max-order", dest="var_max_order", type=int, help="0 skips the VAR stage")
    s.add_argument("--var-criterion", dest="var_criterion", choices=["schwarz", "fpe"])
    s.add_argument("--grid", action="store_true", default=None)
    s.add_argument("--qq-df", dest="qq_df", type=float)
    s.add_argument("--period", type=int)

    s = sub.add_parser("qq", parents=[common, data], help="QQ points against a standardized t")
    s.add_argument("--qq-df", dest="qq_df", type=float)

    s = sub.add_parser("acf", parents=[common, data], help="sample auto/cross-correlations")
    s.add_argument("--transform", choices=["none", "abs", "square"])

    s = sub.add_parser("clock-profile", parents=[common, data], help="exceedances by time-of-period slot")
    s.add_argument("--period", type=int)
    return p


def resolve(args):
    defaults = DEFAULTS[args.command]
    cfg = dict(defaults)
    if args.config is not None:
        file_cfg = io.read_config(args.config)
        cfg.update({k: v for k, v in file_cfg.items() if k in defaults})
    cfg.update({k: v for k, v in vars(args).items() if k in defaults and v is not None})
    cfg["command"] = args.command
    return cfg


def _load(cfg):
    if cfg["input"] is None:
        raise ValueError("--input is required")
    return io.load_series(cfg["input"], cfg["columns"], cfg["time_column"])


def _names(series, prefix):
    return [f"{prefix}_{c}" for c in series.columns]


def cmd_simulate(cfg, out):
    params, innov = presets.example(cfg["example"], df=pipeline.innovation_df(cfg["df"]))
    if cfg["rho"] is not None:
        innov = model.InnovationSpec.from_df(innov.df, cfg["rho"])
    path = model.simulate_bivariate(params, innov, n=cfg["n"], burn_in=cfg["burn_in"], seed=cfg["seed"])
    files = [io.write_series(out / "series.csv", path.x, ["x1", "x2"]),
             io.write_series(out / "volatility.csv", path.sigma, ["sigma1", "sigma2"])]
    summary = {"params": params, "innovations": innov, "stationary": path.stationary,
               "spectral_radius": model.spectral_radius(params)}
    return files, summary


def _extremogram(cfg, out, with_bands):
    s = _load(cfg)
    ecfg = pipeline.extremogram_config(cfg)
    if with_bands:
        res = ex.extremogram_with_bands(s.values, ecfg, cfg["n_perm"], cfg["band_q"], cfg["seed"])
        name = "bands.csv"
    else:
        res = ex.sample_extremogram(s.values, ecfg)
        name = "extremogram.csv"
    summary = {"thresholds": res.thresholds, "exceed_counts": res.exceed_counts}
    if with_bands:
        summary["band"] = res.band
        summary["band_exceedances"] = pipeline.band_exceedances(res)
    return [io.write_extremogram(out / name, res)], summary


def cmd_fit_uni(cfg, out):
    s = _load(cfg)
    fitter = fit.fit_univariate_t_mle if cfg["dist"] == "t" else fit.fit_univariate_qmle
    results = [fitter(s.values[:, i], seed=cfg["seed"]) for i in range(s.values.shape[1])]
    resid = np.hstack([r.residuals for r in results])
    summary = {c: r.to_dict() for c, r in zip(s.columns, results)}
    files = [io.write_json(out / "fit_uni.json", summary),
             io.write_series(out / "residuals.csv", resid, _names(s, "z"), s.timestamps)]
    return files, summary


def cmd_fit_biv(cfg, out):
    s = _load(cfg)
    res = fit.fit_bivariate_qmle(s.values, seed=cfg["seed"], grid=cfg["grid"])
    files = [io.write_json(out / "fit_biv.json", res.to_dict()),
             io.write_series(out / "residuals.csv", res.residuals, _names(s, "z"), s.timestamps),
             io.write_series(out / "volatility.csv", res.sigma_filtered, _names(s, "sigma"), s.timestamps)]
    return files, res.to_dict()


def cmd_var(cfg, out):
    s = _load(cfg)
    v = fit.fit_var(s.values, cfg["max_order"], cfg["criterion"])
    stamps = s.timestamps[v.order:] if s.timestamps is not None else None
    summary = {"order": v.order, "criterion": v.criterion, "criterion_values": v.criterion_values,
               "intercept": v.intercept, "coefficients": v.coefficients}
    files = [io.write_json(out / "var.json", summary),
             io.write_series(out / "var_residuals.csv", v.residuals, _names(s, "e"), stamps)]
    return files, summary


def cmd_tail_index(cfg, out):
    if cfg["a1"] is not None:
        params = model.UnivariateGarchParams(1.0, cfg["a1"], cfg["b1"] or 0.0)
        df = pipeline.innovation_df(cfg["df"])
        r = tails.tail_index_univariate(params, df, n_mc=cfg["n_mc"], seed=cfg["seed"])
        summary = {"univariate": {"alpha": r.alpha, "mc_se": r.mc_se, "bracket": r.bracket}}
    else:
        params, innov = presets.example(cfg["example"], df=pipeline.innovation_df(cfg["df"]))
        r = tails.tail_index_bivariate(params, innov, n_len=cfg["n_len"], replicates=cfg["replicates"],
                                       seed=cfg["seed"], method=cfg["method"])
        summary = {"bivariate": {"alpha": r.alpha, "mc_se": r.mc_se, "bias_drift": r.bias_drift,
                                 "bias_warning": r.bias_warning, "method": r.method}}
    summary["moment_curve"] = r.moment_curve
    files = [io.write_csv(out / "moment_curve.csv", ["s", "log_moment"], r.moment_curve),
             io.write_json(out / "tail_index.json", summary)]
    return files, summary


def cmd_lyapunov(cfg, out):
    params, innov = presets.example(cfg["example"], df=pipeline.innovation_df(cfg["df"]))
    rep = model.stationarity_report(params, innov, n=cfg["n"], replicates=cfg["replicates"], seed=cfg["seed"])
    summary = {"spectral_radius": rep.spectral_radius, "sufficient_condition_met": rep.sufficient_condition_met,
               "lyapunov": rep.lyapunov_estimate, "lyapunov_se": rep.lyapunov_se}
    return [io.write_json(out / "lyapunov.json", summary)], summary


def cmd_qq(cfg, out):
    s = _load(cfg)
    pairs = [fit.qq_points(s.values[:, i], cfg["qq_df"]) for i in range(s.values.shape[1])]
    header = [f"{kind}_{c}" for c in s.columns for kind in ("theoretical", "empirical")]
    cols = [arr for pair in pairs for arr in pair]
    return [io.write_csv(out / "qq.csv", header, zip(*cols))], {"n": s.n}


def cmd_acf(cfg, out):
    s = _load(cfg)
    x = {"none": s.values, "abs": np.abs(s.values), "square": s.values ** 2}[cfg["transform"]]
    acf = ex.sample_ccf(x, cfg["lags"])
    return [pipeline.write_acf(out / "acf.csv", acf)], {"n": s.n}


def cmd_clock_profile(cfg, out):
    s = _load(cfg)
    counts = ex.exceedance_clock_profile(s.values, cfg["period"], cfg["quantile"])
    return [pipeline.write_clock_profile(out / "clock_profile.csv", counts)], {"totals": counts.sum(axis=0)}


COMMANDS = {
    "simulate": cmd_simulate,
    "extremogram": lambda cfg, out: _extremogram(cfg, out, False),
    "bands": lambda cfg, out: _extremogram(cfg, out, True),
    "fit-uni": cmd_fit_uni,
    "fit-biv": cmd_fit_biv,
    "var": cmd_var,
    "tail-index": cmd_tail_index,
    "lyapunov": cmd_lyapunov,
    "qq": cmd_qq,
    "acf": cmd_acf,
    "clock-profile": cmd_clock_profile,
}


def run(cfg, out):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    if cfg["command"] == "pipeline":
        return pipeline.run_pipeline(cfg, out)["outputs"]
    files, summary = COMMANDS[cfg["command"]](cfg, out)
    files.append(io.write_manifest(out, cfg, files, summary))
    return files


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
        files = run(cfg, args.out)
    except (BivgarchError, FileNotFoundError, KeyError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    for f in files:
        print(f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
