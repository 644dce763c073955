"""End-to-end analysis: series -> (VAR) -> bivariate QMLE -> residuals ->
extremograms with bands on raw and residual series -> QQ, ACF and
exceedance clock profile, all written as flat files plus a manifest."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from . import extremogram as ex
from . import fit, io, model, presets
from .errors import BivgarchError, EmptySeries, PipelineError

PIPELINE_DEFAULTS = {
    "command": "pipeline",
    "input": None,
    "columns": None,
    "time_column": None,
    "example": 11,
    "df": presets.EXAMPLE_DF,
    "n": 50_000,
    "burn_in": 1000,
    "seed": 0,
    "var_max_order": 0,
    "var_criterion": "schwarz",
    "grid": False,
    "quantile": 0.98,
    "lags": 40,
    "set_a": "upper",
    "set_b": "upper",
    "n_perm": 100,
    "band_q": 0.96,
    "qq_df": 4.0,
    "period": 96,
}


def innovation_df(value):
    """Config value for the innovation df: a number, or None / "gaussian"."""
    return None if value in (None, "gaussian") else float(value)


def derived_seeds(seed, names):
    """Independent integer seeds for named stages, derived from the master seed."""
    children = np.random.SeedSequence(seed).spawn(len(names))
    return {name: int(c.generate_state(1)[0]) for name, c in zip(names, children)}


def extremogram_config(cfg):
    return ex.ExtremogramConfig.from_quantile(cfg["quantile"], max_lag=cfg["lags"],
                                              set_a=ex.TailSet(cfg["set_a"]),
                                              set_b=ex.TailSet(cfg["set_b"]))


def band_exceedances(result):
    """Number of lags h >= 1 where rho exceeds the band, per panel."""
    return (result.rho[1:] > result.band[None]).sum(axis=0)


class _Stage:
    def __init__(self, name):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and isinstance(exc, (BivgarchError, ValueError, OSError, KeyError)) \
                and not isinstance(exc, PipelineError):
            raise PipelineError(self.name, exc) from exc
        return False


def obtain_series(cfg, seeds):
    if cfg["input"] is not None:
        s = io.load_series(cfg["input"], cfg["columns"], cfg["time_column"])
        return s.values, s.columns, s.timestamps
    params, innov = presets.example(cfg["example"], df=innovation_df(cfg["df"]))
    path = model.simulate_bivariate(params, innov, n=cfg["n"], burn_in=cfg["burn_in"],
                                    seed=seeds["simulate"])
    return path.x, ["x1", "x2"], None


def run_pipeline(config, out_dir):
    """Run the full analysis and write its artifacts to ``out_dir``.

    Returns a dict with the output paths, the fit result and the
    summary recorded in the manifest.  Errors are re-raised as
    PipelineError carrying the stage name.
    """
    cfg = {**PIPELINE_DEFAULTS, **(config or {})}
    cfg["command"] = "pipeline"
    out = Path(out_dir)
    seeds = derived_seeds(cfg["seed"], ["simulate", "fit", "bands_raw", "bands_resid"])
    outputs = []

    with _Stage("load"):
        x, columns, stamps = obtain_series(cfg, seeds)
        if x.shape[0] == 0:
            raise EmptySeries("no observations")
        if x.shape[1] != 2:
            raise ValueError(f"pipeline needs exactly two columns, got {x.shape[1]}")
    if cfg["input"] is None:
        outputs.append(io.write_series(out / "series.csv", x, columns))

    summary = {"n": int(x.shape[0]), "columns": columns}
    series = x
    if cfg["var_max_order"] > 0:
        with _Stage("var"):
            var = fit.fit_var(x, cfg["var_max_order"], cfg["var_criterion"])
            series = var.residuals
            summary["var_order"] = var.order
            summary["var_criterion_values"] = var.criterion_values
            outputs.append(io.write_series(out / "var_residuals.csv", series, columns))

    with _Stage("fit"):
        res = fit.fit_bivariate_qmle(series, seed=seeds["fit"], grid=cfg["grid"])
        summary["fit"] = res.to_dict()
        outputs.append(io.write_json(out / "fit_biv.json", res.to_dict()))
        outputs.append(io.write_series(out / "residuals.csv", res.residuals, [f"z{i + 1}" for i in range(2)]))
        outputs.append(io.write_series(out / "volatility.csv", res.sigma_filtered,
                                       [f"sigma{i + 1}" for i in range(2)]))

    ecfg = extremogram_config(cfg)
    for label, data, seed in (("raw", series, seeds["bands_raw"]), ("resid", res.residuals, seeds["bands_resid"])):
        with _Stage("extremogram"):
            result = ex.extremogram_with_bands(data, ecfg, n_perm=cfg["n_perm"],
                                               band_quantile=cfg["band_q"], seed=seed)
            outputs.append(io.write_extremogram(out / f"extremogram_{label}.csv", result))
            summary[f"extremogram_{label}"] = {"band": result.band,
                                               "band_exceedances": band_exceedances(result),
                                               "lag0": result.rho[0],
                                               "exceed_counts": result.exceed_counts}

    with _Stage("qq"):
        pairs = [fit.qq_points(res.residuals[:, i], cfg["qq_df"]) for i in range(2)]
        rows = zip(pairs[0][0], pairs[0][1], pairs[1][0], pairs[1][1])
        outputs.append(io.write_csv(out / "qq.csv", ["theoretical1", "empirical1", "theoretical2", "empirical2"],
                                    rows))

    with _Stage("acf"):
        for label, data in (("raw", series), ("resid", res.residuals)):
            acf = ex.sample_ccf(data, cfg["lags"])
            outputs.append(write_acf(out / f"acf_{label}.csv", acf))

    with _Stage("clock-profile"):
        counts = ex.exceedance_clock_profile(series, cfg["period"], cfg["quantile"])
        outputs.append(write_clock_profile(out / "clock_profile.csv", counts))

    with _Stage("write"):
        outputs.append(io.write_manifest(out, cfg, outputs, summary))
    return {"outputs": outputs, "fit": res, "summary": summary, "config": cfg}


def write_acf(path, acf):
    k = acf.shape[1]
    pairs = [(i, j) for i in range(k) for j in range(k)]
    header = ["lag"] + [f"acf{i + 1}{j + 1}" for i, j in pairs]
    rows = ([h] + [float(acf[h, i, j]) for i, j in pairs] for h in range(acf.shape[0]))
    return io.write_csv(path, header, rows)


def write_clock_profile(path, counts):
    header = ["slot"] + [f"count{i + 1}" for i in range(counts.shape[1])]
    return io.write_csv(path, header, ([s] + counts[s].tolist() for s in range(counts.shape[0])))
