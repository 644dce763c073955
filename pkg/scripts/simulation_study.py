"""Sample extremograms with permutation bands for simulated example paths.

Writes one extremogram CSV per example plus a summary of how many lags
rise above the band in each panel.

    python3 scripts/simulation_study.py --examples 1 5 11 --out results/simulation
"""
import argparse
import csv
from dataclasses import dataclass, field
from pathlib import Path

from bivgarch import extremogram_with_bands, presets, simulate_bivariate
from bivgarch.extremogram import ExtremogramConfig
from bivgarch.io import write_extremogram


@dataclass
class StudyConfig:
    examples: list = field(default_factory=presets.example_numbers)
    n: int = 50_000
    burn_in: int = 1000
    quantile: float = 0.98
    max_lag: int = 40
    n_perm: int = 100
    seed: int = 0


def run(cfg, out):
    out.mkdir(parents=True, exist_ok=True)
    ext = ExtremogramConfig.from_quantile(cfg.quantile, max_lag=cfg.max_lag)
    summary = []
    for number in cfg.examples:
        params, innov = presets.example(number)
        path = simulate_bivariate(params, innov, n=cfg.n, burn_in=cfg.burn_in, seed=[cfg.seed, number])
        res = extremogram_with_bands(path.x, ext, n_perm=cfg.n_perm, seed=cfg.seed)
        write_extremogram(out / f"example{number:02d}.csv", res)
        above = (res.rho[1:] > res.band[None]).sum(axis=0)
        summary.append({"example": number, "above11": above[0, 0], "above12": above[0, 1],
                        "above21": above[1, 0], "above22": above[1, 1],
                        "lag0_cross": res.rho[0, 0, 1], "band12": res.band[0, 1]})
        print(f"example {number:2d}: lags above band {above.tolist()}, "
              f"lag-0 cross {res.rho[0, 0, 1]:.3f} (band {res.band[0, 1]:.3f})", flush=True)
    with open(out / "summary.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(summary[0]))
        writer.writeheader()
        writer.writerows(summary)
    return summary


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/simulation"))
    ap.add_argument("--examples", type=int, nargs="*")
    ap.add_argument("--n", type=int, default=50_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    cfg = StudyConfig(n=args.n, seed=args.seed)
    if args.examples:
        cfg.examples = args.examples
    run(cfg, args.out)


if __name__ == "__main__":
    main()
