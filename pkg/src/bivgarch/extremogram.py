"""Sample (cross-) extremograms, permutation bands and empirical diagnostics.

For components i (conditioning, set A) and j (target, set B) and lag h,

    rho_ij(h) = #{t <= n-h : X_{j,t+h} in q_j B, X_{i,t} in q_i A} / #{t <= n : X_{i,t} in q_i A}

with q_i the empirical (1 - 1/m)-quantile of component i (for upper sets)
or the magnitude of its empirical 1/m-quantile (for lower sets).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import FewExceedancesWarning, ZeroDenominator, ZeroVariance

UPPER = "upper"
LOWER = "lower"


@dataclass(frozen=True)
class TailSet:
    """(c, inf) for kind "upper", (-inf, -c) for kind "lower"."""

    kind: str = UPPER
    c: float = 1.0

    def __post_init__(self):
        if self.kind not in (UPPER, LOWER):
            raise ValueError(f"unknown tail set kind {self.kind!r}")
        if not self.c > 0:
            raise ValueError("tail set must be bounded away from zero (c > 0)")

    def indicator(self, x, scale):
        if self.kind == UPPER:
            return x > self.c * scale
        return x < -self.c * scale


@dataclass(frozen=True)
class ExtremogramConfig:
    m: float = 50.0
    max_lag: int = 40
    set_a: TailSet = field(default_factory=TailSet)
    set_b: TailSet = field(default_factory=TailSet)

    def __post_init__(self):
        if not self.m > 1:
            raise ValueError("m must exceed 1")
        if self.max_lag < 1:
            raise ValueError("max_lag must be at least 1")

    @classmethod
    def from_quantile(cls, q, max_lag=40, set_a=None, set_b=None):
        """Configuration whose threshold level 1 - 1/m equals ``q``."""
        if not 0 < q < 1:
            raise ValueError("quantile level must lie in (0, 1)")
        return cls(1.0 / (1.0 - q), max_lag, set_a or TailSet(), set_b or TailSet())

    @property
    def level(self):
        return 1.0 - 1.0 / self.m


@dataclass
class ExtremogramResult:
    """``rho[h, i, j]``: extremal dependence of component j at lag h on component i."""

    lags: np.ndarray
    rho: np.ndarray
    thresholds: np.ndarray
    exceed_counts: np.ndarray
    numerators: np.ndarray
    band: np.ndarray | None = None
    band_meta: dict | None = None

    def panel(self, i, j):
        return self.rho[:, i, j]


def order_statistic(x, level):
    """Empirical quantile: the order statistic of rank ceil(level * n), no interpolation."""
    n = x.shape[0]
    rank = min(max(math.ceil(level * n - 1e-9), 1), n)
    return np.partition(x, rank - 1, axis=0)[rank - 1]


def tail_scales(x, cfg, tail):
    """Per-component threshold scale for a tail set kind."""
    if tail.kind == UPPER:
        return np.atleast_1d(order_statistic(x, cfg.level))
    return np.abs(np.atleast_1d(order_statistic(x, 1.0 / cfg.m)))


def _as_2d(x):
    x = np.asarray(x, dtype=float)
    return x[:, None] if x.ndim == 1 else x


def extremogram_counts(ind_a, ind_b, max_lag):
    """Joint exceedance counts num[h, i, j] = sum_t ind_a[t, i] * ind_b[t + h, j]."""
    n, k = ind_a.shape
    # float products go through BLAS and are exact for counts below 2**53
    a = ind_a.astype(np.float64)
    b = ind_b.astype(np.float64)
    num = np.empty((max_lag + 1, k, k))
    for h in range(max_lag + 1):
        num[h] = a[: n - h].T @ b[h:]
    return num.astype(np.int64)


def sample_extremogram(x, cfg, thresholds=None, min_exceedances=20):
    """Sample extremogram and cross-extremogram of an (n, k) series.

    ``thresholds`` optionally overrides the empirical scales: a (k,) array
    used for both sets, or a pair (scales_a, scales_b).
    """
    x = _as_2d(x)
    n, k = x.shape
    if n <= cfg.max_lag:
        raise ValueError(f"series length {n} must exceed max_lag {cfg.max_lag}")
    if thresholds is None:
        qa = tail_scales(x, cfg, cfg.set_a)
        qb = qa if cfg.set_b.kind == cfg.set_a.kind else tail_scales(x, cfg, cfg.set_b)
    elif isinstance(thresholds, tuple):
        qa, qb = (np.broadcast_to(np.asarray(t, dtype=float), (k,)) for t in thresholds)
    else:
        qa = qb = np.broadcast_to(np.asarray(thresholds, dtype=float), (k,))
    ind_a = cfg.set_a.indicator(x, qa)
    ind_b = cfg.set_b.indicator(x, qb)
    den = ind_a.sum(axis=0)
    if np.any(den == 0):
        raise ZeroDenominator(f"no exceedances in component(s) {np.flatnonzero(den == 0).tolist()}")
    if np.any(den < min_exceedances):
        warnings.warn(f"few exceedances per component: {den.tolist()}", FewExceedancesWarning,
                      stacklevel=2)
    num = extremogram_counts(ind_a, ind_b, cfg.max_lag)
    rho = num / den[None, :, None]
    return ExtremogramResult(lags=np.arange(cfg.max_lag + 1), rho=rho,
                             thresholds=np.vstack([qa, qb]), exceed_counts=den, numerators=num)


def permutation_bands(x, cfg, n_perm=100, band_quantile=0.96, seed=0, return_samples=False):
    """Horizontal band level per panel from random row permutations.

    Rows are permuted jointly, so contemporaneous cross dependence survives
    and only serial dependence is destroyed.  The ``band_quantile`` empirical
    quantile (inverted-CDF order statistic) of the permuted values is taken
    at each lag h = 1..max_lag and the maximum over lags gives the level.
    """
    if n_perm < 2:
        raise ValueError("n_perm must be at least 2")
    if not 0 < band_quantile < 1:
        raise ValueError("band_quantile must lie in (0, 1)")
    x = _as_2d(x)
    base = sample_extremogram(x, cfg)
    ind_a = cfg.set_a.indicator(x, base.thresholds[0])
    ind_b = cfg.set_b.indicator(x, base.thresholds[1])
    den = base.exceed_counts
    # permuting rows leaves thresholds and denominators unchanged
    seqs = np.random.SeedSequence(seed).spawn(n_perm)
    samples = np.empty((n_perm,) + base.rho.shape)
    for p, ss in enumerate(seqs):
        perm = np.random.default_rng(ss).permutation(x.shape[0])
        samples[p] = extremogram_counts(ind_a[perm], ind_b[perm], cfg.max_lag) / den[None, :, None]
    per_lag = np.quantile(samples[:, 1:], band_quantile, axis=0, method="inverted_cdf")
    band = per_lag.max(axis=0)
    if return_samples:
        return band, samples
    return band


def extremogram_with_bands(x, cfg, n_perm=100, band_quantile=0.96, seed=0):
    res = sample_extremogram(x, cfg)
    res.band = permutation_bands(x, cfg, n_perm, band_quantile, seed)
    res.band_meta = {"n_perm": n_perm, "band_quantile": band_quantile, "seed": seed}
    return res


def quantile_transform(x, target_df):
    """Componentwise rank transform to Student-t(target_df) marginals.

    X_{i,t} -> G^{-1}(rank_t / (n + 1)) with average ranks for ties.
    """
    if not target_df > 0:
        raise ValueError("target_df must be positive")
    x = np.asarray(x, dtype=float)
    ranks = stats.rankdata(x, method="average", axis=0)
    return stats.t.ppf(ranks / (x.shape[0] + 1), target_df)


def sample_ccf(x, max_lag):
    """acf[h, i, j] = sample correlation of X_{i,t} and X_{j,t+h}, h = 0..max_lag.

    Full-sample means and standard deviations, sums divided by n.
    """
    x = _as_2d(x)
    n, k = x.shape
    if n <= max_lag:
        raise ValueError(f"series length {n} must exceed max_lag {max_lag}")
    xc = x - x.mean(axis=0)
    sd = np.sqrt((xc ** 2).mean(axis=0))
    if np.any(sd == 0):
        raise ZeroVariance(f"component(s) {np.flatnonzero(sd == 0).tolist()} have zero variance")
    out = np.empty((max_lag + 1, k, k))
    for h in range(max_lag + 1):
        out[h] = xc[: n - h].T @ xc[h:] / n
    return out / np.outer(sd, sd)[None]


def exceedance_clock_profile(x, period, q):
    """counts[s, i] = #{t = s mod period : X_{i,t} > empirical q-quantile of component i}."""
    if period < 1:
        raise ValueError("period must be at least 1")
    if not 0 < q < 1:
        raise ValueError("q must lie in (0, 1)")
    x = _as_2d(x)
    n, k = x.shape
    above = x > np.atleast_1d(order_statistic(x, q))
    slots = np.arange(n) % period
    counts = np.zeros((period, k), dtype=np.int64)
    for i in range(k):
        counts[:, i] = np.bincount(slots[above[:, i]], minlength=period)
    return counts
