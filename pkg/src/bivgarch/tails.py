"""Tail index of GARCH(1,1) volatilities via the Kesten moment equations,
and the model-implied extremogram of the volatility sequence.

Univariate: the tail index alpha solves E[(a1 Z^2 + b1)^(alpha/2)] = 1.
Bivariate: alpha/2 is the positive zero of
Lambda(s) = lim n^{-1} log E ||A_1 ... A_n||^s.
Both moment functions are convex in s and vanish at s = 0, so the root is
the unique positive sign change from negative to positive.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.special import logsumexp

from . import _kernels
from .errors import BiasWarning, MCDegenerate, NoRootInRange
from .model import as_seed_sequence, draw_innovations

S_LOW = 1e-3
S_HIGH = 10.0
S_LIMIT = 1e4


@dataclass
class TailIndexResult:
    alpha: float
    bracket: tuple
    moment_curve: list
    mc_se: float
    n_mc: int
    slope_at_root: float = float("nan")
    bias_drift: float | None = None
    bias_warning: bool = False
    method: str = "sample-moment"

    @property
    def s_root(self):
        return self.alpha / 2


@dataclass
class LagCurve:
    """Values at lags 1..max_lag with Monte-Carlo standard errors."""

    lags: np.ndarray
    values: np.ndarray
    se: np.ndarray = field(default=None)


def log_moment(log_a, s):
    """log of the sample mean of A^s, from log A (log-sum-exp, exact 0 at s = 0)."""
    return float(logsumexp(s * log_a) - np.log(log_a.shape[0]))


def _moment_cap(df):
    # E|Z|^(4s) must be finite for the moment estimate to have finite variance
    return np.inf if df is None else df / 4.0


def find_root(f, cap=np.inf, lo=S_LOW, hi=S_HIGH, xtol=1e-6):
    """Positive zero of a convex function with f(0) = 0 and f'(0) < 0.

    Expands the upper end geometrically until f changes sign (never reaching
    ``cap``), then bisects.  Returns (root, (lo, hi), slope).
    """
    ceiling = min(cap * (1 - 1e-9), S_LIMIT)
    lo = min(lo, ceiling / 2)
    hi = min(hi, ceiling)

    def checked(s):
        v = f(s)
        if not np.isfinite(v):
            raise MCDegenerate(f"moment function is not finite at s={s:.6g}")
        return v

    if checked(lo) >= 0:
        raise NoRootInRange(f"moment function is nonnegative at s={lo:g}; "
                            "the log-moment drift is not negative")
    fhi = checked(hi)
    while fhi < 0:
        if hi >= ceiling:
            raise NoRootInRange(f"no sign change of the moment function on (0, {hi:.6g}]")
        lo, hi = hi, min(2 * hi, ceiling)
        fhi = checked(hi)
    root = optimize.bisect(checked, lo, hi, xtol=xtol)
    d = max(10 * xtol, 0.02 * root)
    slope = (checked(min(root + d, hi)) - checked(max(root - d, lo))) / (min(root + d, hi) - max(root - d, lo))
    if not slope > 0:
        raise NoRootInRange(f"moment function is not increasing at the root s={root:.6g}")
    return root, (lo, hi), slope


def _curve(f, root, cap, points=16):
    top = min(1.5 * root, cap * (1 - 1e-9))
    return [(float(s), float(f(s))) for s in np.linspace(0.0, top, points)]


def tail_index_univariate(params, innov_df=None, n_mc=1_000_000, tol=1e-6, seed=0):
    """Solve E[(a1 Z^2 + b1)^s] = 1 for s > 0 and return alpha = 2 s.

    One fixed sample of Z is used for every s, so the moment curve and the
    root are deterministic given ``seed``.  The sample is rescaled so its
    mean of Z^2 is exactly one.  For t(df) innovations, s is restricted to
    s < df / 4.
    """
    if not params.a1 > 0:
        raise ValueError("a1 must be positive")
    if n_mc < 100_000:
        raise ValueError("n_mc must be at least 10^5")
    if not tol > 0:
        raise ValueError("tol must be positive")
    rng = np.random.default_rng(seed)
    z2 = draw_innovations(rng, n_mc, k=1, df=innov_df)[:, 0] ** 2
    # calibrate the draw to E Z^2 = 1; this removes the noise that is linear in
    # Z^2 - 1, which dominates when a1 is small relative to b1
    z2 /= z2.mean()
    log_a = np.log(params.a1 * z2 + params.b1)
    cap = _moment_cap(innov_df)

    def f(s):
        return log_moment(log_a, s)

    root, bracket, slope = find_root(f, cap=cap, xtol=tol)
    e = np.exp(root * log_a - (root * log_a).max())
    c = np.cov(e, z2)
    resid = e - c[0, 1] / c[1, 1] * z2
    se_s = resid.std(ddof=1) / np.sqrt(n_mc) / np.mean(e * log_a)
    return TailIndexResult(alpha=2 * root, bracket=bracket, moment_curve=_curve(f, root, cap),
                           mc_se=float(2 * abs(se_s)), n_mc=n_mc, slope_at_root=float(slope))


class LambdaCurve:
    """Fixed-seed estimator of n^{-1} log E ||A_n ... A_1||^s as a function of s.

    ``method="direct"`` draws ``replicates`` independent products of length
    ``n_len`` and averages ||product||^s in the log domain.  ``"resampled"``
    propagates a population of ``replicates`` direction vectors and resamples
    them by weight ||A u||^s each step, which keeps the variance bounded for
    large s; the first ``n_len // 10`` steps are discarded as warm-up.
    Replicates are split into ``batches`` groups with independent seeds.
    """

    def __init__(self, params, innov, n_len=100, replicates=10_000, seed=0,
                 method="direct", batches=10):
        if n_len < 20:
            raise ValueError("n_len must be at least 20")
        if replicates < 1000:
            raise ValueError("replicates must be at least 10^3")
        if method not in ("direct", "resampled"):
            raise ValueError(f"unknown method {method!r}")
        _, self.alpha, self.beta = params.matrices()
        self.n_len = n_len
        self.method = method
        self.cap = _moment_cap(innov.df)
        sizes = np.full(batches, replicates // batches)
        sizes[: replicates % batches] += 1
        self.sizes = sizes
        seqs = as_seed_sequence(seed).spawn(batches)
        self._batches = []
        for size, ss in zip(sizes, seqs):
            rng = np.random.default_rng(ss)
            if method == "direct":
                z2 = draw_innovations(rng, size * n_len, df=innov.df, rho=innov.rho) ** 2
                z2 = np.ascontiguousarray(z2.reshape(size, n_len, 2))
                self._batches.append(_kernels.product_log_norms(self.alpha, self.beta, z2))
            else:
                z2 = draw_innovations(rng, n_len * size, df=innov.df, rho=innov.rho) ** 2
                z2 = np.ascontiguousarray(z2.reshape(n_len, size, 2))
                self._batches.append((z2, rng.random(n_len)))
        if method == "direct":
            self._log_norms = np.concatenate(self._batches)

    def batch_value(self, b, s):
        if self.method == "direct":
            ln = self._batches[b]
            return float((logsumexp(s * ln) - np.log(ln.shape[0])) / self.n_len)
        z2, u = self._batches[b]
        return float(_kernels.resampled_log_growth(self.alpha, self.beta, z2, u, float(s),
                                                   self.n_len // 10))

    def __call__(self, s):
        if self.method == "direct":
            ln = self._log_norms
            return float((logsumexp(s * ln) - np.log(ln.shape[0])) / self.n_len)
        vals = [self.batch_value(b, s) for b in range(len(self.sizes))]
        return float(np.dot(self.sizes, vals) / self.sizes.sum())


def lambda_function(params, innov, s, n_len=100, replicates=10_000, seed=0, method="direct"):
    """Estimate n^{-1} log E ||A_1 ... A_n||^s for fixed product length ``n_len``."""
    if not s > 0:
        raise ValueError("s must be positive")
    return LambdaCurve(params, innov, n_len, replicates, seed, method)(s)


def tail_index_bivariate(params, innov, n_len=100, replicates=10_000, tol=0.05, seed=0,
                         method="resampled", batches=10):
    """Tail index alpha = 2 s* with s* the positive zero of the estimated Lambda(s).

    The standard error comes from the spread of per-batch roots.  The whole
    estimate is repeated with product length 2 * n_len (independent draws);
    when the two roots differ by more than ``tol`` a BiasWarning is issued
    and ``bias_warning`` is set.  Positivity/density conditions that cannot
    be checked numerically are assumed.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    s_main, s_double = as_seed_sequence(seed).spawn(2)
    curve = LambdaCurve(params, innov, n_len, replicates, s_main, method, batches)
    root, bracket, slope = find_root(curve, cap=curve.cap, xtol=1e-4)

    batch_roots = []
    for b in range(batches):
        try:
            batch_roots.append(find_root(lambda s: curve.batch_value(b, s), cap=curve.cap,
                                         xtol=1e-4)[0])
        except NoRootInRange:
            continue
    se = 2 * np.std(batch_roots, ddof=1) / np.sqrt(len(batch_roots)) if len(batch_roots) > 1 else np.nan

    curve2 = LambdaCurve(params, innov, 2 * n_len, replicates, s_double, method, batches)
    try:
        drift = abs(find_root(curve2, cap=curve.cap, xtol=1e-4)[0] - root)
    except NoRootInRange:
        drift = np.inf
    flagged = drift > tol
    if flagged:
        warnings.warn(f"root moved by {drift:.4g} when doubling n_len={n_len}", BiasWarning,
                      stacklevel=2)
    return TailIndexResult(alpha=2 * root, bracket=bracket, moment_curve=_curve(curve, root, curve.cap),
                           mc_se=float(se), n_mc=replicates, slope_at_root=float(slope),
                           bias_drift=float(drift), bias_warning=bool(flagged), method=method)


def _log_a_draws(params, innov_df, shape, seed):
    rng = np.random.default_rng(seed)
    n = int(np.prod(shape))
    z = draw_innovations(rng, n, k=1, df=innov_df)[:, 0].reshape(shape)
    with np.errstate(divide="ignore"):
        return np.log(params.a1 * z * z + params.b1)


def theoretical_extremogram_sigma(params, innov_df=None, alpha=None, max_lag=20, n_mc=100_000, seed=0):
    """rho_sigma(h) = E[min(1, Pi_h^(alpha/2))], Pi_h = prod_{k<=h} (a1 Z_k^2 + b1)."""
    if alpha is None or not alpha > 0:
        raise ValueError("alpha must be positive")
    if max_lag < 1:
        raise ValueError("max_lag must be at least 1")
    log_a = _log_a_draws(params, innov_df, (n_mc, max_lag), seed)
    vals = np.minimum(1.0, np.exp(0.5 * alpha * np.cumsum(log_a, axis=1)))
    return LagCurve(lags=np.arange(1, max_lag + 1), values=vals.mean(axis=0),
                    se=vals.std(axis=0, ddof=1) / np.sqrt(n_mc))


def decay_envelope(params, innov_df=None, p=1.0, max_lag=20, n_mc=100_000, seed=0, alpha=None):
    """Geometric bound (E[A^p])^h on rho_sigma(h), valid for p < alpha / 2."""
    if not p > 0:
        raise ValueError("p must be positive")
    if alpha is not None and not p < alpha / 2:
        raise ValueError(f"p={p} is not below alpha/2={alpha / 2}")
    a_p = np.exp(p * _log_a_draws(params, innov_df, (n_mc,), seed))
    m = a_p.mean()
    se_m = a_p.std(ddof=1) / np.sqrt(n_mc)
    h = np.arange(1, max_lag + 1)
    return LagCurve(lags=h, values=m ** h, se=h * m ** (h - 1) * se_m)
