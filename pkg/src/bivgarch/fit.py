"""Likelihood fitting of GARCH(1,1) models, filtering, residuals, VAR
pre-whitening and QQ diagnostics.

All likelihoods are conditional on W_0 = componentwise sample variance.
Parameters are optimized on an unconstrained scale (log for positive
quantities, atanh for the correlation, log(df - 2) for the t degrees of
freedom) with a Nelder-Mead simplex, and points whose mean matrix
alpha + beta has spectral radius >= 1 - 1e-4 are rejected.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, stats
from scipy.special import gammaln

from . import _kernels
from .errors import DegenerateSeries, NonConvergenceWarning, SingularDesign
from .model import BivariateGarchParams, UnivariateGarchParams, reconstructing_pair, spectral_radius

RADIUS_BARRIER = 1.0 - 1e-4
BOUNDARY_FLAG = 1.0 - 1e-3
_PENALTY = 1e10
_TINY = 1e-12


@dataclass
class FitResult:
    params: UnivariateGarchParams | BivariateGarchParams
    loglik: float
    converged: bool
    iterations: int
    init: UnivariateGarchParams | BivariateGarchParams
    init_loglik: float
    sigma_filtered: np.ndarray
    residuals: np.ndarray
    rho_hat: float | None = None
    df_hat: float | None = None
    spectral_radius: float = float("nan")
    boundary: bool = False
    n_evals: int = 0
    init_rho: float | None = None
    init_df: float | None = None

    def to_dict(self):
        d = {"params": self.params.to_dict(), "loglik": self.loglik, "converged": self.converged,
             "iterations": self.iterations, "n_evals": self.n_evals,
             "init": self.init.to_dict(), "init_loglik": self.init_loglik,
             "spectral_radius": self.spectral_radius, "boundary": self.boundary}
        if self.rho_hat is not None:
            d["rho_hat"] = self.rho_hat
            d["init_rho"] = self.init_rho
        if self.df_hat is not None:
            d["df_hat"] = self.df_hat
            d["init_df"] = self.init_df
        return d


def _as_2d(x):
    x = np.asarray(x, dtype=float)
    return x[:, None] if x.ndim == 1 else x


def _check_series(x, n_recommended):
    if x.shape[0] < 2 or not np.all(np.isfinite(x)):
        raise DegenerateSeries("series must be finite with at least two observations")
    if np.any(np.ptp(x, axis=0) == 0):
        raise DegenerateSeries("series has a constant component")
    if x.shape[0] < n_recommended:
        warnings.warn(f"only {x.shape[0]} observations; at least {n_recommended} recommended",
                      UserWarning, stacklevel=3)


def _filter_w(x, a0, alpha, beta, w0=None):
    if w0 is None:
        w0 = x.var(axis=0)
    return _kernels.garch_filter(a0, alpha, beta, x, np.asarray(w0, dtype=float))


def volatility_filter(x, params, w0=None):
    """Filtered volatilities sqrt(W_t) for observed returns ``x``.

    W_0 defaults to the componentwise sample variance; W_t for t >= 1 follows
    W_t = a0 + alpha X_{t-1}^2 + beta W_{t-1}.
    """
    x = _as_2d(x)
    a0, alpha, beta = params.matrices()
    return np.sqrt(_filter_w(x, a0, alpha, beta, w0))


def filtered_pair(x, params, w0=None):
    """(sigma, residuals) with sigma * residuals == x bitwise.

    sigma is the filtered volatility, moved by a few ulps where the exact
    product identity requires it.
    """
    x = _as_2d(x)
    return reconstructing_pair(x, volatility_filter(x, params, w0))


def extract_residuals(x, params, w0=None):
    """Standardized residuals X_t / sigma_t, see ``filtered_pair``."""
    return filtered_pair(x, params, w0)[1]


def gaussian_loglik(x, w):
    """-1/2 sum_t [log w_t + x_t^2 / w_t], summed over components."""
    return float(-0.5 * np.sum(np.log(w) + x * x / w))


def t_loglik(x, w, df):
    """Exact log-likelihood with unit-variance Student-t(df) innovations."""
    z2 = x * x / w
    const = gammaln((df + 1) / 2) - gammaln(df / 2) - 0.5 * np.log(np.pi * (df - 2))
    return float(np.sum(const - 0.5 * np.log(w) - 0.5 * (df + 1) * np.log1p(z2 / (df - 2))))


def ccc_loglik(x, w, rho):
    """Gaussian quasi log-likelihood of the CCC model, -1/2 sum [log det H_t + X_t' H_t^-1 X_t]."""
    z1 = x[:, 0] / np.sqrt(w[:, 0])
    z2 = x[:, 1] / np.sqrt(w[:, 1])
    one_m = 1.0 - rho * rho
    quad = (z1 * z1 - 2.0 * rho * z1 * z2 + z2 * z2) / one_m
    return float(-0.5 * np.sum(np.log(w[:, 0]) + np.log(w[:, 1]) + np.log(one_m) + quad))


def _log(v):
    return np.log(np.maximum(v, _TINY))


# --- parameter transforms -------------------------------------------------

def _uni_pack(params):
    return _log(np.array([params.a0, params.a1, params.b1]))


def _uni_unpack(theta):
    a0, a1, b1 = np.exp(theta[:3])
    return UnivariateGarchParams(float(a0), float(a1), float(b1))


def _biv_pack(params, rho):
    return np.concatenate([_log(params.a0), _log(params.alpha.ravel()), _log(params.beta.ravel()),
                           [np.arctanh(rho)]])


def _biv_unpack(theta):
    e = np.exp(theta[:10])
    return BivariateGarchParams(e[:2], e[2:6].reshape(2, 2), e[6:10].reshape(2, 2)), float(np.tanh(theta[10]))


# --- optimizer ------------------------------------------------------------

def _simplex(x0, step):
    sim = np.tile(x0, (x0.size + 1, 1))
    sim[1:] += step * np.eye(x0.size)
    return sim


def _minimize(objective, theta0, seed, step=0.5, maxfev=None):
    """Nelder-Mead from theta0, a restart at its optimum, and one perturbed start.

    Returns (best theta, converged flag of the best run, iterations, evaluations).
    """
    dim = theta0.size
    maxfev = maxfev or 1000 * dim
    opts = dict(xatol=1e-6, fatol=1e-10, maxfev=maxfev, adaptive=dim > 5)
    rng = np.random.default_rng(seed)
    runs = []
    nit = nfev = 0
    starts = [theta0, theta0 + rng.normal(0.0, 0.3, dim)]
    for start in starts:
        res = optimize.minimize(objective, start, method="Nelder-Mead",
                                options=dict(opts, initial_simplex=_simplex(start, step)))
        nit, nfev = nit + res.nit, nfev + res.nfev
        # restart with a fresh simplex at the optimum found
        res2 = optimize.minimize(objective, res.x, method="Nelder-Mead",
                                 options=dict(opts, initial_simplex=_simplex(res.x, 0.1 * step)))
        nit, nfev = nit + res2.nit, nfev + res2.nfev
        runs.append(res2 if res2.fun <= res.fun else res)
    best = min(runs, key=lambda r: r.fun)
    if not best.success:
        warnings.warn(f"simplex did not converge: {best.message}", NonConvergenceWarning, stacklevel=3)
    return best.x, bool(best.success), nit, nfev


# --- univariate -----------------------------------------------------------

def _default_uni_init(x):
    v = float(x.var())
    return UnivariateGarchParams(v * 0.1, 0.1, 0.8)


def _uni_objective(x, dist):
    n = x.shape[0]
    w0 = x.var(axis=0)

    def objective(theta):
        a0, a1, b1 = np.exp(theta[:3])
        if a1 + b1 >= RADIUS_BARRIER:
            return _PENALTY * (1.0 + a1 + b1)
        w = _kernels.garch_filter(np.array([a0]), np.array([[a1]]), np.array([[b1]]), x, w0)
        if dist == "normal":
            ll = gaussian_loglik(x, w)
        else:
            ll = t_loglik(x, w, 2.0 + np.exp(theta[3]))
        return -ll / n if np.isfinite(ll) else _PENALTY

    return objective


def _fit_univariate(x, init, dist, df_init, seed):
    x = _as_2d(x)
    if x.shape[1] != 1:
        raise ValueError("univariate fit expects a single series")
    _check_series(x, 500)
    init = init or _default_uni_init(x)
    theta0 = _uni_pack(init)
    if dist == "t":
        theta0 = np.append(theta0, np.log(df_init - 2.0))
    objective = _uni_objective(x, dist)
    f0 = objective(theta0)
    theta, converged, nit, nfev = _minimize(objective, theta0, seed)
    if objective(theta) > f0:
        theta = theta0
    params = _uni_unpack(theta)
    sigma, resid = filtered_pair(x, params)
    n = x.shape[0]
    return FitResult(params=params, loglik=-objective(theta) * n, converged=converged, iterations=nit,
                     init=init, init_loglik=-f0 * n, sigma_filtered=sigma,
                     residuals=resid,
                     df_hat=float(2.0 + np.exp(theta[3])) if dist == "t" else None,
                     init_df=df_init if dist == "t" else None,
                     spectral_radius=params.a1 + params.b1,
                     boundary=params.a1 + params.b1 >= BOUNDARY_FLAG, n_evals=nfev)


def fit_univariate_qmle(x, init=None, seed=0):
    """Gaussian QMLE of a univariate GARCH(1,1) over (a0, a1, b1)."""
    return _fit_univariate(x, init, "normal", None, seed)


def fit_univariate_t_mle(x, init=None, df_init=8.0, seed=0):
    """MLE of a univariate GARCH(1,1) with standardized Student-t innovations (df > 2)."""
    if not df_init > 2:
        raise ValueError("df_init must exceed 2")
    return _fit_univariate(x, init, "t", df_init, seed)


# --- bivariate ------------------------------------------------------------

def _biv_objective(x):
    n = x.shape[0]
    w0 = x.var(axis=0)

    def objective(theta):
        e = np.exp(theta[:10])
        alpha = e[2:6].reshape(2, 2)
        beta = e[6:10].reshape(2, 2)
        a = alpha + beta
        rad = 0.5 * (a[0, 0] + a[1, 1]) + np.sqrt(0.25 * (a[0, 0] - a[1, 1]) ** 2 + a[0, 1] * a[1, 0])
        if rad >= RADIUS_BARRIER:
            return _PENALTY * (1.0 + rad)
        w = _kernels.garch_filter(e[:2], alpha, beta, x, w0)
        ll = ccc_loglik(x, w, np.tanh(theta[10]))
        return -ll / n if np.isfinite(ll) else _PENALTY

    return objective


def _shrink_to_barrier(params):
    alpha, beta = params.alpha.copy(), params.beta.copy()
    while spectral_radius(BivariateGarchParams(params.a0, alpha, beta)) >= BOUNDARY_FLAG:
        alpha *= 0.95
        beta *= 0.95
    return BivariateGarchParams(params.a0, alpha, beta)


def default_bivariate_init(x, seed=0):
    """Componentwise univariate QMLE fits, off-diagonals 0.01, rho from their residuals."""
    fits = [fit_univariate_qmle(x[:, i], seed=seed) for i in range(2)]
    a0 = [f.params.a0 for f in fits]
    alpha = np.full((2, 2), 0.01)
    beta = np.full((2, 2), 0.01)
    for i, f in enumerate(fits):
        alpha[i, i] = f.params.a1
        beta[i, i] = f.params.b1
    r = np.corrcoef(fits[0].residuals[:, 0], fits[1].residuals[:, 0])[0, 1]
    return _shrink_to_barrier(BivariateGarchParams(a0, alpha, beta)), float(np.clip(r, -0.99, 0.99))


def _grid_init(x, objective, rho):
    var = x.var(axis=0)
    levels = np.round(np.arange(0.1, 1.0, 0.1), 10)
    pairs = [(a, b) for a in levels for b in np.concatenate([[0.0], levels]) if a + b < 0.95]
    best, best_f = None, np.inf
    for (a1, b1), (a2, b2) in itertools.product(pairs, pairs):
        alpha = np.array([[a1, 0.01], [0.01, a2]])
        beta = np.array([[max(b1, 0.01), 0.01], [0.01, max(b2, 0.01)]])
        a0 = var * np.maximum(1.0 - np.array([a1 + b1, a2 + b2]), 0.05)
        p = BivariateGarchParams(a0, alpha, beta)
        if spectral_radius(p) >= BOUNDARY_FLAG:
            continue
        f = objective(_biv_pack(p, rho))
        if f < best_f:
            best, best_f = p, f
    return best


def fit_bivariate_qmle(x, init=None, rho_init=None, seed=0, grid=False):
    """Gaussian QMLE of the bivariate CCC-GARCH(1,1) model (11 parameters).

    ``init`` defaults to componentwise univariate QMLE estimates with
    off-diagonal entries 0.01.  With ``grid=True`` the best point of a 0.1
    grid over the diagonal alpha/beta entries is tried as an extra start and
    the fit with the larger likelihood is returned.  ``boundary`` is set when
    the estimate's spectral radius reaches 1 - 1e-3, i.e. it is pressed
    against the stationarity barrier.
    """
    x = _as_2d(x)
    if x.shape[1] != 2:
        raise ValueError("bivariate fit expects an (n, 2) array")
    _check_series(x, 2000)
    if init is None:
        init, r0 = default_bivariate_init(x, seed)
        rho_init = r0 if rho_init is None else rho_init
    if rho_init is None:
        rho_init = float(np.corrcoef(x[:, 0], x[:, 1])[0, 1])
    objective = _biv_objective(x)
    theta0 = _biv_pack(init, rho_init)
    f0 = objective(theta0)
    starts = [theta0]
    if grid:
        g = _grid_init(x, objective, rho_init)
        if g is not None:
            starts.append(_biv_pack(g, rho_init))
    best = None
    nit_total = nfev_total = 0
    for start in starts:
        theta, converged, nit, nfev = _minimize(objective, start, seed)
        nit_total, nfev_total = nit_total + nit, nfev_total + nfev
        if best is None or objective(theta) < objective(best[0]):
            best = (theta, converged)
    theta, converged = best
    if objective(theta) > f0:
        theta = theta0
    params, rho = _biv_unpack(theta)
    sigma, resid = filtered_pair(x, params)
    n = x.shape[0]
    rad = spectral_radius(params)
    return FitResult(params=params, loglik=-objective(theta) * n, converged=converged,
                     iterations=nit_total, init=init, init_loglik=-f0 * n, sigma_filtered=sigma,
                     residuals=resid, rho_hat=rho, spectral_radius=rad,
                     boundary=rad >= BOUNDARY_FLAG, n_evals=nfev_total, init_rho=rho_init)


# --- VAR pre-whitening ----------------------------------------------------

@dataclass
class VarFit:
    """Least-squares VAR(p): x_t = intercept + sum_l coefficients[l] @ x_{t-l-1} + residual."""

    order: int
    coefficients: list
    intercept: np.ndarray
    residuals: np.ndarray
    fitted: np.ndarray
    criterion_values: list = field(default_factory=list)
    criterion: str = "schwarz"
    design: np.ndarray | None = field(default=None, repr=False)


def _var_design(x, p, start):
    n = x.shape[0]
    cols = [np.ones((n - start, 1))]
    for lag in range(1, p + 1):
        cols.append(x[start - lag: n - lag])
    return np.hstack(cols)


def _var_ls(x, p, start):
    design = _var_design(x, p, start)
    y = x[start:]
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < design.shape[1]:
        raise SingularDesign(f"VAR({p}) design matrix has rank {rank} < {design.shape[1]}")
    fitted = design @ coef
    return coef, fitted, y - fitted, design


def fit_var(x, max_order, criterion="schwarz"):
    """Select a VAR order in 0..max_order on a common sample and refit it.

    Schwarz: log det Sigma_p + p k^2 log(N) / N.  FPE: ((N + kp + 1) / (N - kp - 1))^k det Sigma_p,
    with N = n - max_order and Sigma_p the ML residual covariance.
    """
    if criterion not in ("schwarz", "fpe"):
        raise ValueError(f"unknown criterion {criterion!r}")
    x = _as_2d(x)
    n, k = x.shape
    if max_order < 0 or n - max_order <= k * max_order + 1:
        raise ValueError("series too short for the requested max_order")
    big_n = n - max_order
    values = []
    for p in range(max_order + 1):
        _, _, resid, _ = _var_ls(x, p, max_order)
        sign, logdet = np.linalg.slogdet(resid.T @ resid / big_n)
        if sign <= 0:
            raise SingularDesign(f"singular residual covariance at order {p}")
        if criterion == "schwarz":
            values.append(float(logdet + p * k * k * np.log(big_n) / big_n))
        else:
            values.append(float(k * np.log((big_n + k * p + 1) / (big_n - k * p - 1)) + logdet))
    order = int(np.argmin(values))
    coef, fitted, resid, design = _var_ls(x, order, order)
    coefs = [coef[1 + l * k: 1 + (l + 1) * k].T.copy() for l in range(order)]
    return VarFit(order=order, coefficients=coefs, intercept=coef[0].copy(), residuals=resid,
                  fitted=fitted, criterion_values=values, criterion=criterion, design=design)


def qq_points(residuals, df):
    """(theoretical, empirical) quantile pairs against a Student-t(df) reference.

    For df > 2 the reference is standardized to unit variance.  Plotting
    positions are (i - 0.5) / n.
    """
    if not df > 0:
        raise ValueError("df must be positive")
    emp = np.sort(np.asarray(residuals, dtype=float).ravel())
    n = emp.shape[0]
    pos = (np.arange(1, n + 1) - 0.5) / n
    # averaging the two tails keeps the quantiles exactly antisymmetric (median exactly 0)
    theo = 0.5 * (stats.t.ppf(pos, df) - stats.t.ppf(1.0 - pos, df))
    if df > 2:
        theo = theo * np.sqrt((df - 2) / df)
    return theo, emp
