"""Bivariate constant-conditional-correlation GARCH(1,1): parameters,
innovations, simulation and stationarity diagnostics.

The squared volatilities W_t = (sigma_1t^2, sigma_2t^2)' follow the vector
recursion

    W_t = a0 + alpha X_{t-1}^2 + beta W_{t-1} = A_t W_{t-1} + a0,
    A_t[i, j] = alpha[i, j] Z_{j,t-1}^2 + beta[i, j],

and X_t = diag(sqrt(W_t)) Z_t with iid unit-variance innovations of
correlation rho.  The univariate model is the 1x1 special case.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import StationarityWarning


@dataclass(frozen=True)
class UnivariateGarchParams:
    a0: float
    a1: float
    b1: float

    def __post_init__(self):
        if not self.a0 > 0:
            raise ValueError(f"a0 must be positive, got {self.a0}")
        if self.a1 < 0 or self.b1 < 0:
            raise ValueError("a1 and b1 must be nonnegative")

    def matrices(self):
        return (np.array([self.a0], dtype=float),
                np.array([[self.a1]], dtype=float),
                np.array([[self.b1]], dtype=float))

    def to_dict(self):
        return {"a0": self.a0, "a1": self.a1, "b1": self.b1}


@dataclass(frozen=True, eq=False)
class BivariateGarchParams:
    """Intercepts ``a0`` (2,), ARCH matrix ``alpha`` and GARCH matrix ``beta`` (2, 2)."""

    a0: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        a0 = np.array(self.a0, dtype=float).reshape(2)
        alpha = np.array(self.alpha, dtype=float).reshape(2, 2)
        beta = np.array(self.beta, dtype=float).reshape(2, 2)
        if not np.all(a0 > 0):
            raise ValueError(f"intercepts must be positive, got {a0}")
        if np.any(alpha < 0) or np.any(beta < 0):
            raise ValueError("alpha and beta entries must be nonnegative")
        for arr in (a0, alpha, beta):
            arr.setflags(write=False)
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    def __eq__(self, other):
        if not isinstance(other, BivariateGarchParams):
            return NotImplemented
        return (np.array_equal(self.a0, other.a0) and np.array_equal(self.alpha, other.alpha)
                and np.array_equal(self.beta, other.beta))

    def matrices(self):
        return self.a0, self.alpha, self.beta

    @property
    def mean_matrix(self):
        """E A_1 = alpha + beta (innovations have unit variance)."""
        return self.alpha + self.beta

    def component(self, i):
        """Own-component univariate parameters (cross terms dropped)."""
        return UnivariateGarchParams(float(self.a0[i]), float(self.alpha[i, i]), float(self.beta[i, i]))

    def to_dict(self):
        return {"a0": self.a0.tolist(), "alpha": self.alpha.tolist(), "beta": self.beta.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(d["a0"], d["alpha"], d["beta"])


@dataclass(frozen=True)
class InnovationSpec:
    """Law of Z_t: zero mean, unit component variances, correlation ``rho``.

    ``family`` is ``"gaussian"`` or ``"t"``; Student-t pairs share one
    chi-square mixing variable (a genuine bivariate t) and are rescaled by
    sqrt((df - 2) / df).
    """

    family: str = "gaussian"
    df: float | None = None
    rho: float = 0.0

    def __post_init__(self):
        if self.family not in ("gaussian", "t"):
            raise ValueError(f"unknown innovation family {self.family!r}")
        if self.family == "t":
            if self.df is None or not self.df > 2:
                raise ValueError("Student-t innovations need df > 2")
        elif self.df is not None:
            raise ValueError("df is only meaningful for the t family")
        if not -1 < self.rho < 1:
            raise ValueError(f"rho must lie in (-1, 1), got {self.rho}")

    @classmethod
    def gaussian(cls, rho=0.0):
        return cls("gaussian", None, rho)

    @classmethod
    def student_t(cls, df, rho=0.0):
        return cls("t", float(df), rho)

    @classmethod
    def from_df(cls, df, rho=0.0):
        return cls.gaussian(rho) if df is None else cls.student_t(df, rho)

    def sample(self, rng, n, k=2):
        return draw_innovations(rng, n, k=k, df=self.df, rho=self.rho)

    def to_dict(self):
        return {"family": self.family, "df": self.df, "rho": self.rho}

    @classmethod
    def from_dict(cls, d):
        return cls(d.get("family", "gaussian"), d.get("df"), d.get("rho", 0.0))


def draw_innovations(rng, n, k=2, df=None, rho=0.0):
    """Draw ``n`` iid innovation vectors of dimension ``k`` (shape (n, k))."""
    g = rng.standard_normal((n, k))
    if k == 2 and rho != 0.0:
        g[:, 1] = rho * g[:, 0] + np.sqrt(1.0 - rho * rho) * g[:, 1]
    if df is not None:
        chi2 = rng.chisquare(df, n)
        g *= np.sqrt((df - 2.0) / chi2)[:, None]
    return g


@dataclass
class SimulatedPath:
    """Simulated returns ``x``, volatilities ``sigma`` and squared volatilities ``w``.

    ``z`` holds the realized innovations x / sigma.
    """

    x: np.ndarray
    sigma: np.ndarray
    w: np.ndarray
    z: np.ndarray
    seed: int
    burn_in: int
    stationary: bool = True


@dataclass
class StationarityReport:
    spectral_radius: float
    sufficient_condition_met: bool
    lyapunov_estimate: float | None = None
    lyapunov_se: float | None = None


def spectral_radius(params):
    """Dominant eigenvalue of E A_1 = alpha + beta, in closed form."""
    _, alpha, beta = params.matrices()
    a = alpha + beta
    if a.shape == (1, 1):
        return float(a[0, 0])
    half_tr = 0.5 * (a[0, 0] + a[1, 1])
    half_diff = 0.5 * (a[0, 0] - a[1, 1])
    # sqrt(a12 * a21) taken exactly when the off-diagonals coincide
    g = a[0, 1] if a[0, 1] == a[1, 0] else np.sqrt(a[0, 1] * a[1, 0])
    return float(half_tr + np.hypot(half_diff, g))


def spectral_radius_check(params):
    rad = spectral_radius(params)
    return StationarityReport(spectral_radius=rad, sufficient_condition_met=rad < 1.0)


def stationary_mean(params):
    """(I - E A_1)^{-1} a0 when the spectral radius is below one, else None."""
    a0, alpha, beta = params.matrices()
    if spectral_radius(params) >= 1.0:
        return None
    k = a0.shape[0]
    return np.linalg.solve(np.eye(k) - (alpha + beta), a0)


def exact_quotient(x, sigma):
    """x / sigma, nudged by one ulp where needed so that sigma * q == x holds bitwise."""
    q = x / sigma
    for _ in range(2):
        bad = sigma * q != x
        if not bad.any():
            break
        up = np.nextafter(q, np.inf)
        down = np.nextafter(q, -np.inf)
        q = np.where(bad & (sigma * up == x), up, np.where(bad & (sigma * down == x), down, q))
    return q


def reconstructing_pair(x, sigma, max_steps=1 << 16):
    """(sigma', z) with sigma' * z == x bitwise for arbitrary data ``x``.

    For a fixed sigma some x are not attainable as a rounded product, so
    sigma' is moved the fewest ulps from sigma that make the identity
    achievable (typically zero, at most around 1e-12 relative).
    """
    x = np.asarray(x, dtype=float)
    sigma = np.broadcast_to(np.asarray(sigma, dtype=float), x.shape)
    s_out, z, ok = _kernels.exact_pairs(np.ascontiguousarray(x).ravel(), np.ascontiguousarray(sigma).ravel(),
                                        max_steps)
    if not ok.all():
        raise ArithmeticError("no volatility within the search range reproduces the data exactly")
    return s_out.reshape(x.shape), z.reshape(x.shape)


def _simulate(params, innov_df, rho, k, n, burn_in, seed):
    if n < 1:
        raise ValueError("n must be at least 1")
    if burn_in < 0:
        raise ValueError("burn_in must be nonnegative")
    a0, alpha, beta = params.matrices()
    rng = np.random.default_rng(seed)
    z = draw_innovations(rng, n + burn_in, k=k, df=innov_df, rho=rho)
    w0 = stationary_mean(params)
    stationary = w0 is not None
    if w0 is None:
        w0 = a0.copy()
    w, x = _kernels.garch_simulate(a0, alpha, beta, z, w0)
    w, x = w[burn_in:], x[burn_in:]
    sigma = np.sqrt(w)
    return SimulatedPath(x=x, sigma=sigma, w=w, z=exact_quotient(x, sigma),
                         seed=seed, burn_in=burn_in, stationary=stationary)


def simulate_univariate(params, innov_df=None, n=50_000, burn_in=1000, seed=0):
    """Simulate a univariate GARCH(1,1) path (arrays of shape (n, 1)).

    Explosive parameters are allowed; the recursion then starts from a0.
    """
    if innov_df is not None and not innov_df > 2:
        raise ValueError("Student-t innovations need df > 2")
    return _simulate(params, innov_df, 0.0, 1, n, burn_in, seed)


def simulate_bivariate(params, innov, n=50_000, burn_in=1000, seed=0):
    """Simulate the bivariate CCC-GARCH(1,1) model.

    The recursion starts at the stationary mean of W when the spectral radius
    of E A_1 is below one and at the intercept vector otherwise; in the latter
    case a StationarityWarning is emitted and ``path.stationary`` is False.
    """
    path = _simulate(params, innov.df, innov.rho, 2, n, burn_in, seed)
    if not path.stationary:
        warnings.warn(f"spectral radius {spectral_radius(params):.6g} >= 1", StationarityWarning,
                      stacklevel=2)
    return path


def as_seed_sequence(seed):
    return seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)


def _child_rngs(seed, count):
    return [np.random.default_rng(s) for s in as_seed_sequence(seed).spawn(count)]


def lyapunov_exponent(params, innov, n=10_000, replicates=10, seed=0):
    """Monte-Carlo top Lyapunov exponent of the random matrices A_t.

    Each replicate evaluates n^{-1} log ||A_n ... A_1|| (operator 2-norm)
    with per-step renormalization; returns (mean, standard error) across
    replicates.  Replicate r draws from a seed derived from (seed, r).
    """
    if n < 1 or replicates < 1:
        raise ValueError("n and replicates must be at least 1")
    _, alpha, beta = params.matrices()
    k = alpha.shape[0]
    df, rho = (innov.df, innov.rho) if k == 2 else (innov.df, 0.0)
    z2 = np.empty((replicates, n, k))
    for r, rng in enumerate(_child_rngs(seed, replicates)):
        z2[r] = draw_innovations(rng, n, k=k, df=df, rho=rho) ** 2
    logs = _kernels.product_log_norms(alpha, beta, z2) / n
    se = float(logs.std(ddof=1) / np.sqrt(replicates)) if replicates > 1 else 0.0
    return float(logs.mean()), se


def stationarity_report(params, innov, n=10_000, replicates=10, seed=0):
    rep = spectral_radius_check(params)
    rep.lyapunov_estimate, rep.lyapunov_se = lyapunov_exponent(params, innov, n, replicates, seed)
    return rep


@dataclass
class GrowthCheck:
    lhs: float
    se: float
    threshold: float
    satisfied: bool
    moment_condition_ok: bool
    p: float = field(default=1.0)


def check_growth_condition(params, innov, p=1.0, n_mc=1_000_000, seed=0):
    """Monte-Carlo check of E[min_i (sum_j alpha_ij Z_j^2 + beta_ij)^p] >= 2^(p/2).

    Also reports whether E[|Z|^{2p} log+ |Z|] is finite for the innovation
    family (always for Gaussian; 2p < df for Student-t, which is enforced).
    """
    if not p > 0:
        raise ValueError("p must be positive")
    if n_mc < 10_000:
        raise ValueError("n_mc must be at least 10^4")
    if innov.family == "t" and 2 * p >= innov.df:
        raise ValueError(f"E|Z|^(2p) is infinite for t({innov.df}) innovations at p={p}")
    _, alpha, beta = params.matrices()
    rng = np.random.default_rng(seed)
    z2 = innov.sample(rng, n_mc, k=2) ** 2
    rows = z2 @ alpha.T + beta.sum(axis=1)
    vals = rows.min(axis=1) ** p
    lhs = float(vals.mean())
    threshold = 2.0 ** (p / 2)
    return GrowthCheck(lhs=lhs, se=float(vals.std(ddof=1) / np.sqrt(n_mc)), threshold=threshold,
                       satisfied=lhs >= threshold, moment_condition_ok=True, p=p)
