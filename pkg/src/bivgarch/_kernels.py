"""Compiled inner loops.

All kernels take dense float64 arrays and handle dimension k in {1, 2}.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def opnorm2(m):
    """Operator 2-norm of a 1x1 or 2x2 matrix."""
    if m.shape[0] == 1:
        return abs(m[0, 0])
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    s = a * a + b * b + c * c + d * d
    det = a * d - b * c
    disc = s * s - 4.0 * det * det
    if disc < 0.0:
        disc = 0.0
    return np.sqrt(0.5 * (s + np.sqrt(disc)))


@njit(cache=True)
def garch_simulate(a0, alpha, beta, z, w0):
    """Run the squared-volatility recursion driven by innovations ``z``.

    Row 0 uses ``w0``; row t >= 1 uses the previous row's squared return.
    """
    n, k = z.shape
    w = np.empty((n, k))
    x = np.empty((n, k))
    for i in range(k):
        w[0, i] = w0[i]
        x[0, i] = np.sqrt(w0[i]) * z[0, i]
    for t in range(1, n):
        for i in range(k):
            acc = a0[i]
            for j in range(k):
                acc += alpha[i, j] * x[t - 1, j] * x[t - 1, j] + beta[i, j] * w[t - 1, j]
            w[t, i] = acc
            x[t, i] = np.sqrt(acc) * z[t, i]
    return w, x


@njit(cache=True)
def garch_filter(a0, alpha, beta, x, w0):
    n, k = x.shape
    w = np.empty((n, k))
    for i in range(k):
        w[0, i] = w0[i]
    for t in range(1, n):
        for i in range(k):
            acc = a0[i]
            for j in range(k):
                acc += alpha[i, j] * x[t - 1, j] * x[t - 1, j] + beta[i, j] * w[t - 1, j]
            w[t, i] = acc
    return w


@njit(cache=True)
def product_log_norms(alpha, beta, z2):
    """log ||A_n ... A_1|| for each replicate in ``z2`` of shape (R, n, k).

    The running product is rescaled to unit norm after every factor and the
    log scale factors are accumulated.
    """
    r_count, n, k = z2.shape
    out = np.empty(r_count)
    m = np.empty((k, k))
    a = np.empty((k, k))
    tmp = np.empty((k, k))
    for r in range(r_count):
        for i in range(k):
            for j in range(k):
                m[i, j] = 1.0 if i == j else 0.0
        total = 0.0
        for t in range(n):
            for i in range(k):
                for j in range(k):
                    a[i, j] = alpha[i, j] * z2[r, t, j] + beta[i, j]
            for i in range(k):
                for j in range(k):
                    acc = 0.0
                    for l in range(k):
                        acc += a[i, l] * m[l, j]
                    tmp[i, j] = acc
            nrm = opnorm2(tmp)
            if nrm == 0.0:
                total = -np.inf
                break
            total += np.log(nrm)
            for i in range(k):
                for j in range(k):
                    m[i, j] = tmp[i, j] / nrm
        out[r] = total
    return out


@njit(cache=True)
def resampled_log_growth(alpha, beta, z2, u01, s, warmup):
    """Per-step growth rate of E ||A_n ... A_1 u||^s by weighted resampling.

    ``z2`` has shape (n, R, k): one population of R unit direction vectors is
    pushed through the random matrices; at each step the mean of the weights
    ||A u||^s estimates the one-step growth and the population is resampled
    (systematic, offsets ``u01``) proportionally to the weights.  Returns the
    average log growth over steps ``warmup..n-1``.
    """
    n, r_count, k = z2.shape
    dirs = np.empty((r_count, k))
    new = np.empty((r_count, k))
    logw = np.empty(r_count)
    for r in range(r_count):
        for i in range(k):
            dirs[r, i] = 1.0 / np.sqrt(k)
    total = 0.0
    for t in range(n):
        for r in range(r_count):
            nv = 0.0
            for i in range(k):
                acc = 0.0
                for j in range(k):
                    acc += (alpha[i, j] * z2[t, r, j] + beta[i, j]) * dirs[r, j]
                new[r, i] = acc
                nv += acc * acc
            nv = np.sqrt(nv)
            for i in range(k):
                new[r, i] /= nv
            logw[r] = s * np.log(nv)
        mx = logw.max()
        sw = 0.0
        sw2 = 0.0
        for r in range(r_count):
            logw[r] = np.exp(logw[r] - mx)
            sw += logw[r]
            sw2 += logw[r] * logw[r]
        if t >= warmup:
            # second-order correction of E log(mean weight) toward log E(weight)
            mean = sw / r_count
            var = (sw2 / r_count - mean * mean) * r_count / (r_count - 1)
            total += mx + np.log(mean) + 0.5 * var / (r_count * mean * mean)
        cum = logw[0] / sw
        idx = 0
        for r in range(r_count):
            target = (r + u01[t]) / r_count
            while target > cum and idx < r_count - 1:
                idx += 1
                cum += logw[idx] / sw
            for i in range(k):
                dirs[r, i] = new[idx, i]
    return total / (n - warmup)


@njit(cache=True)
def _quotient_hit(xv, sv):
    q = xv / sv
    if sv * q == xv:
        return q, True
    up = q
    down = q
    for _ in range(2):
        up = np.nextafter(up, np.inf)
        down = np.nextafter(down, -np.inf)
        if sv * up == xv:
            return up, True
        if sv * down == xv:
            return down, True
    return q, False


@njit(cache=True)
def exact_pairs(x, sigma, max_steps):
    """Per element, the sigma value closest to the input (in ulps, at most
    ``max_steps`` away) for which some q satisfies sigma * q == x exactly.

    Returns (sigma', q, ok) as flat arrays.
    """
    n = x.shape[0]
    s_out = sigma.copy()
    q_out = np.empty(n)
    ok = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        xv = x[i]
        q, hit = _quotient_hit(xv, sigma[i])
        if hit:
            q_out[i] = q
            ok[i] = True
            continue
        up = sigma[i]
        down = sigma[i]
        for _ in range(max_steps):
            up = np.nextafter(up, np.inf)
            q, hit = _quotient_hit(xv, up)
            if hit:
                s_out[i] = up
                break
            down = np.nextafter(down, -np.inf)
            q, hit = _quotient_hit(xv, down)
            if hit:
                s_out[i] = down
                break
        q_out[i] = q
        ok[i] = hit
    return s_out, q_out, ok
