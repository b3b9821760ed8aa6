"""Hot numeric kernels.

Separable divergence sums and the Lambert W function are the inner loops of
the whole package (they get called thousands of times by the property and
acceptance suites).  Each kernel has a pure-numpy implementation and, unless
the environment variable ``BREGMANGEO_NO_NUMBA=1`` is set, a numba-compiled
version is used instead.  Both variants are importable (``*_py`` suffix for
the plain ones) so the benchmark script can compare them directly.
"""

import math
import os

import numpy as np

USE_NUMBA = os.environ.get("BREGMANGEO_NO_NUMBA", "0") != "1"

_INV_E = -math.exp(-1.0)


def _lambert_w0_scalar(x):
    # Halley iteration; 3rd-order convergence, <10 rounds at double precision.
    if x < _INV_E:
        return math.nan
    if x == _INV_E:
        return -1.0
    if x == 0.0:
        return 0.0
    if x >= math.e:
        lx = math.log(x)
        w = lx - math.log(lx)
    elif x > 0.0:
        w = x / (1.0 + x)
    else:
        # series around the branch point x = -1/e
        p = math.sqrt(2.0 * (math.e * x + 1.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 * p * p * p / 72.0
    for _ in range(50):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        step = f / denom
        w -= step
        if abs(step) <= 1e-16 * (1.0 + abs(w)):
            break
    return w


def _lambert_w0_array_py(x, out):
    for i in range(x.shape[0]):
        out[i] = _lambert_w0_scalar(x[i])
    return out


def _extended_kl_sum_py(p, q):
    # sum p log(p/q) + q - p  over strictly positive arrays
    acc = 0.0
    for i in range(p.shape[0]):
        acc += p[i] * math.log(p[i] / q[i]) + q[i] - p[i]
    return acc


def _itakura_saito_sum_py(p, q):
    # Burg-generator Bregman divergence: sum p/q - log(p/q) - 1
    acc = 0.0
    for i in range(p.shape[0]):
        r = p[i] / q[i]
        acc += r - math.log(r) - 1.0
    return acc


def _alpha_div_sum_py(alpha, q1, q2):
    # closed form for alpha != +-1
    t = 0.5 * (1.0 - alpha)
    scale = 4.0 / (1.0 - alpha * alpha)
    acc = 0.0
    for i in range(q1.shape[0]):
        acc += t * q1[i] + (1.0 - t) * q2[i] - q1[i] ** t * q2[i] ** (1.0 - t)
    return scale * acc


def _cccp_simplex_py(pts, w, eps, tol, max_rounds, trace):
    """Primal CCCP rounds for the Shannon generator on the open simplex.

    pts holds the free coordinates (first d of d+1) of n distributions, one
    per row; trace must have max_rounds+1 rows.  Returns the round count.
    """
    n, d = pts.shape
    theta = np.empty(d)
    for j in range(d):
        s = 0.0
        for i in range(n):
            s += w[i] * pts[i, j]
        theta[j] = s
    trace[0] = theta
    acc = np.empty(d)
    rounds = 0
    for r in range(max_rounds):
        for j in range(d):
            acc[j] = 0.0
        for i in range(n):
            sa = 1.0
            sb = 1.0
            for j in range(d):
                sa -= eps * pts[i, j] + (1.0 - eps) * theta[j]
                sb -= (1.0 - eps) * pts[i, j] + eps * theta[j]
            for j in range(d):
                a = eps * pts[i, j] + (1.0 - eps) * theta[j]
                b = (1.0 - eps) * pts[i, j] + eps * theta[j]
                acc[j] += w[i] * ((1.0 - eps) * math.log(a / sa)
                                  + eps * math.log(b / sb))
        se = 1.0
        for j in range(d):
            se += math.exp(acc[j])
        diff = 0.0
        for j in range(d):
            nxt = math.exp(acc[j]) / se
            diff += (nxt - theta[j]) ** 2
            theta[j] = nxt
        rounds = r + 1
        trace[rounds] = theta
        if math.sqrt(diff) < tol:
            break
    return rounds


if USE_NUMBA:
    from numba import njit

    lambert_w0_scalar = njit(cache=True)(_lambert_w0_scalar)

    @njit(cache=True)
    def _lambert_w0_array(x, out):
        for i in range(x.shape[0]):
            out[i] = lambert_w0_scalar(x[i])
        return out

    extended_kl_sum = njit(cache=True)(_extended_kl_sum_py)
    itakura_saito_sum = njit(cache=True)(_itakura_saito_sum_py)
    alpha_div_sum = njit(cache=True)(_alpha_div_sum_py)
    cccp_simplex = njit(cache=True)(_cccp_simplex_py)
else:
    lambert_w0_scalar = _lambert_w0_scalar
    _lambert_w0_array = _lambert_w0_array_py
    extended_kl_sum = _extended_kl_sum_py
    itakura_saito_sum = _itakura_saito_sum_py
    alpha_div_sum = _alpha_div_sum_py
    cccp_simplex = _cccp_simplex_py


def lambert_w0_array(x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty_like(x)
    return _lambert_w0_array(x, out)
