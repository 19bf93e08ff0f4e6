"""Hot numerical loops, jitted with numba when available.

Setting ``ERGOPULSE_NO_NUMBA=1`` in the environment (or a failed numba
import) selects the pure-numpy lane.  The same function bodies run in
either lane, so both produce identical results up to floating-point
roundoff; only the compilation differs.  ``benchmarks/bench_kernels.py``
times the two lanes against each other.
"""

from __future__ import annotations

import os

import numpy as np


def _numba_disabled() -> bool:
    flag = os.environ.get("ERGOPULSE_NO_NUMBA", "")
    return flag.strip().lower() in {"1", "true", "yes", "on"}


try:
    if _numba_disabled():
        raise ImportError("numba disabled via ERGOPULSE_NO_NUMBA")
    from numba import njit

    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False

    def njit(*args, **kwargs):  # no-op stand-in with the same call shapes
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


def backend() -> str:
    """Name of the active kernel lane, either "numba" or "numpy"."""
    return "numba" if NUMBA_ENABLED else "numpy"


def python_lane(fn):
    """The uncompiled version of a kernel (the kernel itself on the numpy lane)."""
    return getattr(fn, "py_func", fn)


# Polar-correct the running unitary power this often; drift over 1e5
# multiplications is otherwise visible in the last few digits.
RENORM_EVERY = 1024


@njit(cache=True)
def conj_weighted_sum(u, x, w):
    """sum of w[k-1] * u^k x (u^k)* over k = 1..len(w).

    The running power and its adjoint are tracked incrementally instead of
    recomputing u^k, and the power is re-unitarized (polar correction via
    SVD) every RENORM_EVERY steps.
    """
    d = u.shape[0]
    uh = np.ascontiguousarray(np.conj(u).T)
    p = np.eye(d, dtype=np.complex128)
    q = np.eye(d, dtype=np.complex128)
    acc = np.zeros((d, d), dtype=np.complex128)
    for k in range(w.shape[0]):
        p = np.dot(u, p)
        q = np.dot(q, uh)
        if (k + 1) % RENORM_EVERY == 0:
            left, _sig, right = np.linalg.svd(p)
            p = np.ascontiguousarray(np.dot(left, right))
            q = np.ascontiguousarray(np.conj(p).T)
        acc += w[k] * np.dot(np.dot(p, x), q)
    return acc


@njit(cache=True)
def chain_product(u, factors, idx):
    """Left-to-right product u.factors[idx[0]].u.factors[idx[1]]...."""
    d = u.shape[0]
    out = np.eye(d, dtype=np.complex128)
    for k in range(idx.shape[0]):
        out = np.dot(out, u)
        out = np.dot(out, factors[idx[k]])
    return out


# Degree-13 diagonal Pade coefficients and the matching 1-norm threshold.
_PADE13 = np.array(
    [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ]
)
_THETA13 = 5.371920351148152


@njit(cache=True)
def expm_pade13(a):
    """Matrix exponential by scaling and squaring around the degree-13
    diagonal rational approximant."""
    d = a.shape[0]
    b = _PADE13
    eye = np.eye(d, dtype=np.complex128)
    norm1 = 0.0
    for j in range(d):
        col = 0.0
        for i in range(d):
            col += abs(a[i, j])
        if col > norm1:
            norm1 = col
    squarings = 0
    if norm1 > _THETA13:
        squarings = int(np.ceil(np.log2(norm1 / _THETA13)))
    m = a / (2.0**squarings)
    m2 = np.dot(m, m)
    m4 = np.dot(m2, m2)
    m6 = np.dot(m2, m4)
    odd = np.dot(m6, b[13] * m6 + b[11] * m4 + b[9] * m2)
    odd = odd + b[7] * m6 + b[5] * m4 + b[3] * m2 + b[1] * eye
    odd = np.dot(m, odd)
    even = np.dot(m6, b[12] * m6 + b[10] * m4 + b[8] * m2)
    even = even + b[6] * m6 + b[4] * m4 + b[2] * m2 + b[0] * eye
    r = np.ascontiguousarray(np.linalg.solve(even - odd, even + odd))
    for _ in range(squarings):
        r = np.dot(r, r)
    return r


@njit(cache=True)
def simplex_project(v):
    """Euclidean projection onto the probability simplex (sort and threshold)."""
    n = v.shape[0]
    mu = np.sort(v)[::-1]
    csum = 0.0
    theta = 0.0
    for i in range(n):
        csum += mu[i]
        t = (csum - 1.0) / (i + 1.0)
        if mu[i] - t > 0.0:
            theta = t
    w = v - theta
    for i in range(n):
        if w[i] < 0.0:
            w[i] = 0.0
    return w


@njit(cache=True)
def tv_value(w):
    """w_1 + sum_i |w_{i+1} - w_i| + w_n."""
    v = w[0] + w[w.shape[0] - 1]
    for i in range(w.shape[0] - 1):
        v += abs(w[i + 1] - w[i])
    return v


@njit(cache=True)
def tv_descent(w0, step_scale, max_iters, step_tol):
    """Projected subgradient descent for tv_value with step_scale/k steps.

    Uses sign(0) = 0 for the kink subgradient and clips weights into
    [0, 1 - 1e-12] so every iterate is a valid schedule row.  Returns
    (best_point, best_value, iterations, smallest_value_seen).
    """
    n = w0.shape[0]
    w = simplex_project(w0.copy())
    for i in range(n):
        if w[i] > 1.0 - 1e-12:
            w[i] = 1.0 - 1e-12
    best = w.copy()
    best_v = tv_value(w)
    min_seen = best_v
    iters = 0
    g = np.empty(n, dtype=np.float64)
    for k in range(1, max_iters + 1):
        iters = k
        for i in range(n):
            g[i] = 0.0
        g[0] += 1.0
        g[n - 1] += 1.0
        for i in range(n - 1):
            diff = w[i + 1] - w[i]
            if diff > 0.0:
                g[i + 1] += 1.0
                g[i] -= 1.0
            elif diff < 0.0:
                g[i + 1] -= 1.0
                g[i] += 1.0
        w_new = simplex_project(w - (step_scale / k) * g)
        for i in range(n):
            if w_new[i] > 1.0 - 1e-12:
                w_new[i] = 1.0 - 1e-12
        v = tv_value(w_new)
        if v < min_seen:
            min_seen = v
        if v < best_v:
            best_v = v
            best[:] = w_new
        moved = 0.0
        for i in range(n):
            delta = abs(w_new[i] - w[i])
            if delta > moved:
                moved = delta
        w = w_new
        if moved < step_tol:
            break
    return best, best_v, iters, min_seen
