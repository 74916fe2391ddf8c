"""Hot numeric kernels shared by the analysis modules.

Every function here is written in nopython-compatible style: plain loops,
float64 arrays, no Python objects. Under the numba backend they are JIT
compiled (see :mod:`.backend`); under the fallback they run as ordinary
numpy code. Kernels never raise — they return status codes that the public
wrappers turn into exceptions.
"""

import math

import numpy as np

from .backend import maybe_njit

# status codes shared by iterative kernels
OK = 0
NO_CONVERGENCE = 1
SINGULAR = 2

_LANCZOS_G = 7.0
# Lanczos coefficients (g=7, n=9), relative error below 1e-13 on x > 0
_LANCZOS_C = np.array(
    [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ]
)


@maybe_njit()
def lgamma_ln(x: float) -> float:
    """ln Γ(x) for x > 0 via the Lanczos series."""
    if x < 0.5:
        # reflection keeps the series argument above 0.5
        return math.log(math.pi / math.sin(math.pi * x)) - lgamma_ln(1.0 - x)
    z = x - 1.0
    acc = _LANCZOS_C[0]
    for i in range(1, 9):
        acc += _LANCZOS_C[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return 0.5 * math.log(2.0 * math.pi) + (z + 0.5) * math.log(t) - t + math.log(acc)


@maybe_njit()
def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    max_iter = 300
    eps = 1e-15
    fpmin = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < fpmin:
        d = fpmin
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            break
    return h


@maybe_njit()
def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b), absolute error below 1e-10."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = lgamma_ln(a + b) - lgamma_ln(a) - lgamma_ln(b) + a * math.log(x) + b * math.log(1.0 - x)
    front = math.exp(ln_front)
    # symmetry switch keeps the continued fraction in its fast region
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


@maybe_njit()
def student_t_two_sided(t: float, df: float) -> float:
    """Two-sided tail probability of Student's t."""
    if t == 0.0:
        return 1.0
    return betainc_reg(0.5 * df, 0.5, df / (df + t * t))


@maybe_njit()
def f_upper_tail(f: float, df1: float, df2: float) -> float:
    """Upper tail probability of the F distribution."""
    if f <= 0.0:
        return 1.0
    return betainc_reg(0.5 * df2, 0.5 * df1, df2 / (df2 + df1 * f))


@maybe_njit()
def power_iteration_kernel(a, tol: float, max_iter: int):
    """Dominant eigenpair of a strictly positive matrix.

    Returns ``(lam, v, iterations, status)``; ``v`` is L1-normalized and
    positive. Stops when successive normalized iterates differ by at most
    ``tol`` in max-norm and the residual bound ``max|Av - lam v|`` is within
    ``10 * tol * lam``.
    """
    n = a.shape[0]
    v = np.full(n, 1.0 / n)
    lam = 0.0
    for it in range(1, max_iter + 1):
        w = a @ v
        s = w.sum()
        w = w / s
        delta = np.abs(w - v).max()
        v = w
        if delta <= tol:
            av = a @ v
            lam = av.sum() / v.sum()
            resid = np.abs(av - lam * v).max()
            if resid <= 10.0 * tol * lam:
                return lam, v, it, OK
    av = a @ v
    lam = av.sum() / v.sum()
    return lam, v, max_iter, NO_CONVERGENCE


@maybe_njit()
def jacobi_eigh_kernel(a, tol: float, max_sweeps: int):
    """Cyclic Jacobi spectral decomposition of a symmetric matrix.

    Returns ``(values, vectors, status)`` with eigenvectors in columns.
    Rotations repeat until the largest off-diagonal entry falls below
    ``tol * max|A|``.
    """
    n = a.shape[0]
    m = a.copy()
    vecs = np.eye(n)
    scale = np.abs(a).max()
    if scale == 0.0:
        return np.zeros(n), vecs, OK
    thresh = tol * scale
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(m[p, q]) > off:
                    off = abs(m[p, q])
        if off <= thresh:
            return np.diag(m).copy(), vecs, OK
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                if abs(apq) <= thresh * 1e-3:
                    continue
                theta = 0.5 * (m[q, q] - m[p, p]) / apq
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = m[k, p]
                    akq = m[k, q]
                    m[k, p] = c * akp - s * akq
                    m[k, q] = s * akp + c * akq
                for k in range(n):
                    akp = m[p, k]
                    akq = m[q, k]
                    m[p, k] = c * akp - s * akq
                    m[q, k] = s * akp + c * akq
                for k in range(n):
                    vkp = vecs[k, p]
                    vkq = vecs[k, q]
                    vecs[k, p] = c * vkp - s * vkq
                    vecs[k, q] = s * vkp + c * vkq
    return np.diag(m).copy(), vecs, NO_CONVERGENCE


@maybe_njit()
def ols_qr_kernel(x, y):
    """Least squares via Householder QR.

    Returns ``(beta, resid, xtx_inv_diag, dep_col, status)``. ``dep_col``
    names the first design column linearly dependent on its predecessors
    when ``status == SINGULAR``.
    """
    n, p = x.shape
    r = x.copy()
    qty = y.copy()
    col_norms = np.empty(p)
    for j in range(p):
        col_norms[j] = math.sqrt((x[:, j] ** 2).sum())
    for j in range(p):
        # Householder reflection zeroing r[j+1:, j]
        norm = 0.0
        for i in range(j, n):
            norm += r[i, j] * r[i, j]
        norm = math.sqrt(norm)
        if norm <= 1e-12 * max(col_norms[j], 1e-300):
            return np.zeros(p), np.zeros(n), np.zeros(p), j, SINGULAR
        if r[j, j] > 0.0:
            norm = -norm
        u = np.zeros(n - j)
        for i in range(j, n):
            u[i - j] = r[i, j]
        u[0] -= norm
        unorm2 = (u**2).sum()
        if unorm2 > 0.0:
            for col in range(j, p):
                dot = 0.0
                for i in range(j, n):
                    dot += u[i - j] * r[i, col]
                f = 2.0 * dot / unorm2
                for i in range(j, n):
                    r[i, col] -= f * u[i - j]
            dot = 0.0
            for i in range(j, n):
                dot += u[i - j] * qty[i]
            f = 2.0 * dot / unorm2
            for i in range(j, n):
                qty[i] -= f * u[i - j]
        r[j, j] = norm
        # rank check against the original column scale
        if abs(r[j, j]) <= 1e-10 * max(col_norms[j], 1e-300):
            return np.zeros(p), np.zeros(n), np.zeros(p), j, SINGULAR
    # back substitution for beta
    beta = np.zeros(p)
    for i in range(p - 1, -1, -1):
        acc = qty[i]
        for j in range(i + 1, p):
            acc -= r[i, j] * beta[j]
        beta[i] = acc / r[i, i]
    resid = y - x @ beta
    # diag of (X'X)^-1 = row sums of squares of R^-1
    rinv = np.zeros((p, p))
    for i in range(p - 1, -1, -1):
        rinv[i, i] = 1.0 / r[i, i]
        for j in range(i + 1, p):
            acc = 0.0
            for k in range(i + 1, j + 1):
                acc += r[i, k] * rinv[k, j]
            rinv[i, j] = -acc / r[i, i]
    diag = (rinv**2).sum(axis=1)
    return beta, resid, diag, -1, OK
