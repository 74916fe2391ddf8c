"""Ordinary least squares with the usual inference statistics."""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .special import f_tail, t_tail
from .types import DomainError, NumericsError


class SingularDesignError(NumericsError, ValueError):
    """Design matrix is rank deficient; names the dependent column."""

    def __init__(self, column: int):
        super().__init__(f"design column {column} is linearly dependent on earlier columns")
        self.column = column


@dataclass(frozen=True)
class OlsFit:
    coefficients: np.ndarray = field(repr=False)
    std_errors: np.ndarray = field(repr=False)
    t_stats: np.ndarray = field(repr=False)
    p_values: np.ndarray = field(repr=False)
    r_squared: float
    adj_r_squared: float
    f_stat: float
    f_p: float
    residuals: np.ndarray = field(repr=False)
    df_error: int


def ols(design, response, *, has_intercept: bool = True) -> OlsFit:
    """Fit ``response ~ design`` by Householder-QR least squares.

    When ``has_intercept`` is true the first design column is treated as the
    constant term: R-squared uses the centered total sum of squares and the
    overall F statistic tests all remaining coefficients jointly.
    """
    x = np.ascontiguousarray(design, dtype=float)
    y = np.ascontiguousarray(response, dtype=float)
    if x.ndim != 2:
        raise DomainError(f"design must be 2-D, got shape {x.shape}")
    n, p = x.shape
    if y.shape != (n,):
        raise DomainError(f"response length {y.shape} does not match {n} design rows")
    if n <= p:
        raise DomainError(f"need more observations than parameters, got n={n}, p={p}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DomainError("design/response contain non-finite values")

    beta, resid, xtx_inv_diag, dep_col, status = kernels.ols_qr_kernel(x, y)
    if status == kernels.SINGULAR:
        raise SingularDesignError(int(dep_col))
    beta = np.asarray(beta)
    resid = np.asarray(resid)
    xtx_inv_diag = np.asarray(xtx_inv_diag)

    df_error = n - p
    rss = float(resid @ resid)
    if has_intercept:
        tss = float(((y - y.mean()) ** 2).sum())
        q = p - 1
    else:
        tss = float((y**2).sum())
        q = p
    s2 = rss / df_error
    se = np.sqrt(s2 * xtx_inv_diag)

    with np.errstate(divide="ignore", invalid="ignore"):
        t_stats = np.where(se > 0.0, beta / np.where(se > 0.0, se, 1.0), np.where(beta == 0.0, 0.0, np.inf * np.sign(beta)))
    p_values = np.array([t_tail(t, df_error) if np.isfinite(t) else 0.0 for t in t_stats])

    if tss > 0.0:
        r2 = 1.0 - rss / tss
    else:
        r2 = 1.0  # constant response reproduced exactly
    r2 = min(max(r2, 0.0), 1.0)
    if df_error > 0 and n - 1 > 0:
        adj = 1.0 - (1.0 - r2) * (n - 1) / df_error
    else:
        adj = r2

    if q >= 1:
        if rss > 1e-24 * max(tss, 1e-300):
            f_stat = ((tss - rss) / q) / (rss / df_error)
            f_stat = max(f_stat, 0.0)
            f_p = f_tail(f_stat, q, df_error)
        else:  # response reproduced to rounding; report an exact fit
            f_stat = float("inf")
            f_p = 0.0
    else:
        f_stat = 0.0
        f_p = 1.0

    return OlsFit(
        coefficients=beta,
        std_errors=se,
        t_stats=t_stats,
        p_values=p_values,
        r_squared=float(r2),
        adj_r_squared=float(adj),
        f_stat=float(f_stat),
        f_p=float(f_p),
        residuals=resid,
        df_error=df_error,
    )
