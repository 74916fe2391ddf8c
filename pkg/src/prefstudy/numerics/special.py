"""Distribution tail probabilities via the regularized incomplete beta."""

from . import kernels
from .types import DomainError


def ln_gamma(x: float) -> float:
    """Natural log of the gamma function, x > 0."""
    if x <= 0.0:
        raise DomainError(f"ln_gamma requires x > 0, got {x}")
    return float(kernels.lgamma_ln(float(x)))


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0.0 or b <= 0.0:
        raise DomainError(f"betainc requires a, b > 0, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"betainc requires 0 <= x <= 1, got {x}")
    return float(kernels.betainc_reg(float(a), float(b), float(x)))


def t_tail(t: float, df: int) -> float:
    """Two-sided p-value of a Student-t statistic with df degrees of freedom."""
    if df < 1:
        raise DomainError(f"t_tail requires df >= 1, got {df}")
    return float(kernels.student_t_two_sided(float(t), float(df)))


def f_tail(f: float, df1: int, df2: int) -> float:
    """Upper-tail p-value of an F statistic with (df1, df2) degrees of freedom."""
    if df1 < 1 or df2 < 1:
        raise DomainError(f"f_tail requires df1, df2 >= 1, got ({df1}, {df2})")
    if f < 0.0:
        raise DomainError(f"f_tail requires f >= 0, got {f}")
    return float(kernels.f_upper_tail(float(f), float(df1), float(df2)))
