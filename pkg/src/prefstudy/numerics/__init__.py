"""Deterministic numerical kernel: special functions, eigensolvers, least squares."""

from .backend import BACKEND, NUMBA_ENABLED
from .eigen import ConvergenceError, EigenPair, power_iteration, sym_eigen
from .ols import OlsFit, SingularDesignError, ols
from .special import betainc, f_tail, ln_gamma, t_tail
from .types import DomainError, NumericsError, SymMatrix

__all__ = [
    "BACKEND",
    "NUMBA_ENABLED",
    "ConvergenceError",
    "DomainError",
    "EigenPair",
    "NumericsError",
    "OlsFit",
    "SingularDesignError",
    "SymMatrix",
    "betainc",
    "f_tail",
    "ln_gamma",
    "ols",
    "power_iteration",
    "sym_eigen",
    "t_tail",
]
