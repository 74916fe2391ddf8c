"""Eigensolvers: power iteration for positive matrices, cyclic Jacobi for symmetric ones."""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .types import DomainError, NumericsError, SymMatrix


@dataclass(frozen=True)
class EigenPair:
    value: float
    vector: np.ndarray = field(repr=False)  # unit Euclidean norm


class ConvergenceError(NumericsError):
    """Iteration budget exhausted; carries the last iterate."""

    def __init__(self, message: str, last_value: float, last_vector: np.ndarray, iterations: int):
        super().__init__(message)
        self.last_value = last_value
        self.last_vector = last_vector
        self.iterations = iterations


def power_iteration(matrix, tol: float = 1e-12, max_iter: int = 10000) -> EigenPair:
    """Dominant eigenpair of a strictly positive square matrix.

    Strict positivity guarantees a simple dominant eigenvalue with a positive
    eigenvector, so plain power iteration converges; iteration stops when
    successive sum-normalized iterates differ by at most ``tol`` in max-norm.
    """
    a = np.ascontiguousarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"power_iteration requires a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix contains non-finite entries")
    if not np.all(a > 0.0):
        raise DomainError("power_iteration requires strictly positive entries")
    if tol <= 0.0:
        raise DomainError(f"tol must be positive, got {tol}")
    lam, v, iters, status = kernels.power_iteration_kernel(a, float(tol), int(max_iter))
    if status != kernels.OK:
        raise ConvergenceError(
            f"power iteration did not converge in {max_iter} iterations",
            float(lam),
            np.asarray(v),
            int(iters),
        )
    v = np.asarray(v)
    return EigenPair(value=float(lam), vector=v / np.linalg.norm(v))


def sym_eigen(matrix) -> list[EigenPair]:
    """Full spectral decomposition of a symmetric matrix, descending by eigenvalue."""
    sym = matrix if isinstance(matrix, SymMatrix) else SymMatrix(np.asarray(matrix, dtype=float))
    a = np.ascontiguousarray(sym.values)
    vals, vecs, status = kernels.jacobi_eigh_kernel(a, 1e-14, 64)
    if status != kernels.OK:
        raise ConvergenceError("Jacobi sweeps did not reduce off-diagonal mass", 0.0, np.asarray(vals), 64)
    vals = np.asarray(vals)
    vecs = np.asarray(vecs)
    if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(vecs))):
        raise NumericsError("eigendecomposition overflowed")
    order = np.argsort(vals)[::-1]
    return [EigenPair(value=float(vals[i]), vector=vecs[:, i].copy()) for i in order]
