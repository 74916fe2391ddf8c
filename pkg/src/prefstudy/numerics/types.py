"""Shared numeric value types."""

from dataclasses import dataclass, field

import numpy as np


class NumericsError(Exception):
    """Base class for numeric-kernel failures."""


class DomainError(NumericsError, ValueError):
    """Argument outside the mathematical domain of an operation."""


@dataclass(frozen=True)
class SymMatrix:
    """Symmetric real matrix (full storage, symmetry enforced on build)."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.values, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DomainError(f"symmetric matrix must be square and non-empty, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise DomainError("symmetric matrix contains non-finite entries")
        scale = max(np.abs(a).max(), 1.0)
        if np.abs(a - a.T).max() > 1e-9 * scale:
            raise DomainError("matrix is not symmetric")
        object.__setattr__(self, "values", (a + a.T) / 2.0)

    @property
    def order(self) -> int:
        return self.values.shape[0]

    def entry(self, i: int, j: int) -> float:
        return float(self.values[i, j])
