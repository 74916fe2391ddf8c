"""Maximum-likelihood factor extraction, rotations, hierarchical decomposition.

Extraction operates on correlation matrices. The ML fit alternates the
conditionally optimal loadings (from the spectral decomposition of
``psi^-1/2 R psi^-1/2``) with the variance-matching uniqueness update
``psi = diag(R - LL')``; the fixed point satisfies the likelihood
first-order conditions. Varimax is the classic pairwise-angle sweep with
optional Kaiser row normalization. Oblique rotation minimizes the direct
oblimin criterion by gradient projection, starting from the normalized
varimax orientation. The hierarchical step extracts one general factor from
the primary-factor correlations and residualizes the primaries against it.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import SymMatrix, sym_eigen

HEYWOOD_FLOOR = 0.005


class FactorError(ValueError):
    pass


@dataclass(frozen=True)
class FactorSolution:
    k: int
    loadings: np.ndarray = field(repr=False)  # variables x k
    uniquenesses: np.ndarray = field(repr=False)
    converged: bool = True
    iterations: int = 0
    heywood: bool = False
    discrepancy: float = 0.0

    @property
    def communalities(self) -> np.ndarray:
        return (self.loadings**2).sum(axis=1)

    @property
    def variance_explained(self) -> np.ndarray:
        return (self.loadings**2).sum(axis=0) / self.loadings.shape[0]


@dataclass(frozen=True)
class ObliqueSolution:
    pattern: np.ndarray = field(repr=False)  # variables x k
    phi: np.ndarray = field(repr=False)  # k x k factor correlations
    converged: bool = True

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        if np.abs(phi - phi.T).max() > 1e-9 or np.abs(np.diag(phi) - 1.0).max() > 1e-9:
            raise FactorError("factor correlation matrix must be symmetric with unit diagonal")
        if min(p.value for p in sym_eigen(phi)) < -1e-9:
            raise FactorError("factor correlation matrix must be positive semidefinite")


@dataclass(frozen=True)
class HierarchicalSolution:
    secondary: np.ndarray = field(repr=False)  # variables, general-factor loadings
    primaries: np.ndarray = field(repr=False)  # variables x k, residualized
    general_loadings: np.ndarray = field(repr=False)  # k, of primaries on the general factor


def _check_correlation(corr: SymMatrix) -> np.ndarray:
    r = corr.values
    if np.abs(np.diag(r) - 1.0).max() > 1e-6:
        raise FactorError("extraction expects a correlation matrix (unit diagonal)")
    if np.abs(r).max() > 1.0 + 1e-6:
        raise FactorError("correlation entries must lie in [-1, 1]")
    return r


def _top_eigen(a: np.ndarray, k: int):
    pairs = sym_eigen(a)[:k]
    theta = np.array([p.value for p in pairs])
    vecs = np.column_stack([p.vector for p in pairs])
    return theta, vecs


def ml_extract(
    corr: SymMatrix,
    k: int,
    tol: float = 1e-12,
    max_iter: int = 5000,
    psi_tol: float = 1e-9,
) -> FactorSolution:
    """Maximum-likelihood extraction of ``k`` factors from a correlation matrix.

    Iterates until the discrepancy ``ln|S_model| + tr(R S_model^-1) - ln|R| - p``
    changes by less than ``tol`` and the uniquenesses move by less than
    ``psi_tol`` (the discrepancy is flat near the optimum, so the parameter
    criterion is what actually pins the loadings). Uniquenesses heading to
    zero are clamped at ``HEYWOOD_FLOOR`` and the solution is flagged, not
    rejected.
    """
    r = _check_correlation(corr)
    p = r.shape[0]
    if not 1 <= k < p:
        raise FactorError(f"factor count must satisfy 1 <= k < {p}, got {k}")
    off = np.abs(r - np.diag(np.diag(r)))
    psi = np.clip(1.0 - off.max(axis=0), HEYWOOD_FLOOR, None)
    # rounded published inputs are often singular or slightly indefinite;
    # the iteration only needs the model covariance to stay definite, and
    # log|det R| is a constant offset of the discrepancy either way
    _, logdet_r = np.linalg.slogdet(r)
    lam = np.zeros((p, k))
    last = math.inf
    heywood = False
    converged = False
    iterations = 0
    disc = math.inf
    for iterations in range(1, max_iter + 1):
        isq = 1.0 / np.sqrt(psi)
        theta, vecs = _top_eigen(r * np.outer(isq, isq), k)
        lam = np.sqrt(psi)[:, None] * vecs * np.sqrt(np.clip(theta - 1.0, 0.0, None))[None, :]
        raw_psi = 1.0 - (lam**2).sum(axis=1)
        if np.any(raw_psi < HEYWOOD_FLOOR):
            heywood = True
        psi_new = np.clip(raw_psi, HEYWOOD_FLOOR, None)
        psi_step = float(np.abs(psi_new - psi).max())
        psi = psi_new
        sigma = lam @ lam.T + np.diag(psi)
        sign_m, logdet_m = np.linalg.slogdet(sigma)
        disc = logdet_m + float(np.trace(np.linalg.solve(sigma, r))) - logdet_r - p
        if abs(last - disc) < tol and psi_step < psi_tol:
            converged = True
            break
        last = disc
    # deterministic orientation: largest-|loading| entry of each factor positive
    for j in range(k):
        col = lam[:, j]
        if col[np.argmax(np.abs(col))] < 0:
            lam[:, j] = -col
    return FactorSolution(
        k=k,
        loadings=lam,
        uniquenesses=psi,
        converged=converged,
        iterations=iterations,
        heywood=heywood,
        discrepancy=float(disc),
    )


def varimax(solution: FactorSolution, kaiser_normalize: bool = True) -> FactorSolution:
    """Pairwise-rotation varimax; Kaiser normalization scales rows to unit
    communality during rotation. Communalities are invariant."""
    if solution.k < 2:
        return solution
    lam = rotate_varimax(solution.loadings, kaiser_normalize)
    return FactorSolution(
        k=solution.k,
        loadings=lam,
        uniquenesses=solution.uniquenesses,
        converged=solution.converged,
        iterations=solution.iterations,
        heywood=solution.heywood,
        discrepancy=solution.discrepancy,
    )


def rotate_varimax(loadings: np.ndarray, kaiser_normalize: bool = True,
                   tol: float = 1e-12, max_sweeps: int = 200) -> np.ndarray:
    lam = np.array(loadings, dtype=float)
    p, k = lam.shape
    if k < 2:
        return lam
    h = np.sqrt((lam**2).sum(axis=1))
    if kaiser_normalize:
        scale = np.where(h > 0, h, 1.0)
        lam = lam / scale[:, None]
    for _ in range(max_sweeps):
        total = 0.0
        for a in range(k - 1):
            for b in range(a + 1, k):
                x = lam[:, a]
                y = lam[:, b]
                u = x**2 - y**2
                v = 2.0 * x * y
                big_a = u.sum()
                big_b = v.sum()
                num = (2.0 * u * v).sum() - 2.0 * big_a * big_b / p
                den = (u**2 - v**2).sum() - (big_a**2 - big_b**2) / p
                angle = 0.25 * math.atan2(num, den)
                if abs(angle) < 1e-15:
                    continue
                total += abs(angle)
                c, s = math.cos(angle), math.sin(angle)
                lam[:, a], lam[:, b] = c * x + s * y, -s * x + c * y
        if total < tol:
            break
    if kaiser_normalize:
        lam = lam * scale[:, None]
    for j in range(k):
        if lam[np.argmax(np.abs(lam[:, j])), j] < 0:
            lam[:, j] = -lam[:, j]
    return lam


def variance_explained(solution: FactorSolution) -> np.ndarray:
    """Fraction of total variance carried by each factor (loadings squared / p)."""
    return solution.variance_explained


def oblique_rotate(
    solution: FactorSolution,
    gamma: float = 0.0,
    eps: float = 1e-6,
    max_iter: int = 2000,
) -> ObliqueSolution:
    """Direct-oblimin rotation by gradient projection (``gamma=0`` is quartimin).

    The search starts from the normalized-varimax orientation, which makes
    the result deterministic and avoids the poor local minima reachable from
    the unrotated loadings.
    """
    if solution.k < 2:
        raise FactorError("oblique rotation needs at least two factors")
    a = rotate_varimax(solution.loadings, kaiser_normalize=True)
    p, k = a.shape
    n_off = np.ones((k, k)) - np.eye(k)

    def criterion(loads):
        l2 = loads**2
        x = l2 @ n_off
        if gamma != 0.0:
            x = x - gamma * np.full((p, p), 1.0 / p) @ l2 @ n_off
        return float(np.sum(l2 * x)) / 4.0, loads * x

    t = np.eye(k)
    ti = np.linalg.inv(t)
    pattern = a @ ti.T
    f, grad_q = criterion(pattern)
    grad_t = -(pattern.T @ grad_q @ ti).T
    step = 1.0
    converged = False
    for _ in range(max_iter):
        proj = grad_t - t @ np.diag((t * grad_t).sum(axis=0))
        s = math.sqrt(float((proj**2).sum()))
        if s < eps:
            converged = True
            break
        step *= 2.0
        ft, tt = f, t
        for _ in range(40):
            x = t - step * proj
            norms = np.sqrt((x**2).sum(axis=0))
            if np.any(norms <= 1e-12):
                step /= 2.0
                continue
            cand = x / norms[None, :]
            try:
                cand_inv = np.linalg.inv(cand)
            except np.linalg.LinAlgError:
                step /= 2.0
                continue
            loads = a @ cand_inv.T
            ft, grad_q = criterion(loads)
            if ft < f - 0.5 * s**2 * step:
                tt = cand
                ti = cand_inv
                pattern = loads
                break
            step /= 2.0
        t = tt
        f = ft
        grad_t = -(pattern.T @ grad_q @ ti).T
    phi = t.T @ t
    # orient factors so each pattern column's dominant loading is positive
    signs = np.ones(k)
    for j in range(k):
        if pattern[np.argmax(np.abs(pattern[:, j])), j] < 0:
            signs[j] = -1.0
    pattern = pattern * signs[None, :]
    phi = phi * np.outer(signs, signs)
    np.fill_diagonal(phi, 1.0)
    return ObliqueSolution(pattern=pattern, phi=phi, converged=converged)


def _general_loadings(phi: np.ndarray) -> np.ndarray:
    """One-factor loadings of the primaries on a general factor.

    For two or three primaries the one-factor model fits the off-diagonal
    correlations exactly (closed form); larger k falls back to iterative ML.
    """
    k = phi.shape[0]
    if k == 2:
        c = phi[0, 1]
        g0 = math.sqrt(abs(c))
        return np.array([g0, math.copysign(g0, c) if c != 0 else 0.0])
    if k == 3:
        c12, c13, c23 = phi[0, 1], phi[0, 2], phi[1, 2]
        if abs(c12 * c13 * c23) > 1e-12 and c12 * c13 * c23 > 0:
            g1 = math.sqrt(c12 * c13 / c23)
            if g1 <= 1.0:
                return np.array([g1, c12 / g1, c13 / g1])
        # inconsistent or degenerate triple: fall through to iterative ML
    sol = ml_extract(SymMatrix(phi), 1, tol=1e-14, max_iter=20000)
    return sol.loadings[:, 0].copy()


def schmid_leiman(oblique: ObliqueSolution) -> HierarchicalSolution:
    """Re-express correlated primaries as one general factor plus residual primaries.

    ``secondary = pattern @ g`` and ``primaries = pattern * sqrt(1 - g^2)``,
    so the implied common variance ``pattern @ phi @ pattern'`` is preserved
    whenever the general factor reproduces ``phi``.
    """
    phi = oblique.phi
    if phi.shape[0] < 2:
        raise FactorError("hierarchical decomposition needs at least two primaries")
    g = _general_loadings(phi)
    g = np.clip(g, -1.0, 1.0)
    secondary = oblique.pattern @ g
    primaries = oblique.pattern * np.sqrt(1.0 - g**2)[None, :]
    if secondary[np.argmax(np.abs(secondary))] < 0:
        secondary = -secondary
        g = -g
    return HierarchicalSolution(secondary=secondary, primaries=primaries, general_loadings=g)


def loading_tier(value: float, cutoff: float = 0.4, high: float = 0.6) -> int:
    """Display tier used in loading tables: 2 = high, 1 = salient, 0 = suppressed."""
    v = abs(value)
    if v >= high:
        return 2
    if v >= cutoff:
        return 1
    return 0


def align_columns(candidate: np.ndarray, reference: np.ndarray):
    """Best match of candidate columns to reference up to permutation and sign.

    Returns ``(aligned, max_abs_diff)``. Rotation leaves column order and
    signs arbitrary, so comparisons of loading matrices go through this.
    """
    if candidate.shape != reference.shape:
        raise FactorError("shape mismatch in column alignment")
    k = reference.shape[1]
    best = None
    for perm in itertools.permutations(range(k)):
        m = candidate[:, list(perm)].copy()
        for j in range(k):
            if np.sum((m[:, j] - reference[:, j]) ** 2) > np.sum((m[:, j] + reference[:, j]) ** 2):
                m[:, j] = -m[:, j]
        diff = float(np.abs(m - reference).max())
        if best is None or diff < best[1]:
            best = (m, diff)
    return best
