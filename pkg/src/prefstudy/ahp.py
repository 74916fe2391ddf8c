"""Pairwise judgment capture, priority derivation and consistency diagnostics.

Judgments use the classic 1-9 bipolar intensity scale: 9 = extreme
preference, 7 = very strong, 5 = strong, 3 = moderate, 1 = indifference.
The even intermediate grades 2/4/6/8 are accepted by the data format even
though the questionnaire itself only offers the five verbal anchors.
"""

from dataclasses import dataclass, field

import numpy as np

from .numerics import power_iteration

# random consistency index for reciprocal matrices of order 1..10
RANDOM_INDEX = (0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45, 1.49)

#: the nine cells of the bipolar grading row, left to right:
#: (intensity, favored) with the middle cell meaning indifference
BIPOLAR_SCALE = (
    (9, "left"),
    (7, "left"),
    (5, "left"),
    (3, "left"),
    (1, "none"),
    (3, "right"),
    (5, "right"),
    (7, "right"),
    (9, "right"),
)

SCALE_ANCHORS = ("extreme", "very strong", "strong", "moderate", "none")


class JudgmentError(ValueError):
    """Invalid or inconsistent judgment input."""


class IncompleteJudgmentsError(JudgmentError):
    def __init__(self, missing):
        self.missing = sorted(missing)
        super().__init__(f"missing judgments for pairs: {self.missing}")


class DuplicateJudgmentError(JudgmentError):
    def __init__(self, pair):
        self.pair = pair
        super().__init__(f"duplicate judgment for pair {pair}")


@dataclass(frozen=True)
class SaatyGrade:
    """One questionnaire answer: which side is favored and how strongly."""

    intensity: int
    favored: str  # "left" | "right" | "none"

    def __post_init__(self):
        if self.favored not in ("left", "right", "none"):
            raise JudgmentError(f"favored must be left/right/none, got {self.favored!r}")
        if not (isinstance(self.intensity, int) and 1 <= self.intensity <= 9):
            raise JudgmentError(f"intensity must be an integer in 1..9, got {self.intensity!r}")
        if (self.favored == "none") != (self.intensity == 1):
            raise JudgmentError("indifference (favored='none') holds exactly when intensity == 1")


@dataclass(frozen=True)
class PairwiseMatrix:
    """Positive reciprocal judgment matrix with a_ii = 1 and a_ji = 1/a_ij."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.values, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise JudgmentError(f"pairwise matrix must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)) or not np.all(a > 0.0):
            raise JudgmentError("pairwise matrix entries must be positive and finite")
        if np.abs(np.diag(a) - 1.0).max() > 1e-9 or np.abs(a * a.T - 1.0).max() > 1e-9:
            raise JudgmentError("matrix is not reciprocal with unit diagonal")
        # snap to exact reciprocity: lower triangle recomputed from the upper
        b = a.copy()
        n = a.shape[0]
        for i in range(n):
            b[i, i] = 1.0
            for j in range(i + 1, n):
                b[j, i] = 1.0 / b[i, j]
        object.__setattr__(self, "values", b)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def check_reciprocity(self, tol: float = 1e-12) -> None:
        prod = self.values * self.values.T
        if np.abs(prod - 1.0).max() > tol:
            raise JudgmentError("reciprocity violated beyond tolerance")


@dataclass(frozen=True)
class PriorityVector:
    """Relative preference weights, strictly positive, summing to one."""

    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size < 1:
            raise JudgmentError("weights must be a non-empty vector")
        if not np.all(w > 0.0):
            raise JudgmentError("weights must be strictly positive")
        if abs(w.sum() - 1.0) > 1e-12:
            raise JudgmentError(f"weights must sum to 1, got {w.sum()!r}")
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.weights.size


@dataclass(frozen=True)
class ConsistencyReport:
    lambda_max: float
    ci: float
    ri: float
    cr: float
    acceptable_at_0_1: bool
    acceptable_at_0_2: bool
    cr_defined: bool  # False for n < 3, where CR is reported as 0


def matrix_from_judgments(n: int, judgments) -> PairwiseMatrix:
    """Build the reciprocal matrix from one grade per unordered item pair.

    ``judgments`` is an iterable of ``(i, j, SaatyGrade)`` with ``favored``
    naming the side (``left`` = item i, ``right`` = item j).
    """
    if n < 1:
        raise JudgmentError(f"need at least one item, got n={n}")
    a = np.ones((n, n))
    seen = set()
    for i, j, grade in judgments:
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise JudgmentError(f"invalid pair ({i}, {j}) for n={n}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise DuplicateJudgmentError(key)
        seen.add(key)
        if grade.favored == "left":
            a[i, j] = float(grade.intensity)
        elif grade.favored == "right":
            a[i, j] = 1.0 / float(grade.intensity)
        else:
            a[i, j] = 1.0
        a[j, i] = 1.0 / a[i, j]
    expected = {(i, j) for i in range(n) for j in range(i + 1, n)}
    missing = expected - seen
    if missing:
        raise IncompleteJudgmentsError(missing)
    return PairwiseMatrix(a)


def consistency_report(lambda_max: float, n: int) -> ConsistencyReport:
    if n > len(RANDOM_INDEX):
        raise JudgmentError(f"no random-index value for n={n} (max {len(RANDOM_INDEX)})")
    if n >= 3:
        ci = (lambda_max - n) / (n - 1)
        ri = RANDOM_INDEX[n - 1]
        cr = ci / ri
        defined = True
    else:
        # 1x1 and 2x2 reciprocal matrices are always consistent
        ci = 0.0 if n == 1 else (lambda_max - n) / (n - 1)
        ri = 0.0
        cr = 0.0
        defined = False
    return ConsistencyReport(
        lambda_max=float(lambda_max),
        ci=float(ci),
        ri=float(ri),
        cr=float(cr),
        acceptable_at_0_1=cr <= 0.1,
        acceptable_at_0_2=cr <= 0.2,
        cr_defined=defined,
    )


def ev_priorities(m: PairwiseMatrix) -> tuple[PriorityVector, ConsistencyReport]:
    """Priorities from the principal eigenvector, normalized to unit sum."""
    m.check_reciprocity()
    if m.n == 1:
        return PriorityVector(np.array([1.0])), consistency_report(1.0, 1)
    pair = power_iteration(m.values)
    w = pair.vector / pair.vector.sum()
    return PriorityVector(w), consistency_report(pair.value, m.n)


def llsm_priorities(m: PairwiseMatrix) -> PriorityVector:
    """Logarithmic least squares priorities: normalized row geometric means."""
    m.check_reciprocity()
    logs = np.log(m.values)
    w = np.exp(logs.mean(axis=1))
    return PriorityVector(w / w.sum())


@dataclass(frozen=True)
class CrFilterResult:
    retained: tuple
    excluded: tuple

    @property
    def n_excluded(self) -> int:
        return len(self.excluded)


def filter_by_cr(records, cutoff: float) -> CrFilterResult:
    """Split ``(subject, ConsistencyReport)`` pairs at a consistency-ratio cutoff."""
    if not cutoff > 0.0:
        raise JudgmentError(f"cutoff must be positive, got {cutoff}")
    retained, excluded = [], []
    for subject, report in records:
        (retained if report.cr <= cutoff else excluded).append(subject)
    return CrFilterResult(retained=tuple(retained), excluded=tuple(excluded))
