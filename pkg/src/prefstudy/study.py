"""Study definitions, per-subject records and descriptive statistics."""

import itertools
from dataclasses import dataclass, field

import numpy as np

from .ahp import ConsistencyReport, PriorityVector
from .numerics import SymMatrix


class StudyError(ValueError):
    pass


@dataclass(frozen=True)
class Factor:
    name: str
    levels: tuple[str, ...]

    def __post_init__(self):
        if len(self.levels) < 2:
            raise StudyError(f"factor {self.name!r} needs at least two levels")
        if len(set(self.levels)) != len(self.levels):
            raise StudyError(f"factor {self.name!r} has duplicate levels")


@dataclass(frozen=True)
class Profile:
    label: str
    level_indices: tuple[int, ...]  # one level index per factor, design order


@dataclass(frozen=True)
class StudyDesign:
    """Factors, levels and the profile set under comparison."""

    factors: tuple[Factor, ...]
    profiles: tuple[Profile, ...]
    name: str = ""

    def __post_init__(self):
        labels = [p.label for p in self.profiles]
        if len(set(labels)) != len(labels):
            raise StudyError("profile labels must be unique")
        for p in self.profiles:
            if len(p.level_indices) != len(self.factors):
                raise StudyError(f"profile {p.label!r} does not index every factor")
            for f, ix in zip(self.factors, p.level_indices):
                if not 0 <= ix < len(f.levels):
                    raise StudyError(f"profile {p.label!r} has invalid level for factor {f.name!r}")

    @property
    def n_items(self) -> int:
        return len(self.profiles)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(p.label for p in self.profiles)

    @property
    def is_full_factorial(self) -> bool:
        got = {p.level_indices for p in self.profiles}
        want = set(itertools.product(*(range(len(f.levels)) for f in self.factors)))
        return got == want

    def factor(self, name: str) -> Factor:
        for f in self.factors:
            if f.name == name:
                return f
        raise StudyError(f"unknown factor {name!r}")

    def level_of(self, profile: Profile, factor_name: str) -> str:
        for i, f in enumerate(self.factors):
            if f.name == factor_name:
                return f.levels[profile.level_indices[i]]
        raise StudyError(f"unknown factor {factor_name!r}")

    @classmethod
    def full_factorial(cls, factors, name: str = "", label_fn=None) -> "StudyDesign":
        facs = tuple(factors)
        profiles = []
        for combo in itertools.product(*(range(len(f.levels)) for f in facs)):
            if label_fn is None:
                label = "-".join(f.levels[i] for f, i in zip(facs, combo))
            else:
                label = label_fn(tuple(f.levels[i] for f, i in zip(facs, combo)))
            profiles.append(Profile(label=label, level_indices=tuple(combo)))
        return cls(factors=facs, profiles=tuple(profiles), name=name)


@dataclass(frozen=True)
class SubjectRecord:
    subject_id: str
    weights: PriorityVector
    consistency: ConsistencyReport | None = None
    demographics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ProfileSummary:
    """Per-profile descriptive statistics across subjects."""

    labels: tuple[str, ...]
    n_subjects: int
    mean: np.ndarray = field(repr=False)
    geometric_mean: np.ndarray = field(repr=False)
    std_dev: np.ndarray = field(repr=False)
    mean_std_error: np.ndarray = field(repr=False)
    minimum: np.ndarray = field(repr=False)
    maximum: np.ndarray = field(repr=False)
    median: np.ndarray = field(repr=False)
    value_range: np.ndarray = field(repr=False)


def _weight_matrix(dataset, design: StudyDesign | None = None) -> np.ndarray:
    records = list(dataset)
    if not records:
        raise StudyError("dataset is empty")
    lengths = {len(r.weights) for r in records}
    if len(lengths) != 1:
        raise StudyError(f"subjects have mixed weight-vector lengths: {sorted(lengths)}")
    if design is not None and lengths != {design.n_items}:
        raise StudyError("weight vectors do not match the design profile count")
    return np.vstack([r.weights.weights for r in records])


def summarize(dataset, design: StudyDesign | None = None) -> ProfileSummary:
    """Eight descriptive statistics per profile (n-1 standard deviations)."""
    w = _weight_matrix(dataset, design)
    if np.any(w <= 0.0):
        raise StudyError("geometric mean undefined: non-positive weight present")
    n = w.shape[0]
    labels = design.labels if design is not None else tuple(f"item{i}" for i in range(w.shape[1]))
    std = w.std(axis=0, ddof=1) if n > 1 else np.zeros(w.shape[1])
    return ProfileSummary(
        labels=labels,
        n_subjects=n,
        mean=w.mean(axis=0),
        geometric_mean=np.exp(np.log(w).mean(axis=0)),
        std_dev=std,
        mean_std_error=std / np.sqrt(n),
        minimum=w.min(axis=0),
        maximum=w.max(axis=0),
        median=np.median(w, axis=0),
        value_range=w.max(axis=0) - w.min(axis=0),
    )


def covariance(dataset, design: StudyDesign | None = None) -> SymMatrix:
    """Unbiased covariance of profile weights across subjects."""
    w = _weight_matrix(dataset, design)
    if w.shape[0] < 2:
        raise StudyError("covariance needs at least two subjects")
    c = w - w.mean(axis=0)
    return SymMatrix(c.T @ c / (w.shape[0] - 1))


def to_correlation(cov: SymMatrix) -> SymMatrix:
    """Standardize a covariance matrix to unit diagonal."""
    v = np.diag(cov.values)
    bad = np.nonzero(v <= 0.0)[0]
    if bad.size:
        raise StudyError(f"degenerate variable(s) with non-positive variance at index {bad.tolist()}")
    d = 1.0 / np.sqrt(v)
    r = cov.values * np.outer(d, d)
    np.fill_diagonal(r, 1.0)
    return SymMatrix(r)
