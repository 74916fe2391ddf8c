"""Fixed-effects ANOVA, LSD post-hoc tests and effects-coded regression."""

from dataclasses import dataclass, field

import numpy as np

from .numerics import OlsFit, f_tail, ols, t_tail
from .study import ProfileSummary, StudyDesign


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class AnovaRow:
    source: str
    ss: float
    df: int
    mss: float
    f: float | None
    p: float | None


@dataclass(frozen=True)
class AnovaTable:
    rows: tuple[AnovaRow, ...]

    def row(self, source: str) -> AnovaRow:
        for r in self.rows:
            if r.source == source:
                return r
        raise KeyError(source)

    @property
    def error(self) -> AnovaRow:
        return self.row("Error")


@dataclass(frozen=True)
class PosthocMatrix:
    levels: tuple[str, ...]
    p_values: np.ndarray = field(repr=False)  # symmetric, unit diagonal

    def p(self, a: str, b: str) -> float:
        i, j = self.levels.index(a), self.levels.index(b)
        return float(self.p_values[i, j])


@dataclass(frozen=True)
class EffectsCoding:
    """Level -> numeric code per factor; three-level factors use -1/0/+1."""

    codes: dict[str, dict[str, float]]

    def __post_init__(self):
        for factor, levels in self.codes.items():
            values = list(levels.values())
            if len(set(values)) != len(values):
                raise ModelError(f"coding for factor {factor!r} assigns the same code twice")

    def code(self, factor: str, level: str) -> float:
        try:
            return self.codes[factor][level]
        except KeyError:
            raise ModelError(f"coding missing factor {factor!r} level {level!r}") from None


def _cells(records, design: StudyDesign, factor_a: str, factor_b: str):
    """Observations grouped by (level_a, level_b); subjects are replicates."""
    fa = design.factor(factor_a)
    fb = design.factor(factor_b)
    cells: dict[tuple[str, str], list[float]] = {
        (la, lb): [] for la in fa.levels for lb in fb.levels
    }
    for rec in records:
        w = rec.weights.weights
        if w.size != design.n_items:
            raise ModelError(f"subject {rec.subject_id!r} weight length does not match the design")
        for p, profile in enumerate(design.profiles):
            key = (design.level_of(profile, factor_a), design.level_of(profile, factor_b))
            if key not in cells:
                raise ModelError(f"profile {profile.label!r} outside the {factor_a} x {factor_b} grid")
            cells[key].append(float(w[p]))
    return fa, fb, cells


def two_way_anova(records, design: StudyDesign, factor_a: str, factor_b: str) -> AnovaTable:
    """Balanced two-way fixed-effects decomposition with interaction."""
    records = list(records)
    if not records:
        raise ModelError("no observations")
    fa, fb, cells = _cells(records, design, factor_a, factor_b)
    sizes = {len(v) for v in cells.values()}
    if len(sizes) != 1 or 0 in sizes:
        raise ModelError("unbalanced or empty cells; this decomposition requires equal replicates")
    r = sizes.pop()
    a, b = len(fa.levels), len(fb.levels)
    y = np.array([[cells[(la, lb)] for lb in fb.levels] for la in fa.levels])  # a x b x r
    grand = y.mean()
    mean_ab = y.mean(axis=2)
    mean_a = y.mean(axis=(1, 2))
    mean_b = y.mean(axis=(0, 2))
    ss_a = b * r * ((mean_a - grand) ** 2).sum()
    ss_b = a * r * ((mean_b - grand) ** 2).sum()
    inter = mean_ab - mean_a[:, None] - mean_b[None, :] + grand
    ss_ab = r * (inter**2).sum()
    ss_err = ((y - mean_ab[:, :, None]) ** 2).sum()
    df_a, df_b = a - 1, b - 1
    df_ab = df_a * df_b
    df_err = a * b * (r - 1)
    if df_err < 1:
        raise ModelError("need at least two replicates per cell for an error term")
    mse = ss_err / df_err
    # sums of squares at rounding level are zero for F purposes
    ss_floor = 1e-24 * max(float((y**2).sum()), 1e-300)

    def effect(source, ss, df):
        ms = ss / df
        if ss_err > ss_floor:
            f = ms / mse
            p = f_tail(f, df, df_err)
        elif ss <= ss_floor:
            f, p = 0.0, 1.0
        else:
            f, p = float("inf"), 0.0
        return AnovaRow(source, float(ss), df, float(ms), float(f), float(p))

    rows = (
        effect(factor_a, ss_a, df_a),
        effect(factor_b, ss_b, df_b),
        effect(f"{factor_a} x {factor_b}", ss_ab, df_ab),
        AnovaRow("Error", float(ss_err), df_err, float(mse), None, None),
    )
    return AnovaTable(rows)


def one_way_anova(groups: dict[str, list[float]]) -> AnovaTable:
    """Between/within decomposition for two or more groups."""
    names = list(groups)
    if len(names) < 2:
        raise ModelError("one-way analysis needs at least two groups")
    arrays = [np.asarray(groups[g], dtype=float) for g in names]
    if any(a.size == 0 for a in arrays):
        raise ModelError("every group must be non-empty")
    allv = np.concatenate(arrays)
    grand = allv.mean()
    ss_between = sum(a.size * (a.mean() - grand) ** 2 for a in arrays)
    ss_within = sum(((a - a.mean()) ** 2).sum() for a in arrays)
    df_b = len(names) - 1
    df_w = allv.size - len(names)
    if df_w < 1:
        raise ModelError("not enough observations for a within-group error term")
    msb = ss_between / df_b
    msw = ss_within / df_w
    ss_floor = 1e-24 * max(float((allv**2).sum()), 1e-300)
    if ss_within > ss_floor:
        f = msb / msw
        p = f_tail(f, df_b, df_w)
    elif ss_between <= ss_floor:
        f, p = 0.0, 1.0
    else:
        f, p = float("inf"), 0.0
    rows = (
        AnovaRow("Between", float(ss_between), df_b, float(msb), float(f), float(p)),
        AnovaRow("Error", float(ss_within), df_w, float(msw), None, None),
    )
    return AnovaTable(rows)


def lsd_posthoc(level_means: dict[str, float], reps: int, mse: float, df_error: int) -> PosthocMatrix:
    """Fisher LSD pairwise probabilities from the pooled error term."""
    if mse <= 0:
        raise ModelError(f"mse must be positive, got {mse}")
    if reps < 1:
        raise ModelError(f"reps must be at least 1, got {reps}")
    levels = tuple(level_means)
    k = len(levels)
    se = np.sqrt(2.0 * mse / reps)
    p = np.ones((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            t = (level_means[levels[i]] - level_means[levels[j]]) / se
            p[i, j] = p[j, i] = t_tail(t, df_error)
    return PosthocMatrix(levels=levels, p_values=p)


def effects_regression(
    summary: ProfileSummary,
    design: StudyDesign,
    coding: EffectsCoding,
    factors: tuple[str, ...] | None = None,
    response: str = "geometric_mean",
) -> OlsFit:
    """Regress per-profile aggregate statistics on coded factor levels.

    One observation per profile; coefficient order is the intercept followed
    by ``factors`` (all design factors when omitted). Dropping insignificant
    factors and refitting is just a narrower ``factors`` tuple.
    """
    if factors is None:
        factors = tuple(f.name for f in design.factors)
    if not factors:
        raise ModelError("at least one factor must be included")
    y = np.asarray(getattr(summary, response), dtype=float)
    if y.size != design.n_items:
        raise ModelError("summary does not cover every design profile")
    cols = [np.ones(design.n_items)]
    for name in factors:
        cols.append(
            np.array([coding.code(name, design.level_of(p, name)) for p in design.profiles])
        )
    return ols(np.column_stack(cols), y)
