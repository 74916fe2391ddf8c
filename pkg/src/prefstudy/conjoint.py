"""Per-subject conjoint decomposition of preference weights and choice simulators.

Each subject's profile weights are regressed on effects-coded level
indicators, giving zero-sum part-worths per factor plus an intercept equal
to the mean weight (1/n for unit-sum priority vectors). Range-based relative
importances and three market-share rules (first choice, utility shares,
softmax shares) operate on the fitted utilities.
"""

from dataclasses import dataclass, field

import numpy as np

from .numerics import ols
from .study import StudyDesign, SubjectRecord


class ConjointError(ValueError):
    pass


@dataclass(frozen=True)
class ConjointFit:
    subject_id: str
    intercept: float
    part_worths: dict[str, dict[str, float]]
    r_squared: float | None = None
    f_stat: float | None = None
    p_value: float | None = None
    degenerate: bool = False  # constant weights: importances undefined

    @property
    def importances(self) -> dict[str, float] | None:
        ranges = {
            f: max(lv.values()) - min(lv.values()) for f, lv in self.part_worths.items()
        }
        total = sum(ranges.values())
        if total <= 1e-12:  # constant utilities: importance shares undefined
            return None
        return {f: r / total for f, r in ranges.items()}


@dataclass(frozen=True)
class AggregateConjoint:
    n_subjects: int
    importances: dict[str, float]
    part_worths: dict[str, dict[str, float]]


@dataclass(frozen=True)
class ChoiceShares:
    model: str  # "FCM" | "BTL" | "LPM"
    labels: tuple[str, ...]
    shares: np.ndarray = field(repr=False)
    excluded_subjects: tuple[str, ...] = ()


def _design_columns(design: StudyDesign):
    """Effects-coded indicator columns, one factor at a time (last level = -sum)."""
    cols, names = [], []
    for fi, factor in enumerate(design.factors):
        k = len(factor.levels)
        for li in range(k - 1):
            col = np.zeros(design.n_items)
            for p, profile in enumerate(design.profiles):
                ix = profile.level_indices[fi]
                if ix == li:
                    col[p] = 1.0
                elif ix == k - 1:
                    col[p] = -1.0
            cols.append(col)
            names.append((factor.name, li))
    return cols, names


def fit_subject(record: SubjectRecord, design: StudyDesign) -> ConjointFit:
    """Effects-coded decomposition of one subject's weights into part-worths."""
    if not design.is_full_factorial:
        raise ConjointError("conjoint decomposition requires a full-factorial design")
    w = record.weights.weights
    if w.size != design.n_items:
        raise ConjointError(f"subject {record.subject_id!r} weights do not match the design")
    cols, names = _design_columns(design)
    x = np.column_stack([np.ones(design.n_items)] + cols)
    fit = ols(x, w)
    part_worths: dict[str, dict[str, float]] = {}
    pos = 1
    for factor in design.factors:
        k = len(factor.levels)
        betas = fit.coefficients[pos : pos + k - 1]
        values = {factor.levels[i]: float(betas[i]) for i in range(k - 1)}
        values[factor.levels[k - 1]] = float(-betas.sum())
        part_worths[factor.name] = values
        pos += k - 1
    degenerate = all(
        max(lv.values()) - min(lv.values()) <= 1e-12 for lv in part_worths.values()
    )
    return ConjointFit(
        subject_id=record.subject_id,
        intercept=float(fit.coefficients[0]),
        part_worths=part_worths,
        r_squared=fit.r_squared,
        f_stat=fit.f_stat,
        p_value=fit.f_p,
        degenerate=degenerate,
    )


def fit_from_part_worths(
    subject_id: str,
    part_worths: dict[str, dict[str, float]],
    design: StudyDesign,
    intercept: float | None = None,
    r_squared: float | None = None,
    f_stat: float | None = None,
    p_value: float | None = None,
) -> ConjointFit:
    """Wrap externally estimated part-worths (e.g. published tables) as a fit."""
    for factor in design.factors:
        levels = part_worths.get(factor.name)
        if levels is None or set(levels) != set(factor.levels):
            raise ConjointError(f"part-worths missing levels for factor {factor.name!r}")
    if intercept is None:
        intercept = 1.0 / design.n_items
    return ConjointFit(
        subject_id=subject_id,
        intercept=float(intercept),
        part_worths={f: dict(v) for f, v in part_worths.items()},
        r_squared=r_squared,
        f_stat=f_stat,
        p_value=p_value,
    )


def _sorted_fits(fits) -> list[ConjointFit]:
    fits = sorted(fits, key=lambda f: f.subject_id)
    if not fits:
        raise ConjointError("no conjoint fits supplied")
    return fits


def _check_common_design(fits: list[ConjointFit], design: StudyDesign) -> None:
    want = {f.name: set(f.levels) for f in design.factors}
    for fit in fits:
        got = {f: set(v) for f, v in fit.part_worths.items()}
        if got != want:
            raise ConjointError(f"subject {fit.subject_id!r} was fitted against a different design")


def aggregate(fits, design: StudyDesign) -> AggregateConjoint:
    """Arithmetic means of importances and per-level part-worths across subjects."""
    fits = _sorted_fits(fits)
    _check_common_design(fits, design)
    usable = [f for f in fits if f.importances is not None]
    if not usable:
        raise ConjointError("all fits are degenerate; importances undefined")
    imp: dict[str, float] = {f.name: 0.0 for f in design.factors}
    for fit in usable:
        for name, v in fit.importances.items():
            imp[name] += v
    imp = {k: v / len(usable) for k, v in imp.items()}
    pw = {
        f.name: {
            lv: float(np.mean([fit.part_worths[f.name][lv] for fit in fits]))
            for lv in f.levels
        }
        for f in design.factors
    }
    return AggregateConjoint(n_subjects=len(fits), importances=imp, part_worths=pw)


def predict_utilities(fit: ConjointFit, design: StudyDesign) -> np.ndarray:
    """Additive utility per profile: intercept plus its levels' part-worths."""
    u = np.empty(design.n_items)
    for p, profile in enumerate(design.profiles):
        total = fit.intercept
        for fi, factor in enumerate(design.factors):
            total += fit.part_worths[factor.name][factor.levels[profile.level_indices[fi]]]
        u[p] = total
    return u


def simulate_fcm(fits, design: StudyDesign) -> ChoiceShares:
    """First-choice shares: fraction of subjects whose top utility is the profile.

    Ties are split equally among the tied profiles, deterministically.
    """
    fits = _sorted_fits(fits)
    _check_common_design(fits, design)
    shares = np.zeros(design.n_items)
    for fit in fits:
        u = predict_utilities(fit, design)
        top = np.nonzero(u >= u.max() - 1e-12)[0]
        shares[top] += 1.0 / top.size
    shares /= len(fits)
    return ChoiceShares(model="FCM", labels=design.labels, shares=shares)


def _positive_utility_fits(fits, design):
    """Apply the simulator eligibility rule: drop subjects with any utility <= 0."""
    kept, excluded, utilities = [], [], []
    for fit in fits:
        u = predict_utilities(fit, design)
        if np.all(u > 0.0):
            kept.append(fit)
            utilities.append(u)
        else:
            excluded.append(fit.subject_id)
    if not kept:
        raise ConjointError(
            "every subject was excluded by the positive-utility rule (some predicted utility <= 0)"
        )
    return kept, excluded, np.vstack(utilities)


def _aggregate_shares(per_subject: np.ndarray, how: str) -> np.ndarray:
    if how == "geometric":
        return np.exp(np.log(per_subject).mean(axis=0))
    if how == "arithmetic":
        return per_subject.mean(axis=0)
    raise ConjointError(f"unknown aggregation {how!r}")


def simulate_btl(fits, design: StudyDesign, aggregation: str = "geometric") -> ChoiceShares:
    """Utility-proportional choice shares, aggregated across subjects.

    Subjects with any non-positive predicted utility are excluded (shares
    would be undefined); per-subject probabilities are u_i / sum(u).
    """
    fits = _sorted_fits(fits)
    _check_common_design(fits, design)
    kept, excluded, u = _positive_utility_fits(fits, design)
    probs = u / u.sum(axis=1, keepdims=True)
    return ChoiceShares(
        model="BTL",
        labels=design.labels,
        shares=_aggregate_shares(probs, aggregation),
        excluded_subjects=tuple(excluded),
    )


def simulate_lpm(fits, design: StudyDesign, aggregation: str = "geometric") -> ChoiceShares:
    """Softmax (logit) choice shares; same eligibility rule as the utility-share model."""
    fits = _sorted_fits(fits)
    _check_common_design(fits, design)
    kept, excluded, u = _positive_utility_fits(fits, design)
    e = np.exp(u - u.max(axis=1, keepdims=True))
    probs = e / e.sum(axis=1, keepdims=True)
    return ChoiceShares(
        model="LPM",
        labels=design.labels,
        shares=_aggregate_shares(probs, aggregation),
        excluded_subjects=tuple(excluded),
    )
