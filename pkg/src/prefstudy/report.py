"""End-to-end analysis pipeline and report emission.

``run_pipeline`` wires judgments (or precomputed weights / part-worths /
covariance) through every enabled analysis and renders one section per
published-table analogue. Sections fail independently: an error in one
analysis is recorded on its section and the rest still run.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import conjoint as cj
from . import factor as fa
from . import formats, plots
from .ahp import ev_priorities, filter_by_cr, matrix_from_judgments
from .formats import fmt_num
from .linmod import EffectsCoding, effects_regression, lsd_posthoc, two_way_anova
from .study import StudyDesign, SubjectRecord, covariance, summarize, to_correlation

#: level-to-code assignment reproducing the published regression equations
#: for the bundled demo study; override with --coding for other studies
DEFAULT_DEMO_CODING = EffectsCoding(
    {
        "Gap": {"Small": -1.0, "Medium": 0.0, "Large": 1.0},
        "Background": {"Gaudy": -1.0, "Subtle": 0.0, "Uniform": 1.0},
    }
)

#: oblimin weight for the hierarchical replication pipeline (see ledger:
#: plain quartimin under-rotates this dataset's factor correlations)
DEFAULT_HIER_GAMMA = 0.25


@dataclass(frozen=True)
class ReportTable:
    name: str
    header: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]


@dataclass
class Section:
    name: str
    tables: list[ReportTable] = field(default_factory=list)
    plots: dict[str, str] = field(default_factory=dict)  # filename -> svg text
    error: str | None = None


@dataclass
class ReportBundle:
    sections: list[Section] = field(default_factory=list)

    def section(self, name: str) -> Section:
        for s in self.sections:
            if s.name == name:
                return s
        raise KeyError(name)

    @property
    def failed_sections(self) -> list[str]:
        return [s.name for s in self.sections if s.error is not None]

    def write(self, out_dir) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        lines = []
        for section in self.sections:
            lines.append(f"== {section.name} ==")
            if section.error is not None:
                lines.append(f"ERROR: {section.error}")
            for table in section.tables:
                csv_lines = [",".join(table.header)]
                csv_lines += [",".join(row) for row in table.rows]
                (out / f"{section.name}_{table.name}.csv").write_text(
                    "\n".join(csv_lines) + "\n", encoding="utf-8"
                )
                widths = [
                    max(len(str(c)) for c in col)
                    for col in zip(table.header, *table.rows)
                ] if table.rows else [len(h) for h in table.header]
                lines.append(f"-- {table.name} --")
                lines.append("  ".join(h.ljust(w) for h, w in zip(table.header, widths)))
                for row in table.rows:
                    lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
            for fname, svg in section.plots.items():
                plot_dir = out / "plots"
                plot_dir.mkdir(exist_ok=True)
                (plot_dir / fname).write_text(svg, encoding="utf-8")
            lines.append("")
        (out / "report.txt").write_text("\n".join(lines), encoding="utf-8")


class PipelineError(RuntimeError):
    pass


def records_from_judgments(design: StudyDesign, judgments: dict) -> list[SubjectRecord]:
    records = []
    for sid in sorted(judgments):
        matrix = matrix_from_judgments(design.n_items, judgments[sid])
        weights, report = ev_priorities(matrix)
        records.append(SubjectRecord(subject_id=sid, weights=weights, consistency=report))
    return records


def _weights_section(records, retained_ids, cutoff) -> Section:
    section = Section("weights")
    rows = []
    for rec in records:
        kept = "yes" if rec.subject_id in retained_ids else "no"
        for label_ix, w in enumerate(rec.weights.weights):
            rows.append(
                (rec.subject_id, str(label_ix), fmt_num(w), fmt_num(rec.consistency.cr), kept)
            )
    section.tables.append(
        ReportTable("per_subject", ("subject_id", "profile_index", "weight", "cr", "retained"), tuple(rows))
    )
    summary_rows = (
        ("subjects", str(len(records))),
        ("retained", str(len(retained_ids))),
        ("excluded", str(len(records) - len(retained_ids))),
        ("cr_cutoff", fmt_num(cutoff)),
    )
    section.tables.append(ReportTable("cohort", ("quantity", "value"), summary_rows))
    return section


def _descriptives_section(summary) -> Section:
    section = Section("descriptives")
    rows = []
    for i, label in enumerate(summary.labels):
        rows.append(
            (
                label,
                fmt_num(summary.mean[i]),
                fmt_num(summary.geometric_mean[i]),
                fmt_num(summary.std_dev[i]),
                fmt_num(summary.mean_std_error[i]),
                fmt_num(summary.minimum[i]),
                fmt_num(summary.maximum[i]),
                fmt_num(summary.median[i]),
                fmt_num(summary.value_range[i]),
            )
        )
    section.tables.append(
        ReportTable(
            "profiles",
            ("profile", "mean", "geometric_mean", "std_dev", "mean_std_error", "min", "max", "median", "range"),
            tuple(rows),
        )
    )
    return section


def _anova_sections(records, design) -> list[Section]:
    anova_section = Section("anova")
    posthoc_section = Section("posthoc")
    if len(design.factors) != 2:
        anova_section.error = "two-way decomposition needs exactly two factors"
        posthoc_section.error = anova_section.error
        return [anova_section, posthoc_section]
    fa_name, fb_name = design.factors[0].name, design.factors[1].name
    table = two_way_anova(records, design, fa_name, fb_name)
    rows = tuple(
        (
            r.source,
            fmt_num(r.ss),
            str(r.df),
            fmt_num(r.mss),
            fmt_num(r.f) if r.f is not None else "",
            fmt_num(r.p) if r.p is not None else "",
        )
        for r in table.rows
    )
    anova_section.tables.append(ReportTable("two_way", ("source", "ss", "df", "mss", "f", "p"), rows))

    mse = table.error.mss
    df_err = table.error.df
    w = np.vstack([r.weights.weights for r in records])
    for factor in design.factors:
        level_means = {}
        reps = None
        for level in factor.levels:
            cols = [i for i, p in enumerate(design.profiles) if design.level_of(p, factor.name) == level]
            level_means[level] = float(w[:, cols].mean())
            reps = len(cols) * w.shape[0]
        ph = lsd_posthoc(level_means, reps=reps, mse=mse, df_error=df_err)
        rows = []
        for i, la in enumerate(ph.levels):
            for j in range(i + 1, len(ph.levels)):
                rows.append((la, ph.levels[j], fmt_num(ph.p_values[i, j])))
        posthoc_section.tables.append(
            ReportTable(f"lsd_{factor.name}", ("level_a", "level_b", "p"), tuple(rows))
        )
    return [anova_section, posthoc_section]


def _mean_plots_section(records, design) -> Section:
    section = Section("level_means")
    w = np.vstack([r.weights.weights for r in records])
    for factor in design.factors:
        means, errs = [], []
        for level in factor.levels:
            cols = [i for i, p in enumerate(design.profiles) if design.level_of(p, factor.name) == level]
            vals = w[:, cols].ravel()
            means.append(float(vals.mean()))
            errs.append(float(vals.std(ddof=1) / np.sqrt(vals.size)) if vals.size > 1 else 0.0)
        section.plots[f"means_{factor.name}.svg"] = plots.bar_chart(
            factor.levels,
            means,
            errs,
            title=f"Mean relative weight by {factor.name}",
            y_label="mean weight",
        )
        rows = tuple(
            (lv, fmt_num(m), fmt_num(e)) for lv, m, e in zip(factor.levels, means, errs)
        )
        section.tables.append(
            ReportTable(f"by_{factor.name}", ("level", "mean", "mean_std_error"), rows)
        )
    return section


def _coef_table(name, fit, terms):
    rows = tuple(
        (term, fmt_num(b), fmt_num(se), fmt_num(t), fmt_num(p))
        for term, b, se, t, p in zip(terms, fit.coefficients, fit.std_errors, fit.t_stats, fit.p_values)
    )
    return ReportTable(name, ("term", "coefficient", "std_error", "t", "p"), rows)


def _fit_stats_rows(fit):
    return (
        ("r_squared", fmt_num(fit.r_squared)),
        ("adj_r_squared", fmt_num(fit.adj_r_squared)),
        ("f_stat", fmt_num(fit.f_stat)),
        ("f_p", fmt_num(fit.f_p)),
        ("df_error", str(fit.df_error)),
    )


def _regression_section(summary, design, coding, alpha=0.05) -> Section:
    section = Section("regression")
    factor_names = tuple(f.name for f in design.factors)
    full = effects_regression(summary, design, coding, factor_names)
    section.tables.append(_coef_table("full_coefficients", full, ("intercept",) + factor_names))
    section.tables.append(ReportTable("full_stats", ("quantity", "value"), _fit_stats_rows(full)))

    y = np.asarray(summary.geometric_mean)
    predicted = y - full.residuals
    section.plots["regression_full.svg"] = plots.predicted_observed(
        summary.labels, list(y), list(predicted), title="Geometric mean weights: full model"
    )

    keep = tuple(
        name for i, name in enumerate(factor_names, start=1) if full.p_values[i] <= alpha
    )
    if keep and keep != factor_names:
        reduced = effects_regression(summary, design, coding, keep)
        section.tables.append(_coef_table("reduced_coefficients", reduced, ("intercept",) + keep))
        section.tables.append(
            ReportTable("reduced_stats", ("quantity", "value"), _fit_stats_rows(reduced))
        )
        predicted = y - reduced.residuals
        section.plots["regression_reduced.svg"] = plots.predicted_observed(
            summary.labels, list(y), list(predicted), title="Geometric mean weights: reduced model"
        )
    return section


def _conjoint_section(fits, design) -> Section:
    section = Section("conjoint")
    rows = []
    for fit in sorted(fits, key=lambda f: f.subject_id):
        imps = fit.importances
        for factor in design.factors:
            for level in factor.levels:
                rows.append(
                    (
                        fit.subject_id,
                        factor.name,
                        level,
                        fmt_num(fit.part_worths[factor.name][level]),
                        fmt_num(imps[factor.name]) if imps else "",
                        fmt_num(fit.r_squared) if fit.r_squared is not None else "",
                        fmt_num(fit.f_stat) if fit.f_stat is not None else "",
                        fmt_num(fit.p_value) if fit.p_value is not None else "",
                    )
                )
    section.tables.append(
        ReportTable(
            "per_subject",
            ("subject_id", "factor", "level", "part_worth", "factor_importance", "r_squared", "f", "p"),
            tuple(rows),
        )
    )
    agg = cj.aggregate(fits, design)
    rows = []
    for factor in design.factors:
        rows.append((factor.name, "", fmt_num(agg.importances[factor.name]), ""))
        for level in factor.levels:
            rows.append((factor.name, level, "", fmt_num(agg.part_worths[factor.name][level])))
    section.tables.append(
        ReportTable("aggregate", ("factor", "level", "relative_importance", "mean_part_worth"), tuple(rows))
    )
    return section


def _simulators_section(fits, design, lpm_aggregation="geometric") -> Section:
    section = Section("simulators")
    fcm = cj.simulate_fcm(fits, design)
    btl = cj.simulate_btl(fits, design)
    lpm = cj.simulate_lpm(fits, design, aggregation=lpm_aggregation)
    rows = tuple(
        (label, fmt_num(fcm.shares[i]), fmt_num(btl.shares[i]), fmt_num(lpm.shares[i]))
        for i, label in enumerate(design.labels)
    )
    section.tables.append(ReportTable("shares", ("profile", "fcm", "btl", "lpm"), rows))
    section.tables.append(
        ReportTable(
            "exclusions",
            ("model", "excluded_subjects"),
            (
                ("BTL", ";".join(btl.excluded_subjects)),
                ("LPM", ";".join(lpm.excluded_subjects)),
            ),
        )
    )
    return section


def _matrix_table(name, labels, values) -> ReportTable:
    rows = tuple(
        (labels[i],) + tuple(fmt_num(values[i, j]) for j in range(len(labels)))
        for i in range(len(labels))
    )
    return ReportTable(name, ("label",) + tuple(labels), rows)


def _covariance_section(records, design) -> Section:
    section = Section("covariance")
    cov = covariance(records, design)
    section.tables.append(_matrix_table("weights_cov", design.labels, cov.values))
    corr = to_correlation(cov)
    section.tables.append(_matrix_table("weights_corr", design.labels, corr.values))
    return section


def _factor_section(corr, design, counts) -> Section:
    section = Section("factor")
    for k in counts:
        if not 1 <= k < design.n_items:
            continue
        sol = fa.ml_extract(corr, k)
        rot = fa.varimax(sol) if k >= 2 else sol
        rows = []
        for i, label in enumerate(design.labels):
            rows.append(
                (label,)
                + tuple(fmt_num(rot.loadings[i, j]) for j in range(k))
                + (fmt_num(rot.communalities[i]),)
            )
        header = ("label",) + tuple(f"f{j + 1}" for j in range(k)) + ("communality",)
        section.tables.append(ReportTable(f"loadings_k{k}", header, tuple(rows)))
        ve = fa.variance_explained(rot)
        section.tables.append(
            ReportTable(
                f"variance_k{k}",
                ("factor", "proportion"),
                tuple((f"f{j + 1}", fmt_num(ve[j])) for j in range(k))
                + (("flags", "heywood" if rot.heywood else ""),),
            )
        )
    return section


def _hierarchical_section(corr, design, k, gamma) -> Section:
    section = Section("hierarchical")
    sol = fa.ml_extract(corr, k)
    ob = fa.oblique_rotate(sol, gamma=gamma)
    hier = fa.schmid_leiman(ob)
    rows = tuple(
        (design.labels[i], fmt_num(hier.secondary[i]))
        + tuple(fmt_num(hier.primaries[i, j]) for j in range(k))
        for i in range(design.n_items)
    )
    header = ("label", "secondary") + tuple(f"primary{j + 1}" for j in range(k))
    section.tables.append(ReportTable("loadings", header, rows))
    section.tables.append(_matrix_table("factor_correlations", tuple(f"p{j + 1}" for j in range(k)), ob.phi))
    section.tables.append(
        ReportTable(
            "general_factor",
            ("primary", "loading_on_general"),
            tuple((f"p{j + 1}", fmt_num(hier.general_loadings[j])) for j in range(k)),
        )
    )
    return section


def _guarded(bundle, builder, *args, **kwargs):
    try:
        result = builder(*args, **kwargs)
    except Exception as exc:  # isolate section failures
        name = kwargs.pop("_name", getattr(builder, "_section_name", builder.__name__))
        section = Section(name.replace("_section", "").replace("_sections", "").lstrip("_"))
        section.error = f"{type(exc).__name__}: {exc}"
        bundle.sections.append(section)
        return None
    if isinstance(result, list):
        bundle.sections.extend(result)
    elif result is not None:
        bundle.sections.append(result)
    return result


def run_pipeline(
    study_path,
    judgments_path=None,
    weights_path=None,
    partworths_path=None,
    covariance_path=None,
    out_dir=None,
    cr_cutoff: float = 0.2,
    coding: EffectsCoding | None = None,
    factor_counts=(1, 2, 3),
    hier_gamma: float = DEFAULT_HIER_GAMMA,
    lpm_aggregation: str = "geometric",
) -> ReportBundle:
    """Run every analysis the supplied inputs allow and emit the report.

    Exactly one of ``judgments_path``/``weights_path`` yields subject weight
    vectors; ``partworths_path`` substitutes precomputed conjoint fits and
    ``covariance_path`` a precomputed weight covariance (useful when raw
    responses are unavailable).
    """
    design, meta = formats.load_study(study_path)
    coding = coding or (DEFAULT_DEMO_CODING if {f.name for f in design.factors} == {"Gap", "Background"} else None)
    bundle = ReportBundle()

    records = None
    if judgments_path is not None:
        judgments, diags = formats.load_judgments(judgments_path, design)
        errors = [d for d in diags if d.severity == "error"]
        if errors or not judgments:
            raise PipelineError(
                "judgments file failed validation: "
                + "; ".join(str(d) for d in errors[:5] or [f"{judgments_path}: no subjects found"])
            )
        records = records_from_judgments(design, judgments)
    elif weights_path is not None:
        # imported weight files carry the original CR; it is not recomputable
        from .ahp import ConsistencyReport, PriorityVector

        records = []
        for sid, w, cr in formats.load_weights(weights_path, design):
            rep = ConsistencyReport(
                lambda_max=float("nan"), ci=float("nan"), ri=float("nan"), cr=cr,
                acceptable_at_0_1=cr <= 0.1, acceptable_at_0_2=cr <= 0.2,
                cr_defined=design.n_items >= 3,
            )
            records.append(SubjectRecord(subject_id=sid, weights=PriorityVector(w), consistency=rep))

    retained = None
    if records is not None:
        result = filter_by_cr(
            [(r.subject_id, r.consistency) for r in records], cr_cutoff
        )
        retained_ids = set(result.retained)
        bundle.sections.append(_weights_section(records, retained_ids, cr_cutoff))
        retained = [r for r in records if r.subject_id in retained_ids]
        if not retained:
            raise PipelineError(f"no subjects remain below cr cutoff {cr_cutoff}")

        summary = summarize(retained, design)
        _guarded(bundle, _descriptives_section, summary)
        _guarded(bundle, _anova_sections, retained, design)
        _guarded(bundle, _mean_plots_section, retained, design)
        if coding is not None:
            _guarded(bundle, _regression_section, summary, design, coding)
        else:
            section = Section("regression")
            section.error = "no effects coding supplied for this design"
            bundle.sections.append(section)

    fits = None
    if partworths_path is not None:
        fits = formats.load_partworths(partworths_path, design)
    elif retained is not None and design.is_full_factorial:
        fits = [cj.fit_subject(r, design) for r in retained]
    if fits is not None:
        _guarded(bundle, _conjoint_section, fits, design)
        _guarded(bundle, _simulators_section, fits, design, lpm_aggregation)

    corr = None
    if covariance_path is not None:
        cov = formats.load_covariance(covariance_path, design)
        bundle.sections.append(_matrix_section_from(cov, design))
        corr = to_correlation(cov)
    elif retained is not None and len(retained) >= 2:
        _guarded(bundle, _covariance_section, retained, design)
        corr = to_correlation(covariance(retained, design))
    if corr is not None:
        _guarded(bundle, _factor_section, corr, design, factor_counts)
        k_hier = max(c for c in factor_counts if c < design.n_items)
        if k_hier >= 2:
            _guarded(bundle, _hierarchical_section, corr, design, k_hier, hier_gamma)

    if out_dir is not None:
        bundle.write(out_dir)
    return bundle


def _matrix_section_from(cov, design) -> Section:
    section = Section("covariance")
    section.tables.append(_matrix_table("weights_cov", design.labels, cov.values))
    section.tables.append(_matrix_table("weights_corr", design.labels, to_correlation(cov).values))
    return section
