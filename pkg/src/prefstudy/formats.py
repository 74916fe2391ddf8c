"""File formats: study JSON, judgments/weights/part-worth/covariance CSV.

All emitters are deterministic (sorted keys, fixed float formatting) so that
identical inputs produce byte-identical files.
"""

import csv
import io
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .ahp import SaatyGrade
from .conjoint import ConjointFit, fit_from_part_worths
from .numerics import SymMatrix
from .study import Factor, Profile, StudyDesign

JUDGMENT_COLUMNS = ("subject_id", "left", "right", "intensity", "favored")
WEIGHT_COLUMNS = ("subject_id", "profile", "weight", "cr")
PARTWORTH_COLUMNS = ("subject_id", "factor", "level", "value", "r_squared", "f_stat", "p_value")


class FormatError(ValueError):
    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = str(path) if path is not None else None
        self.line = line
        where = f"{self.path or '<data>'}" + (f":{line}" if line else "")
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    path: str
    line: int | None
    message: str

    def __str__(self):
        loc = f"{self.path}:{self.line}" if self.line else self.path
        return f"{self.severity}: {loc}: {self.message}"


def fmt_num(x: float) -> str:
    """Canonical 6-significant-digit rendering used by every emitter."""
    if x != x:
        return "nan"
    return f"{float(x):.6g}"


# -- study definition ---------------------------------------------------------


def parse_study(text: str, path=None) -> tuple[StudyDesign, dict]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg}", path, exc.lineno) from None
    try:
        factors = tuple(
            Factor(name=f["name"], levels=tuple(f["levels"])) for f in doc["factors"]
        )
        by_name = {f.name: f for f in factors}
        profiles = []
        for p in doc["profiles"]:
            indices = []
            for f in factors:
                level = p["levels"][f.name]
                indices.append(by_name[f.name].levels.index(level))
            profiles.append(Profile(label=p["label"], level_indices=tuple(indices)))
    except (KeyError, ValueError, TypeError) as exc:
        raise FormatError(f"bad study structure: {exc!r}", path) from None
    design = StudyDesign(factors=factors, profiles=tuple(profiles), name=doc.get("name", ""))
    meta = {"assets": doc.get("assets", {}), "metadata": doc.get("metadata", {})}
    return design, meta


def load_study(path) -> tuple[StudyDesign, dict]:
    return parse_study(Path(path).read_text(encoding="utf-8"), path)


def dump_study(design: StudyDesign, meta: dict | None = None) -> str:
    meta = meta or {}
    doc = {
        "name": design.name,
        "factors": [{"name": f.name, "levels": list(f.levels)} for f in design.factors],
        "profiles": [
            {
                "label": p.label,
                "levels": {f.name: f.levels[ix] for f, ix in zip(design.factors, p.level_indices)},
            }
            for p in design.profiles
        ],
        "assets": meta.get("assets", {}),
        "metadata": meta.get("metadata", {}),
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


# -- judgments ----------------------------------------------------------------


def parse_judgments(text: str, design: StudyDesign, path=None):
    """Rows of subject_id,left,right,intensity,favored -> per-subject judgment lists.

    Returns ``(judgments, diagnostics)`` where judgments maps subject_id to a
    list of ``(i, j, SaatyGrade)`` tuples in file order. Structural problems
    become diagnostics instead of exceptions so callers can report them all.
    """
    diags: list[Diagnostic] = []
    judgments: dict[str, list] = {}
    seen_pairs: dict[str, set] = {}
    label_to_index = {lab: i for i, lab in enumerate(design.labels)}
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        diags.append(Diagnostic("error", str(path), 1, "empty judgments file"))
        return {}, diags
    if tuple(h.strip() for h in header) != JUDGMENT_COLUMNS:
        diags.append(
            Diagnostic("error", str(path), 1, f"header must be {','.join(JUDGMENT_COLUMNS)}")
        )
        return {}, diags
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 5:
            diags.append(Diagnostic("error", str(path), lineno, f"expected 5 columns, got {len(row)}"))
            continue
        sid, left, right, intensity_s, favored = (c.strip() for c in row)
        if left not in label_to_index or right not in label_to_index:
            bad = left if left not in label_to_index else right
            diags.append(Diagnostic("error", str(path), lineno, f"unknown profile label {bad!r}"))
            continue
        if left == right:
            diags.append(Diagnostic("error", str(path), lineno, f"self-comparison {left!r}"))
            continue
        try:
            grade = SaatyGrade(intensity=int(intensity_s), favored=favored)
        except (ValueError, TypeError) as exc:
            diags.append(Diagnostic("error", str(path), lineno, str(exc)))
            continue
        i, j = label_to_index[left], label_to_index[right]
        key = (min(i, j), max(i, j))
        pairs = seen_pairs.setdefault(sid, set())
        if key in pairs:
            diags.append(
                Diagnostic(
                    "error", str(path), lineno,
                    f"duplicate judgment for subject {sid!r} pair ({design.labels[key[0]]}, {design.labels[key[1]]})",
                )
            )
            continue
        pairs.add(key)
        judgments.setdefault(sid, []).append((i, j, grade))
    n = design.n_items
    expected = {(i, j) for i in range(n) for j in range(i + 1, n)}
    for sid in sorted(judgments):
        missing = expected - seen_pairs[sid]
        for i, j in sorted(missing):
            diags.append(
                Diagnostic(
                    "error", str(path), None,
                    f"subject {sid!r} is missing pair ({design.labels[i]}, {design.labels[j]})",
                )
            )
    return judgments, diags


def load_judgments(path, design: StudyDesign):
    return parse_judgments(Path(path).read_text(encoding="utf-8"), design, path)


def dump_judgments(rows) -> str:
    """Rows of ``(subject_id, left_label, right_label, SaatyGrade)``."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(JUDGMENT_COLUMNS)
    for sid, left, right, grade in rows:
        w.writerow([sid, left, right, grade.intensity, grade.favored])
    return out.getvalue()


# -- weights ------------------------------------------------------------------


def dump_weights(records, design: StudyDesign) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(WEIGHT_COLUMNS)
    for rec in records:
        cr = rec.consistency.cr if rec.consistency is not None else float("nan")
        for label, weight in zip(design.labels, rec.weights.weights):
            w.writerow([rec.subject_id, label, repr(float(weight)), repr(float(cr))])
    return out.getvalue()


def parse_weights(text: str, design: StudyDesign, path=None):
    """Returns list of ``(subject_id, weights array, cr)`` in file order."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != WEIGHT_COLUMNS:
        raise FormatError(f"header must be {','.join(WEIGHT_COLUMNS)}", path, 1)
    per_subject: dict[str, dict[str, float]] = {}
    crs: dict[str, float] = {}
    order: list[str] = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 4:
            raise FormatError(f"expected 4 columns, got {len(row)}", path, lineno)
        sid, label, weight_s, cr_s = (c.strip() for c in row)
        if label not in design.labels:
            raise FormatError(f"unknown profile label {label!r}", path, lineno)
        try:
            weight = float(weight_s)
            cr = float(cr_s)
        except ValueError:
            raise FormatError("weight and cr must be numeric", path, lineno) from None
        if sid not in per_subject:
            order.append(sid)
        per_subject.setdefault(sid, {})[label] = weight
        crs[sid] = cr
    out = []
    for sid in order:
        got = per_subject[sid]
        missing = [lab for lab in design.labels if lab not in got]
        if missing:
            raise FormatError(f"subject {sid!r} missing weights for {missing}", path)
        out.append((sid, np.array([got[lab] for lab in design.labels]), crs[sid]))
    return out


def load_weights(path, design: StudyDesign):
    return parse_weights(Path(path).read_text(encoding="utf-8"), design, path)


# -- part-worths --------------------------------------------------------------


def parse_partworths(text: str, design: StudyDesign, path=None) -> list[ConjointFit]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != PARTWORTH_COLUMNS:
        raise FormatError(f"header must be {','.join(PARTWORTH_COLUMNS)}", path, 1)
    values: dict[str, dict[str, dict[str, float]]] = {}
    stats: dict[str, tuple] = {}
    order: list[str] = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 7:
            raise FormatError(f"expected 7 columns, got {len(row)}", path, lineno)
        sid, factor, level, value_s, r2_s, f_s, p_s = (c.strip() for c in row)
        try:
            value = float(value_s)
        except ValueError:
            raise FormatError("part-worth value must be numeric", path, lineno) from None
        if sid not in values:
            order.append(sid)
        values.setdefault(sid, {}).setdefault(factor, {})[level] = value
        stats[sid] = tuple(float(s) if s else None for s in (r2_s, f_s, p_s))
    fits = []
    for sid in order:
        r2, f, p = stats[sid]
        fits.append(
            fit_from_part_worths(sid, values[sid], design, r_squared=r2, f_stat=f, p_value=p)
        )
    return fits


def load_partworths(path, design: StudyDesign) -> list[ConjointFit]:
    return parse_partworths(Path(path).read_text(encoding="utf-8"), design, path)


def dump_partworths(fits, design: StudyDesign) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(PARTWORTH_COLUMNS)
    for fit in fits:
        stats = [
            "" if fit.r_squared is None else repr(float(fit.r_squared)),
            "" if fit.f_stat is None else repr(float(fit.f_stat)),
            "" if fit.p_value is None else repr(float(fit.p_value)),
        ]
        for factor in design.factors:
            for level in factor.levels:
                w.writerow([fit.subject_id, factor.name, level, repr(fit.part_worths[factor.name][level])] + stats)
    return out.getvalue()


# -- covariance ---------------------------------------------------------------


def parse_covariance(text: str, design: StudyDesign, path=None) -> SymMatrix:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or header[0].strip() != "label":
        raise FormatError("header must start with 'label'", path, 1)
    cols = tuple(h.strip() for h in header[1:])
    if cols != design.labels:
        raise FormatError(f"covariance columns {cols} do not match design labels {design.labels}", path, 1)
    n = len(cols)
    m = np.zeros((n, n))
    got_rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != n + 1:
            raise FormatError(f"expected {n + 1} columns, got {len(row)}", path, lineno)
        label = row[0].strip()
        if label not in cols:
            raise FormatError(f"unknown row label {label!r}", path, lineno)
        i = cols.index(label)
        got_rows.append(label)
        try:
            m[i] = [float(c) for c in row[1:]]
        except ValueError:
            raise FormatError("covariance entries must be numeric", path, lineno) from None
    if sorted(got_rows) != sorted(cols):
        raise FormatError("covariance rows do not cover every profile", path)
    return SymMatrix(m)


def load_covariance(path, design: StudyDesign) -> SymMatrix:
    return parse_covariance(Path(path).read_text(encoding="utf-8"), design, path)


def dump_covariance(cov: SymMatrix, design: StudyDesign) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["label"] + list(design.labels))
    for i, label in enumerate(design.labels):
        w.writerow([label] + [repr(float(v)) for v in cov.values[i]])
    return out.getvalue()


# -- bundled demo data --------------------------------------------------------


def _data_text(name: str) -> str:
    return resources.files("prefstudy.data").joinpath(name).read_text(encoding="utf-8")


def demo_study() -> tuple[StudyDesign, dict]:
    """The bundled nine-profile signage demo design."""
    return parse_study(_data_text("signage_demo.json"), "signage_demo.json")


def demo_partworths(design: StudyDesign | None = None) -> list[ConjointFit]:
    design = design or demo_study()[0]
    return parse_partworths(_data_text("demo_partworths.csv"), design, "demo_partworths.csv")


def demo_covariance(design: StudyDesign | None = None) -> SymMatrix:
    design = design or demo_study()[0]
    return parse_covariance(_data_text("demo_covariance.csv"), design, "demo_covariance.csv")
