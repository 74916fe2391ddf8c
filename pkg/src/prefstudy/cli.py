"""Command-line interface.

Exit codes: 0 success, 1 validation failure, 2 analysis failure.
"""

import argparse
import json
import sys
from pathlib import Path

from . import formats, report
from .linmod import EffectsCoding

PROG = "prefstudy"


def _add_common(parser, *, judgments=True, out=True):
    parser.add_argument("--study", required=True, help="study definition JSON")
    if judgments:
        parser.add_argument("--judgments", help="judgments CSV (subject_id,left,right,intensity,favored)")
        parser.add_argument("--weights", help="precomputed weights CSV (subject_id,profile,weight,cr)")
    if out:
        parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--cr-cutoff", type=float, default=0.2, help="consistency-ratio cutoff (default 0.2)")
    parser.add_argument("--seed", type=int, default=None, help="randomization seed for elicitation ordering")
    parser.add_argument("--coding", help="effects coding JSON file: {factor: {level: code}}")


def _coding_from_args(args) -> EffectsCoding | None:
    if getattr(args, "coding", None):
        doc = json.loads(Path(args.coding).read_text(encoding="utf-8"))
        return EffectsCoding({f: {lv: float(c) for lv, c in levels.items()} for f, levels in doc.items()})
    return None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Pairwise-comparison preference elicitation and analysis workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check study/judgments files, print diagnostics")
    p.add_argument("--study", required=True)
    p.add_argument("--judgments")

    p = sub.add_parser("prioritize", help="derive per-subject weights and consistency ratios")
    _add_common(p, out=False)
    p.add_argument("--out", required=True, help="output weights CSV path")
    p.add_argument("--method", choices=("ev", "llsm"), default="ev")

    for name, help_text in (
        ("summarize", "per-profile descriptive statistics"),
        ("anova", "two-way analysis of variance with LSD post-hoc tests"),
        ("regress", "effects-coded regression on profile geometric means"),
        ("report", "run every enabled analysis into a report directory"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        if name == "report":
            p.add_argument("--partworths", help="precomputed part-worths CSV")
            p.add_argument("--covariance", help="precomputed covariance CSV")
            p.add_argument("--hier-gamma", type=float, default=report.DEFAULT_HIER_GAMMA)
            p.add_argument("--factors", default="1,2,3", help="factor counts, comma separated")
            p.add_argument("--lpm-aggregation", choices=("geometric", "arithmetic"), default="geometric")

    p = sub.add_parser("conjoint", help="per-subject part-worth decomposition")
    _add_common(p)
    p.add_argument("--partworths", help="precomputed part-worths CSV")

    p = sub.add_parser("simulate", help="FCM/BTL/LPM choice shares")
    _add_common(p)
    p.add_argument("--partworths", help="precomputed part-worths CSV")
    p.add_argument("--lpm-aggregation", choices=("geometric", "arithmetic"), default="geometric")

    p = sub.add_parser("factor", help="factor extraction, rotation, hierarchical decomposition")
    _add_common(p)
    p.add_argument("--covariance", help="precomputed covariance CSV")
    p.add_argument("--factors", default="1,2,3", help="factor counts, comma separated")
    p.add_argument("--hier-gamma", type=float, default=report.DEFAULT_HIER_GAMMA)

    p = sub.add_parser("serve", help="run the live questionnaire HTTP service")
    p.add_argument("--study", required=True)
    p.add_argument("--store-dir", help="session event-log directory (in-memory when omitted)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8321)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--no-transitivity-hints", action="store_true")

    return parser


def cmd_validate(args) -> int:
    try:
        design, _ = formats.load_study(args.study)
    except (formats.FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    diagnostics = []
    if args.judgments:
        try:
            _, diagnostics = formats.load_judgments(args.judgments, design)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    for diag in diagnostics:
        print(str(diag))
    errors = [d for d in diagnostics if d.severity == "error"]
    if errors:
        print(f"{len(errors)} error(s)", file=sys.stderr)
        return 1
    print("ok")
    return 0


def cmd_prioritize(args) -> int:
    from .ahp import ev_priorities, llsm_priorities, matrix_from_judgments
    from .study import SubjectRecord

    design, _ = formats.load_study(args.study)
    if not args.judgments:
        print("error: prioritize requires --judgments", file=sys.stderr)
        return 1
    judgments, diags = formats.load_judgments(args.judgments, design)
    errors = [d for d in diags if d.severity == "error"]
    if errors or not judgments:
        for d in errors:
            print(str(d), file=sys.stderr)
        if not judgments:
            print("error: no subjects found", file=sys.stderr)
        return 1
    records = []
    for sid in sorted(judgments):
        matrix = matrix_from_judgments(design.n_items, judgments[sid])
        weights, rep = ev_priorities(matrix)
        if args.method == "llsm":
            weights = llsm_priorities(matrix)
        records.append(SubjectRecord(subject_id=sid, weights=weights, consistency=rep))
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(formats.dump_weights(records, design), encoding="utf-8")
    print(f"wrote {args.out} ({len(records)} subjects)")
    return 0


def _run_report(args, **overrides) -> int:
    try:
        bundle = report.run_pipeline(
            args.study,
            judgments_path=getattr(args, "judgments", None),
            weights_path=getattr(args, "weights", None),
            partworths_path=getattr(args, "partworths", None),
            covariance_path=getattr(args, "covariance", None),
            out_dir=args.out,
            cr_cutoff=args.cr_cutoff,
            coding=_coding_from_args(args),
            **overrides,
        )
    except (formats.FormatError, report.PipelineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for section in bundle.sections:
        status = f"FAILED: {section.error}" if section.error else "ok"
        print(f"{section.name}: {status}")
    return 2 if bundle.failed_sections else 0


def cmd_report(args) -> int:
    counts = tuple(int(c) for c in args.factors.split(","))
    return _run_report(
        args,
        factor_counts=counts,
        hier_gamma=args.hier_gamma,
        lpm_aggregation=args.lpm_aggregation,
    )


def cmd_partial(section_names):
    """Command handler running the full pipeline but keeping chosen sections."""

    def handler(args) -> int:
        overrides = {}
        if hasattr(args, "factors"):
            overrides["factor_counts"] = tuple(int(c) for c in args.factors.split(","))
        if hasattr(args, "hier_gamma"):
            overrides["hier_gamma"] = args.hier_gamma
        if hasattr(args, "lpm_aggregation"):
            overrides["lpm_aggregation"] = args.lpm_aggregation
        try:
            bundle = report.run_pipeline(
                args.study,
                judgments_path=getattr(args, "judgments", None),
                weights_path=getattr(args, "weights", None),
                partworths_path=getattr(args, "partworths", None),
                covariance_path=getattr(args, "covariance", None),
                cr_cutoff=args.cr_cutoff,
                coding=_coding_from_args(args),
                **overrides,
            )
        except (formats.FormatError, report.PipelineError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        kept = report.ReportBundle(
            sections=[s for s in bundle.sections if s.name in section_names]
        )
        if not kept.sections:
            print("error: requested sections produced no output (missing inputs?)", file=sys.stderr)
            return 1
        kept.write(args.out)
        for section in kept.sections:
            status = f"FAILED: {section.error}" if section.error else "ok"
            print(f"{section.name}: {status}")
        return 2 if kept.failed_sections else 0

    return handler


HANDLERS = {
    "validate": cmd_validate,
    "prioritize": cmd_prioritize,
    "summarize": cmd_partial({"weights", "descriptives"}),
    "anova": cmd_partial({"anova", "posthoc", "level_means"}),
    "regress": cmd_partial({"regression"}),
    "conjoint": cmd_partial({"conjoint"}),
    "simulate": cmd_partial({"simulators"}),
    "factor": cmd_partial({"covariance", "factor", "hierarchical"}),
    "report": cmd_report,
}


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    from .sessions import SessionStore

    design, meta = formats.load_study(args.study)
    store = SessionStore(
        design,
        store_dir=args.store_dir,
        default_seed=args.seed,
        transitivity_hints=not args.no_transitivity_hints,
        assets=meta.get("assets", {}),
    )
    app = create_app(store)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return cmd_serve(args)
    return HANDLERS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
