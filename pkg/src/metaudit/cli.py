"""Command-line front end: metaudit space | audit | plot | simulate.

Exit codes: 0 success, 2 input or configuration error, 3 numeric
overflow, 4 no usable records after filtering.  Set METAUDIT_NO_COLOR to
disable terminal styling.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from metaudit import fileio
from metaudit.effect_audit import (
    NoPlottableRecordsError,
    audit,
    build_pvalue_plot,
    record_from_statistic,
)
from metaudit.fileio import ParseError
from metaudit.hacksim import SimConfig, run_simulation
from metaudit.searchspace import (
    SearchSpaceOverflowError,
    compute_spaces,
    summarize_spaces,
)
from metaudit.svgplot import render_pvalue_plot

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_OVERFLOW = 3
EXIT_EMPTY = 4

# Standard error used when projecting simulated z statistics onto the
# ratio/interval form that the audit pipeline ingests.
EMITTED_EFFECT_SE = 0.1


def _use_color(stream) -> bool:
    if os.environ.get("METAUDIT_NO_COLOR"):
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def _fail(message: str) -> None:
    prefix = "error:"
    if _use_color(sys.stderr):
        prefix = f"\x1b[31m{prefix}\x1b[0m"
    print(f"{prefix} {message}", file=sys.stderr)


def _info(message: str) -> None:
    if _use_color(sys.stdout):
        message = f"\x1b[1m{message}\x1b[0m"
    print(message)


def _ensure_outdir(path: str) -> Path:
    outdir = Path(path)
    outdir.mkdir(parents=True, exist_ok=True)
    return outdir


def _wanted(args, kind: str) -> bool:
    return args.format is None or args.format == kind


def cmd_space(args: argparse.Namespace) -> int:
    studies = fileio.read_counts_csv(args.input)
    spaces = [compute_spaces(s) for s in studies]
    summary = summarize_spaces(spaces)
    outdir = _ensure_outdir(args.output)
    written = []
    if _wanted(args, "csv"):
        path = outdir / "spaces.csv"
        fileio.write_spaces_csv(path, studies, spaces)
        written.append(path)
    if _wanted(args, "json"):
        path = outdir / "space_summary.json"
        fileio.write_space_summary_json(path, summary)
        written.append(path)
    if _wanted(args, "md"):
        path = outdir / "spaces.md"
        _write_spaces_markdown(path, studies, spaces, summary)
        written.append(path)
    _info(f"space: {len(studies)} studies -> " + ", ".join(str(p) for p in written))
    return EXIT_OK


def _write_spaces_markdown(path, studies, spaces, summary) -> None:
    lines = [
        "# Analysis search spaces",
        "",
        "| study | outcomes | predictors | lags | covariates | space1 | space2 | space3 |",
        "| --- | --- | --- | --- | --- | --- | --- | --- |",
    ]
    for s, sp in zip(studies, spaces):
        lines.append(
            f"| {s.study_id} | {s.outcomes} | {s.predictors} | {s.lags} "
            f"| {s.covariates} | {sp.space1} | {sp.space2} | {sp.space3} |"
        )
    lines += [
        "",
        "## Summary",
        "",
        "| statistic | space1 | space2 | space3 |",
        "| --- | --- | --- | --- |",
    ]
    for label, attr in (
        ("minimum", "minimum"),
        ("lower quartile", "lower_quartile"),
        ("median", "median"),
        ("upper quartile", "upper_quartile"),
        ("maximum", "maximum"),
    ):
        cells = [
            format(getattr(getattr(summary, col), attr), ".6g")
            for col in ("space1", "space2", "space3")
        ]
        lines.append(f"| {label} | {cells[0]} | {cells[1]} | {cells[2]} |")
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def cmd_audit(args: argparse.Namespace) -> int:
    records = fileio.read_effects_csv(args.input)
    digests = [fileio.file_digest(args.input)]
    studies = spaces = summary = None
    if args.counts:
        studies = fileio.read_counts_csv(args.counts)
        spaces = [compute_spaces(s) for s in studies]
        summary = summarize_spaces(spaces)
        digests.append(fileio.file_digest(args.counts))
    report = audit(records, spaces=summary, alpha=args.alpha)
    document = fileio.build_report_document(
        report, digests, studies=studies, spaces=spaces, summary=summary
    )
    outdir = _ensure_outdir(args.output)
    written = []
    if _wanted(args, "json"):
        path = outdir / "report.json"
        fileio.write_report_json(path, document)
        written.append(path)
    if _wanted(args, "csv"):
        path = outdir / "plot_data.csv"
        fileio.write_plot_csv(path, report)
        written.append(path)
    if _wanted(args, "md"):
        path = outdir / "report.md"
        fileio.write_report_markdown(path, document)
        written.append(path)
    _info(
        f"audit: {report.plot.n} p-values "
        f"({report.plot.excluded_ns_count} excluded) -> "
        + ", ".join(str(p) for p in written)
    )
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    records = fileio.read_effects_csv(args.input)
    plot = build_pvalue_plot(records)
    svg = render_pvalue_plot(plot, alpha=args.alpha)
    target = Path(args.output)
    if target.suffix.lower() != ".svg":
        target = _ensure_outdir(args.output) / "pvalue_plot.svg"
    elif target.parent != Path(""):
        target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(svg)
    _info(f"plot: {plot.n} points -> {target}")
    return EXIT_OK


def _read_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ParseError(
                    f"{path}: expected key=value, got {stripped!r}", row=lineno
                )
            key, _, value = stripped.partition("=")
            values[key.strip()] = value.strip()
    return values


_CONFIG_FIELDS = {
    "n_studies": int,
    "tests_per_study": int,
    "correlation": float,
    "true_effect": float,
    "selection_rule": str,
    "alpha": float,
    "censor_at_alpha": lambda v: v.strip().lower() in ("1", "true", "yes"),
    "replicates": int,
    "seed": int,
}


def _build_sim_config(args: argparse.Namespace) -> SimConfig:
    values: dict = {}
    if args.config:
        for key, raw in _read_config_file(args.config).items():
            if key not in _CONFIG_FIELDS:
                raise ParseError(f"{args.config}: unknown config key {key!r}")
            try:
                values[key] = _CONFIG_FIELDS[key](raw)
            except ValueError:
                raise ParseError(
                    f"{args.config}: bad value for {key}: {raw!r}"
                ) from None
    overrides = {
        "n_studies": args.n_studies,
        "tests_per_study": args.k,
        "correlation": args.correlation,
        "true_effect": args.true_effect,
        "selection_rule": args.rule,
        "alpha": args.alpha,
        "replicates": args.replicates,
        "seed": args.seed,
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    if args.censor:
        values["censor_at_alpha"] = True
    return SimConfig(**values)


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _build_sim_config(args)
    result = run_simulation(config)
    outdir = _ensure_outdir(args.output)
    written = []
    if _wanted(args, "csv"):
        path = outdir / "sim_results.csv"
        fileio.write_sim_csv(path, result)
        written.append(path)
    if _wanted(args, "json"):
        path = outdir / "sim_summary.json"
        fileio.write_sim_summary_json(path, config, result)
        written.append(path)
    if args.emit_effects:
        records = [
            record_from_statistic(
                study_id=f"k{config.tests_per_study}-r{replicate:06d}-s{study}",
                statistic=estimate,
                standard_error=EMITTED_EFFECT_SE,
                label=f"simulated ({config.selection_rule})",
            )
            for replicate, study, p, estimate, published in result.records
            if published or not config.censor_at_alpha
        ]
        fileio.write_effects_csv(args.emit_effects, records)
        written.append(Path(args.emit_effects))
    _info(
        f"simulate: {result.n_published}/{result.n_total} published -> "
        + ", ".join(str(p) for p in written)
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metaudit",
        description="Reliability auditing for meta-analyses of observational studies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    space = sub.add_parser("space", help="count per-study analysis search spaces")
    space.add_argument("--input", required=True, help="counts CSV path")
    space.add_argument("--output", required=True, help="output directory")
    space.add_argument("--format", choices=["json", "csv", "md"], default=None)
    space.set_defaults(func=cmd_space)

    audit_cmd = sub.add_parser("audit", help="convert effects to p-values and run diagnostics")
    audit_cmd.add_argument("--input", required=True, help="effects CSV path")
    audit_cmd.add_argument("--counts", default=None, help="optional counts CSV for multiplicity")
    audit_cmd.add_argument("--alpha", type=float, default=0.05)
    audit_cmd.add_argument("--output", required=True, help="output directory")
    audit_cmd.add_argument("--format", choices=["json", "csv", "md"], default=None)
    audit_cmd.set_defaults(func=cmd_audit)

    plot = sub.add_parser("plot", help="render the p-value plot as SVG")
    plot.add_argument("--input", required=True, help="effects CSV path")
    plot.add_argument("--output", required=True, help="SVG path or output directory")
    plot.add_argument("--alpha", type=float, default=0.05)
    plot.set_defaults(func=cmd_plot)

    simulate = sub.add_parser("simulate", help="run the selection-bias Monte Carlo")
    simulate.add_argument("--output", required=True, help="output directory")
    simulate.add_argument("--config", default=None, help="key=value config file")
    simulate.add_argument("--k", "--tests-per-study", dest="k", type=int, default=None)
    simulate.add_argument("--replicates", type=int, default=None)
    simulate.add_argument("--correlation", type=float, default=None)
    simulate.add_argument("--true-effect", type=float, default=None)
    simulate.add_argument("--rule", choices=["report-min-p", "report-first-significant", "report-random"], default=None)
    simulate.add_argument("--alpha", type=float, default=None)
    simulate.add_argument("--censor", action="store_true")
    simulate.add_argument("--n-studies", dest="n_studies", type=int, default=None)
    simulate.add_argument("--seed", type=int, default=None)
    simulate.add_argument("--format", choices=["json", "csv", "md"], default=None)
    simulate.add_argument(
        "--emit-effects",
        default=None,
        help="also write reported studies as an effects CSV for the audit pipeline",
    )
    simulate.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SearchSpaceOverflowError as exc:
        _fail(str(exc))
        return EXIT_OVERFLOW
    except NoPlottableRecordsError as exc:
        _fail(str(exc))
        return EXIT_EMPTY
    except (ParseError, OSError, ValueError) as exc:
        _fail(str(exc))
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
