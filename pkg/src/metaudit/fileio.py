"""File formats: counts/effects CSV parsing and report serialization.

All output is UTF-8 with LF line endings and '.' decimal separators,
independent of locale.  JSON floats carry 17 significant digits and CSV
floats use shortest round-trip form, so parsing any emitted file and
re-serializing it reproduces the bytes exactly.
"""

from __future__ import annotations

import csv
import hashlib
import importlib.resources
import io
import math
from dataclasses import asdict
from pathlib import Path

from metaudit.effect_audit import AuditReport, EffectRecord
from metaudit.hacksim import SimConfig, SimResult
from metaudit.searchspace import SearchSpace, SpaceSummary, StudyCounts

COUNTS_HEADER = ["study_id", "outcomes", "predictors", "lags", "covariates"]
COUNTS_HEADER_NAMED = COUNTS_HEADER + ["covariate_names"]
EFFECTS_HEADER = ["study_id", "label", "ratio", "ci_low", "ci_high", "level", "ns"]
EFFECTS_HEADER_NO_LEVEL = [c for c in EFFECTS_HEADER if c != "level"]

REPORT_SCHEMA = "metaudit/1"


def bundled_data_path(name: str) -> Path:
    """Filesystem path of a bundled example dataset (e.g. 'nawrot_counts.csv')."""
    return Path(str(importlib.resources.files("metaudit") / "data" / name))


class ParseError(ValueError):
    """An input file failed to parse; carries the row and column at fault."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")


def _data_rows(path: Path):
    """Yield (line_number, cells) for non-comment, non-blank CSV lines."""
    with open(path, encoding="utf-8", newline="") as handle:
        for lineno, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            yield lineno, next(csv.reader([line]))


def _match_header(cells: list[str], accepted: list[list[str]], path: Path) -> list[str]:
    normalized = [cell.strip().lower() for cell in cells]
    for candidate in accepted:
        if normalized == candidate:
            return candidate
    raise ParseError(
        f"{path}: bad or missing header; expected "
        + " or ".join(",".join(c) for c in accepted)
        + f", got {','.join(normalized)!r}",
        row=1,
    )


def _parse_int(cell: str, row: int, column: str) -> int:
    try:
        return int(cell.strip())
    except ValueError:
        raise ParseError(f"expected an integer, got {cell!r}", row=row, column=column) from None


def _parse_float(cell: str, row: int, column: str) -> float:
    try:
        return float(cell.strip())
    except ValueError:
        raise ParseError(f"expected a number, got {cell!r}", row=row, column=column) from None


def read_counts_csv(path: str | Path) -> list[StudyCounts]:
    """Parse a study-counts CSV into StudyCounts rows.

    Header is matched case-insensitively; the trailing covariate_names
    column is optional and holds a semicolon-separated name list.  Lines
    starting with '#' are comments.  Overflow (covariates beyond the
    64-bit guard) propagates as SearchSpaceOverflowError so callers can
    distinguish it from malformed input.
    """
    path = Path(path)
    rows = _data_rows(path)
    try:
        _, header_cells = next(rows)
    except StopIteration:
        raise ParseError(
            f"{path}: empty file; expected header {','.join(COUNTS_HEADER)}"
        ) from None
    header = _match_header(header_cells, [COUNTS_HEADER_NAMED, COUNTS_HEADER], path)

    studies = []
    for lineno, cells in rows:
        if len(cells) != len(header):
            raise ParseError(
                f"expected {len(header)} fields, got {len(cells)}", row=lineno
            )
        record = dict(zip(header, cells))
        names = None
        if "covariate_names" in record and record["covariate_names"].strip():
            names = [n.strip() for n in record["covariate_names"].split(";")]
        try:
            studies.append(
                StudyCounts(
                    study_id=record["study_id"].strip(),
                    outcomes=_parse_int(record["outcomes"], lineno, "outcomes"),
                    predictors=_parse_int(record["predictors"], lineno, "predictors"),
                    lags=_parse_int(record["lags"], lineno, "lags"),
                    covariates=_parse_int(record["covariates"], lineno, "covariates"),
                    covariate_names=names,
                )
            )
        except ParseError:
            raise
        except ValueError as exc:
            raise ParseError(str(exc), row=lineno) from exc
    if not studies:
        raise ParseError(f"{path}: no study rows after the header")
    return studies


def read_effects_csv(path: str | Path) -> list[EffectRecord]:
    """Parse an effects CSV into EffectRecord rows.

    The level column is optional (default 0.95) and may be left empty per
    row; rows with ns=1 may leave all numeric fields empty.
    """
    path = Path(path)
    rows = _data_rows(path)
    try:
        _, header_cells = next(rows)
    except StopIteration:
        raise ParseError(
            f"{path}: empty file; expected header {','.join(EFFECTS_HEADER)}"
        ) from None
    header = _match_header(header_cells, [EFFECTS_HEADER, EFFECTS_HEADER_NO_LEVEL], path)

    records = []
    for lineno, cells in rows:
        if len(cells) != len(header):
            raise ParseError(
                f"expected {len(header)} fields, got {len(cells)}", row=lineno
            )
        record = dict(zip(header, cells))
        ns_cell = record["ns"].strip()
        if ns_cell not in ("0", "1", ""):
            raise ParseError(f"ns must be 0 or 1, got {ns_cell!r}", row=lineno, column="ns")
        level_cell = record.get("level", "").strip()
        level = _parse_float(level_cell, lineno, "level") if level_cell else 0.95
        try:
            if ns_cell == "1":
                records.append(
                    EffectRecord(
                        study_id=record["study_id"].strip(),
                        label=record["label"].strip(),
                        confidence_level=level,
                        not_significant_flag=True,
                    )
                )
            else:
                records.append(
                    EffectRecord(
                        study_id=record["study_id"].strip(),
                        label=record["label"].strip(),
                        ratio=_parse_float(record["ratio"], lineno, "ratio"),
                        ci_low=_parse_float(record["ci_low"], lineno, "ci_low"),
                        ci_high=_parse_float(record["ci_high"], lineno, "ci_high"),
                        confidence_level=level,
                    )
                )
        except ParseError:
            raise
        except ValueError as exc:
            raise ParseError(str(exc), row=lineno) from exc
    if not records:
        raise ParseError(f"{path}: no effect rows after the header")
    return records


def _format_json_float(value: float) -> str:
    if math.isnan(value) or math.isinf(value):
        return "null"
    return format(value, ".17g")


def _dump_json(value, out: io.StringIO, indent: int) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            out.write("{}")
            return
        out.write("{\n")
        for i, (key, item) in enumerate(value.items()):
            out.write(f'{pad}  "{key}": ')
            _dump_json(item, out, indent + 1)
            out.write(",\n" if i < len(value) - 1 else "\n")
        out.write(pad + "}")
    elif isinstance(value, (list, tuple)):
        if not value:
            out.write("[]")
            return
        out.write("[\n")
        for i, item in enumerate(value):
            out.write(pad + "  ")
            _dump_json(item, out, indent + 1)
            out.write(",\n" if i < len(value) - 1 else "\n")
        out.write(pad + "]")
    elif isinstance(value, bool):
        out.write("true" if value else "false")
    elif isinstance(value, float):
        out.write(_format_json_float(value))
    elif isinstance(value, int):
        out.write(str(value))
    elif value is None:
        out.write("null")
    else:
        out.write('"' + str(value).replace("\\", "\\\\").replace('"', '\\"') + '"')


def json_dumps(document) -> str:
    """Serialize to deterministic JSON: 17-significant-digit floats,
    insertion-ordered keys, two-space indent, trailing newline."""
    out = io.StringIO()
    _dump_json(document, out, 0)
    out.write("\n")
    return out.getvalue()


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def file_digest(path: str | Path) -> dict:
    # Record the basename, not the full path, so reports stay byte-identical
    # when the same inputs are audited from a different working directory.
    data = Path(path).read_bytes()
    return {"name": Path(path).name, "sha256": hashlib.sha256(data).hexdigest()}


def format_csv_value(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: Path, header: list[str], rows: list[tuple]) -> None:
    lines = [",".join(header)]
    lines += [",".join(format_csv_value(v) for v in row) for row in rows]
    _write_text(path, "\n".join(lines) + "\n")


def write_spaces_csv(
    path: str | Path, studies: list[StudyCounts], spaces: list[SearchSpace]
) -> None:
    rows = [
        (
            s.study_id,
            s.outcomes,
            s.predictors,
            s.lags,
            s.covariates,
            sp.space1,
            sp.space2,
            sp.space3,
        )
        for s, sp in zip(studies, spaces)
    ]
    write_csv(
        Path(path),
        ["study_id", "outcomes", "predictors", "lags", "covariates",
         "space1", "space2", "space3"],
        rows,
    )


def space_summary_document(summary: SpaceSummary) -> dict:
    return {
        "schema": REPORT_SCHEMA,
        "space1": asdict(summary.space1),
        "space2": asdict(summary.space2),
        "space3": asdict(summary.space3),
    }


def write_space_summary_json(path: str | Path, summary: SpaceSummary) -> None:
    _write_text(Path(path), json_dumps(space_summary_document(summary)))


def _test_result_section(result) -> dict | None:
    if result is None:
        return None
    return {
        "statistic": result.statistic,
        "p_value": result.p_value,
        "df": result.df,
        "method": result.method,
        "verdict": result.verdict,
    }


def build_report_document(
    report: AuditReport,
    digests: list[dict],
    studies: list[StudyCounts] | None = None,
    spaces: list[SearchSpace] | None = None,
    summary: SpaceSummary | None = None,
) -> dict:
    """Assemble the schema-versioned report JSON document."""
    notes = [
        "p-values derive from reported ratio confidence intervals via the "
        "log-scale normal approximation.",
        "the bilinearity diagnostic is a reconstruction: ordinary least "
        "squares of sorted p-values on rank and rank squared, with a t test "
        "on the quadratic term.",
    ]
    if report.plot.excluded_ns_count:
        notes.append(
            f"{report.plot.excluded_ns_count} records flagged not-significant "
            "were excluded from the plot and all diagnostics."
        )
    document = {
        "schema": REPORT_SCHEMA,
        "inputs_digest": digests,
        "spaces": None,
        "space_summary": space_summary_document(summary) if summary else None,
        "pvalues": [
            {"study_id": rec.study_id, "p": rec.p, "rank": rec.rank}
            for rec in report.pvalues
        ],
        "plot": {
            "n": report.plot.n,
            "excluded_ns_count": report.plot.excluded_ns_count,
            "points": [[rank, p] for rank, p in report.plot.points],
            "reference_line": [[rank, r] for rank, r in report.plot.reference_line],
        },
        "tests": {
            "uniformity": _test_result_section(report.uniformity),
            "bilinearity": _test_result_section(report.bilinearity),
            "hockey_stick": (
                None
                if report.hockey_stick is None
                else {
                    "breakpoint": report.hockey_stick.breakpoint,
                    "left_slope": report.hockey_stick.left_slope,
                    "right_slope": report.hockey_stick.right_slope,
                    "sse": report.hockey_stick.sse,
                }
            ),
        },
        "multiplicity": (
            None
            if report.multiplicity is None
            else {
                "alpha": report.multiplicity.alpha,
                "m": report.multiplicity.m,
                "adjusted_alpha": report.multiplicity.adjusted_alpha,
                "n_significant_raw": report.multiplicity.n_significant_raw,
                "n_significant_adjusted": report.multiplicity.n_significant_adjusted,
            }
        ),
        "notes": notes,
    }
    if studies is not None and spaces is not None:
        document["spaces"] = [
            {
                "study_id": s.study_id,
                "space1": sp.space1,
                "space2": sp.space2,
                "space3": sp.space3,
            }
            for s, sp in zip(studies, spaces)
        ]
    return document


def write_report_json(path: str | Path, document: dict) -> None:
    _write_text(Path(path), json_dumps(document))


def write_plot_csv(path: str | Path, report: AuditReport) -> None:
    rows = [
        (rank, p, ref)
        for (rank, p), (_, ref) in zip(
            report.plot.points, report.plot.reference_line
        )
    ]
    write_csv(Path(path), ["rank", "p", "reference"], rows)


def _fmt(value: float) -> str:
    return format(value, ".6g")


def write_report_markdown(path: str | Path, document: dict) -> None:
    """Render the report document as a human-readable markdown summary."""
    lines = ["# Reliability audit", ""]
    plot = document["plot"]
    lines.append(
        f"{plot['n']} usable p-values; {plot['excluded_ns_count']} "
        "not-significant records excluded."
    )
    lines += ["", "## Ranked p-values", "", "| rank | study | p |", "| --- | --- | --- |"]
    for rec in document["pvalues"]:
        lines.append(f"| {rec['rank']} | {rec['study_id']} | {_fmt(rec['p'])} |")
    lines += ["", "## Diagnostics", ""]
    for name in ("uniformity", "bilinearity", "hockey_stick"):
        section = document["tests"][name]
        if section is None:
            lines.append(f"- {name}: not run (too few points)")
        elif name == "hockey_stick":
            lines.append(
                f"- hockey_stick: breakpoint {section['breakpoint']}, "
                f"left slope {_fmt(section['left_slope'])}, "
                f"right slope {_fmt(section['right_slope'])}, "
                f"SSE {_fmt(section['sse'])}"
            )
        else:
            verdict = f" [{section['verdict']}]" if section["verdict"] else ""
            lines.append(
                f"- {name} ({section['method']}): statistic "
                f"{_fmt(section['statistic'])}, p {_fmt(section['p_value'])}{verdict}"
            )
    multiplicity = document["multiplicity"]
    if multiplicity is not None:
        lines += [
            "",
            "## Multiplicity",
            "",
            f"- search-space correction factor m = {_fmt(multiplicity['m'])}",
            f"- adjusted alpha = {_fmt(multiplicity['adjusted_alpha'])}",
            f"- significant at alpha: {multiplicity['n_significant_raw']}",
            f"- significant after adjustment: {multiplicity['n_significant_adjusted']}",
        ]
    lines += ["", "## Notes", ""]
    lines += [f"- {note}" for note in document["notes"]]
    _write_text(Path(path), "\n".join(lines) + "\n")


def write_sim_csv(path: str | Path, result: SimResult) -> None:
    """One row per published study, in replicate order."""
    rows = [
        (replicate, study, p, estimate)
        for replicate, study, p, estimate, published in result.records
        if published
    ]
    write_csv(Path(path), ["replicate", "study", "p", "estimate"], rows)


def sim_summary_document(config: SimConfig, result: SimResult) -> dict:
    return {
        "schema": REPORT_SCHEMA,
        "config": {
            "n_studies": config.n_studies,
            "tests_per_study": config.tests_per_study,
            "correlation": config.correlation,
            "true_effect": config.true_effect,
            "selection_rule": config.selection_rule,
            "alpha": config.alpha,
            "censor_at_alpha": config.censor_at_alpha,
            "replicates": config.replicates,
            "seed": config.seed,
        },
        "publication_rate": result.publication_rate,
        "bias": result.bias,
        "abs_bias": result.abs_bias,
        "mean_abs_estimate": result.mean_abs_estimate,
        "n_total": result.n_total,
        "n_published": result.n_published,
        "n_reported": len(result.reported_pvalues),
    }


def write_sim_summary_json(path: str | Path, config: SimConfig, result: SimResult) -> None:
    _write_text(Path(path), json_dumps(sim_summary_document(config, result)))


def write_effects_csv(path: str | Path, records: list[EffectRecord]) -> None:
    """Serialize effect records in the effects CSV format."""
    rows = []
    for rec in records:
        if rec.not_significant_flag:
            rows.append((rec.study_id, rec.label, "", "", "", rec.confidence_level, 1))
        else:
            rows.append(
                (
                    rec.study_id,
                    rec.label,
                    rec.ratio,
                    rec.ci_low,
                    rec.ci_high,
                    rec.confidence_level,
                    0,
                )
            )
    write_csv(Path(path), EFFECTS_HEADER, rows)
