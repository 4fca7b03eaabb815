"""Reliability diagnostics for a set of reported ratio statistics.

Turns each study's risk ratio and confidence interval into a two-sided
p-value on the log-ratio scale, ranks the p-values into a p-value plot
against the uniform reference line i/(n+1), and runs the diagnostics the
audit verdict rests on: a Kolmogorov-Smirnov uniformity test, a
quadratic-in-rank bilinearity test, a two-segment hockey-stick fit, and a
multiple-testing threshold report.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from metaudit.searchspace import SpaceSummary
from metaudit.statkernel import (
    TestResult,
    ks_uniform_test,
    ols_fit,
    std_normal_quantile,
)

_SQRT_HALF = math.sqrt(0.5)

# Lower clamp keeps downstream log-scale report math out of the subnormal
# range; upper clamp absorbs rounding past 1.
P_FLOOR = 1e-300

INSUFFICIENT_DATA = "insufficient data"

# Below these sizes a diagnostic is still computed (or skipped) but cannot
# carry evidential weight.
MIN_POINTS_UNIFORMITY = 5
MIN_POINTS_BILINEARITY = 4
MIN_POINTS_HOCKEY_STICK = 6


class NoPlottableRecordsError(ValueError):
    """Every input record was flagged not-significant; nothing to plot."""


@dataclass
class EffectRecord:
    """One study's reported ratio statistic.

    Studies that reported only "not significant" carry
    ``not_significant_flag=True`` and may leave the numeric fields unset;
    such records are excluded from conversion and counted separately.
    """

    study_id: str
    label: str = ""
    ratio: float | None = None
    ci_low: float | None = None
    ci_high: float | None = None
    confidence_level: float = 0.95
    not_significant_flag: bool = False

    def __post_init__(self) -> None:
        if not self.study_id:
            raise ValueError("study_id must be non-empty")
        if not 0.5 < self.confidence_level < 1.0:
            raise ValueError(
                f"confidence_level must lie in (0.5, 1), got {self.confidence_level!r}"
            )
        if self.not_significant_flag:
            return
        for name in ("ratio", "ci_low", "ci_high"):
            value = getattr(self, name)
            if value is None or not math.isfinite(value) or value <= 0.0:
                raise ValueError(
                    f"study {self.study_id!r}: {name} must be a positive real, got {value!r}"
                )
        if not self.ci_low <= self.ratio <= self.ci_high:
            raise ValueError(
                f"study {self.study_id!r}: ratio {self.ratio} outside its interval "
                f"[{self.ci_low}, {self.ci_high}]"
            )


@dataclass
class PValueRecord:
    study_id: str
    p: float
    rank: int

    def __post_init__(self) -> None:
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"p must lie in (0, 1], got {self.p!r}")
        if not isinstance(self.rank, int) or isinstance(self.rank, bool) or self.rank < 1:
            raise ValueError(f"rank must be a positive integer, got {self.rank!r}")


@dataclass
class PValuePlot:
    """Rank-ordered p-values with the uniform reference line i/(n+1)."""

    points: list[tuple[int, float]]
    reference_line: list[tuple[int, float]]
    excluded_ns_count: int
    n: int


@dataclass
class HockeyStickFit:
    """Best two-segment piecewise-linear fit to the ranked p-values."""

    breakpoint: int
    left_slope: float
    right_slope: float
    sse: float


@dataclass
class MultiplicityReport:
    alpha: float
    m: float
    adjusted_alpha: float
    n_significant_raw: int
    n_significant_adjusted: int


@dataclass
class AuditReport:
    """Full diagnostic bundle for one set of effect records."""

    pvalues: list[PValueRecord]
    plot: PValuePlot
    uniformity: TestResult
    bilinearity: TestResult | None
    hockey_stick: HockeyStickFit | None
    multiplicity: MultiplicityReport | None
    alpha: float


def p_from_ratio_ci(record: EffectRecord) -> float:
    """Two-sided p-value recovered from a ratio and its confidence interval.

    Works on the log scale, where ratio statistics are treated as normal:
    the standard error is the log-interval half-width over the critical
    value z for the record's confidence level, and the p-value is
    2 * (1 - cdf(|log ratio| / se)), clamped to [1e-300, 1].
    """
    if record.not_significant_flag:
        raise ValueError(
            f"study {record.study_id!r} is flagged not-significant; it has no "
            "numeric interval to convert"
        )
    if record.ci_low == record.ci_high:
        raise ValueError(
            f"study {record.study_id!r}: degenerate interval "
            f"[{record.ci_low}, {record.ci_high}]"
        )
    if not record.ci_low <= record.ratio <= record.ci_high:
        raise ValueError(
            f"study {record.study_id!r}: ratio {record.ratio} outside its interval"
        )
    z = std_normal_quantile(0.5 * (1.0 + record.confidence_level))
    se = (math.log(record.ci_high) - math.log(record.ci_low)) / (2.0 * z)
    statistic = math.log(record.ratio) / se
    # erfc(|s|/sqrt(2)) equals 2*(1 - cdf(|s|)) without cancellation.
    p = math.erfc(abs(statistic) * _SQRT_HALF)
    return min(1.0, max(P_FLOOR, p))


def record_from_statistic(
    study_id: str,
    statistic: float,
    standard_error: float,
    confidence_level: float = 0.95,
    label: str = "",
) -> EffectRecord:
    """Inverse of p_from_ratio_ci: lay a ratio interval around a z statistic.

    Useful for feeding simulated test statistics into the audit pipeline;
    p_from_ratio_ci recovers exactly 2 * (1 - cdf(|statistic|)) from the
    returned record.
    """
    if not math.isfinite(statistic):
        raise ValueError(f"statistic must be finite, got {statistic!r}")
    if not standard_error > 0:
        raise ValueError(f"standard_error must be positive, got {standard_error!r}")
    z = std_normal_quantile(0.5 * (1.0 + confidence_level))
    return EffectRecord(
        study_id=study_id,
        label=label,
        ratio=math.exp(statistic * standard_error),
        ci_low=math.exp((statistic - z) * standard_error),
        ci_high=math.exp((statistic + z) * standard_error),
        confidence_level=confidence_level,
    )


def _ranked_pvalues(records: list[EffectRecord]) -> tuple[list[PValueRecord], int]:
    numeric = [r for r in records if not r.not_significant_flag]
    excluded = len(records) - len(numeric)
    converted = sorted(
        ((p_from_ratio_ci(r), r.study_id) for r in numeric),
        key=lambda pair: (pair[0], pair[1]),
    )
    ranked = [
        PValueRecord(study_id=sid, p=p, rank=i)
        for i, (p, sid) in enumerate(converted, start=1)
    ]
    return ranked, excluded


def build_pvalue_plot(records: list[EffectRecord]) -> PValuePlot:
    """Rank the convertible records and pair them with the uniform reference.

    Not-significant records are excluded from the plot but counted in
    ``excluded_ns_count``.  Ties in p are broken by study id so output is
    reproducible across runs and platforms.
    """
    if not records:
        raise NoPlottableRecordsError("no effect records given")
    ranked, excluded = _ranked_pvalues(records)
    if not ranked:
        raise NoPlottableRecordsError(
            "every record is flagged not-significant; nothing to plot"
        )
    n = len(ranked)
    return PValuePlot(
        points=[(r.rank, r.p) for r in ranked],
        reference_line=[(i, i / (n + 1)) for i in range(1, n + 1)],
        excluded_ns_count=excluded,
        n=n,
    )


def uniformity_test(plot: PValuePlot) -> TestResult:
    """Kolmogorov-Smirnov test of the plotted p-values against U(0, 1).

    A high p-value is consistent with a straight reference-line plot, the
    signature of no underlying effect.  With fewer than 5 points the result
    carries the verdict "insufficient data".
    """
    values = [p for _, p in plot.points]
    result = ks_uniform_test(values)
    if plot.n < MIN_POINTS_UNIFORMITY:
        return dataclasses.replace(result, verdict=INSUFFICIENT_DATA)
    return result


def bilinearity_test(plot: PValuePlot) -> TestResult:
    """t test of the quadratic term in a rank-squared regression.

    Regresses the sorted p-values on {1, rank, rank^2} and reports the
    quadratic coefficient's two-sided t test on n - 3 degrees of freedom.
    A small p-value indicates the ranked p-values bend, the two-regime
    shape left behind when selected small p-values are mixed with null
    results.
    """
    if plot.n < MIN_POINTS_BILINEARITY:
        raise ValueError(
            f"bilinearity test needs at least {MIN_POINTS_BILINEARITY} points, got {plot.n}"
        )
    design = [[1.0, float(i), float(i * i)] for i, _ in plot.points]
    response = [p for _, p in plot.points]
    fit = ols_fit(design, response)
    return TestResult(
        statistic=fit.t_statistics[2],
        p_value=fit.p_values[2],
        df=float(fit.df),
        method="quadratic-ols",
    )


def _line_fit(xs: list[float], ys: list[float]) -> tuple[float, float, float]:
    # Closed-form simple regression; handles the 2-point segments the
    # breakpoint scan produces (exact fit, zero SSE).
    n = len(xs)
    x_mean = math.fsum(xs) / n
    y_mean = math.fsum(ys) / n
    sxx = math.fsum((x - x_mean) ** 2 for x in xs)
    sxy = math.fsum((x - x_mean) * (y - y_mean) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = y_mean - slope * x_mean
    sse = math.fsum((y - intercept - slope * x) ** 2 for x, y in zip(xs, ys))
    return intercept, slope, sse


def hockey_stick_fit(plot: PValuePlot) -> HockeyStickFit:
    """Best split of the ranked p-values into two least-squares lines.

    Scans every breakpoint k that leaves at least two points per segment,
    fits the segments independently, and keeps the k with the smallest
    total SSE (ties go to the smaller k).  A flat left segment followed by
    a much steeper right segment is the hockey-stick signature.
    """
    n = plot.n
    if n < MIN_POINTS_HOCKEY_STICK:
        raise ValueError(
            f"insufficient points for a hockey-stick fit: need at least "
            f"{MIN_POINTS_HOCKEY_STICK}, got {n}"
        )
    xs = [float(i) for i, _ in plot.points]
    ys = [p for _, p in plot.points]
    best: HockeyStickFit | None = None
    for k in range(2, n - 1):
        _, left_slope, left_sse = _line_fit(xs[:k], ys[:k])
        _, right_slope, right_sse = _line_fit(xs[k:], ys[k:])
        total = left_sse + right_sse
        if best is None or total < best.sse:
            best = HockeyStickFit(
                breakpoint=k,
                left_slope=left_slope,
                right_slope=right_slope,
                sse=total,
            )
    assert best is not None
    return best


def multiplicity_report(
    pvalues: list[float], alpha: float, m: float
) -> MultiplicityReport:
    """Counts of significant p-values before and after threshold division.

    ``m`` is the size of the analysis search space being corrected for;
    the adjusted threshold is alpha / m and counts are strict.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    if m < 1:
        raise ValueError(f"m must be at least 1, got {m!r}")
    adjusted = alpha / m
    return MultiplicityReport(
        alpha=alpha,
        m=float(m),
        adjusted_alpha=adjusted,
        n_significant_raw=sum(1 for p in pvalues if p < alpha),
        n_significant_adjusted=sum(1 for p in pvalues if p < adjusted),
    )


def audit(
    records: list[EffectRecord],
    spaces: SpaceSummary | None = None,
    alpha: float = 0.05,
) -> AuditReport:
    """Run the full diagnostic pipeline over a set of effect records.

    Converts every non-flagged record to a p-value, builds the plot, and
    runs the uniformity, bilinearity and hockey-stick diagnostics that the
    plot supports at its size.  When a cross-study space summary is given,
    its median total-analyses count becomes the correction factor of the
    multiplicity report.
    """
    if not records:
        raise NoPlottableRecordsError("no effect records given")
    ranked, _ = _ranked_pvalues(records)
    plot = build_pvalue_plot(records)
    uniformity = uniformity_test(plot)
    bilinearity = (
        bilinearity_test(plot) if plot.n >= MIN_POINTS_BILINEARITY else None
    )
    hockey = hockey_stick_fit(plot) if plot.n >= MIN_POINTS_HOCKEY_STICK else None
    multiplicity = None
    if spaces is not None:
        multiplicity = multiplicity_report(
            [r.p for r in ranked], alpha, spaces.space3.median
        )
    return AuditReport(
        pvalues=ranked,
        plot=plot,
        uniformity=uniformity,
        bilinearity=bilinearity,
        hockey_stick=hockey,
        multiplicity=multiplicity,
        alpha=alpha,
    )
