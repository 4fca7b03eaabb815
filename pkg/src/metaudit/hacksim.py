"""Monte Carlo engine for selection-driven publication bias.

Each simulated study runs K correlated tests and reports one of them
according to a selection rule; searching a large test space and reporting
the best draw produces small p-values whose attached estimates are biased
away from the true effect, and mixtures of selected and honest studies
reproduce the bent p-value plots the audit diagnostics look for.

Reproducibility contract: every replicate draws from its own
counter-based substream keyed by (seed, replicate index), so identical
configs give bit-identical results regardless of execution order, and
aggregation always reduces in replicate order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_SQRT_HALF = math.sqrt(0.5)

SELECTION_RULES = ("report-min-p", "report-first-significant", "report-random")

# Pre-flight budget: replicates * n_studies * (tests_per_study + 1) draws.
MAX_TOTAL_DRAWS = 10**9

U64_MAX = 2**64 - 1


@dataclass
class SimConfig:
    """Parameters of one simulation scenario.

    ``tests_per_study`` is the size K of the search space each analyst
    explores; ``correlation`` is the equicorrelation among a study's K test
    statistics; ``true_effect`` shifts every statistic on the z scale, with
    0 the null.  ``censor_at_alpha`` drops studies whose selected p-value
    fails the publication screen from the reported lists.
    """

    n_studies: int = 1
    tests_per_study: int = 1
    correlation: float = 0.0
    true_effect: float = 0.0
    selection_rule: str = "report-min-p"
    alpha: float = 0.05
    censor_at_alpha: bool = False
    replicates: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.n_studies, int) or self.n_studies < 1:
            raise ValueError(f"n_studies must be a positive integer, got {self.n_studies!r}")
        if not isinstance(self.tests_per_study, int) or self.tests_per_study < 1:
            raise ValueError(
                f"tests_per_study must be a positive integer, got {self.tests_per_study!r}"
            )
        if not 0.0 <= self.correlation < 1.0:
            raise ValueError(
                f"correlation must be < 1 and >= 0, got {self.correlation!r}"
            )
        if not math.isfinite(self.true_effect):
            raise ValueError(f"true_effect must be finite, got {self.true_effect!r}")
        if self.selection_rule not in SELECTION_RULES:
            raise ValueError(
                f"selection_rule must be one of {', '.join(SELECTION_RULES)}, "
                f"got {self.selection_rule!r}"
            )
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not isinstance(self.replicates, int) or self.replicates < 1:
            raise ValueError(f"replicates must be a positive integer, got {self.replicates!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed <= U64_MAX:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")

    def total_draws(self) -> int:
        return self.replicates * self.n_studies * (self.tests_per_study + 1)


@dataclass
class SimResult:
    """Aggregated outcome of a simulation run.

    ``records`` holds one row per simulated study in replicate order:
    (replicate, study, selected_p, selected_estimate, published).  The
    reported lists contain published studies only when censoring is on,
    all studies otherwise.  ``bias`` is the signed mean estimate minus the
    true effect; ``mean_abs_estimate`` exposes the magnitude summary that
    the signed mean hides under the null.
    """

    reported_pvalues: list[float]
    selected_estimates: list[float]
    publication_rate: float
    bias: float
    abs_bias: float
    mean_abs_estimate: float
    n_total: int
    n_published: int
    records: list[tuple[int, int, float, float, bool]] = field(repr=False, default_factory=list)


def substream(seed: int, replicate: int) -> np.random.Generator:
    """Independent counter-based random stream for one replicate.

    Philox streams with distinct 128-bit keys never overlap, so deriving
    the key from (seed, replicate) makes every replicate reproducible in
    isolation and in any execution order.
    """
    return np.random.Generator(np.random.Philox(key=(seed << 64) | replicate))


def simulate_study(config: SimConfig, stream: np.random.Generator) -> tuple[float, float]:
    """Simulate one study's search and report the selected (p, estimate).

    Draws K equicorrelated z statistics through a shared factor,
    z_j = delta + sqrt(rho) * g + sqrt(1 - rho) * e_j, converts each to a
    two-sided p-value, and applies the configured selection rule.
    report-first-significant falls back to the first (pre-planned) test
    when no draw clears alpha.
    """
    k = config.tests_per_study
    shared = stream.standard_normal()
    noise = stream.standard_normal(k)
    load = math.sqrt(config.correlation)
    resid = math.sqrt(1.0 - config.correlation)
    z = [config.true_effect + load * shared + resid * e for e in noise]
    p = [math.erfc(abs(v) * _SQRT_HALF) for v in z]

    if config.selection_rule == "report-min-p":
        idx = min(range(k), key=p.__getitem__)
    elif config.selection_rule == "report-first-significant":
        idx = next((j for j in range(k) if p[j] < config.alpha), 0)
    else:
        idx = int(stream.integers(k))
    return p[idx], z[idx]


def run_simulation(config: SimConfig) -> SimResult:
    """Run the configured number of independent replicates.

    Identical configs produce bit-identical results: each replicate uses
    its keyed substream and all floating-point reductions run in replicate
    order.
    """
    if config.total_draws() > MAX_TOTAL_DRAWS:
        raise ValueError(
            f"resource limit: replicates * n_studies * (tests_per_study + 1) = "
            f"{config.total_draws()} draws exceeds the cap of {MAX_TOTAL_DRAWS}"
        )
    records: list[tuple[int, int, float, float, bool]] = []
    for replicate in range(config.replicates):
        stream = substream(config.seed, replicate)
        for study in range(config.n_studies):
            p, estimate = simulate_study(config, stream)
            records.append((replicate, study, p, estimate, p < config.alpha))

    n_total = len(records)
    n_published = sum(1 for rec in records if rec[4])
    if config.censor_at_alpha:
        reported = [rec for rec in records if rec[4]]
    else:
        reported = records
    pvalues = [rec[2] for rec in reported]
    estimates = [rec[3] for rec in reported]

    if estimates:
        mean_estimate = math.fsum(estimates) / len(estimates)
        mean_abs = math.fsum(abs(e) for e in estimates) / len(estimates)
        bias = mean_estimate - config.true_effect
        abs_bias = mean_abs - abs(config.true_effect)
    else:
        bias = abs_bias = mean_abs = math.nan

    return SimResult(
        reported_pvalues=pvalues,
        selected_estimates=estimates,
        publication_rate=n_published / n_total,
        bias=bias,
        abs_bias=abs_bias,
        mean_abs_estimate=mean_abs,
        n_total=n_total,
        n_published=n_published,
        records=records,
    )


def selection_bias(result: SimResult, config: SimConfig) -> float:
    """Signed bias of the reported estimates: mean estimate minus the truth."""
    if not result.selected_estimates:
        raise ValueError("no reported estimates: every study was censored")
    return math.fsum(result.selected_estimates) / len(result.selected_estimates) - config.true_effect
