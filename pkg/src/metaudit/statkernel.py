"""Numerical primitives shared by the auditing modules.

Everything here is a pure function of its arguments, built on the math
stdlib only: standard normal CDF and quantile, Student's t survival
function, ordinary least squares with per-coefficient t tests, a
one-sample Kolmogorov-Smirnov uniformity test, and (n+1)-position
linear-interpolation quantiles.
"""

from __future__ import annotations

import math
import statistics
import sys
from dataclasses import dataclass
from typing import Sequence

_SQRT_HALF = math.sqrt(0.5)
_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)
_EPS = sys.float_info.epsilon

# Degenerate (exact-fit) OLS regressions make the t statistic a 0/0 ratio of
# rounding noise; fits whose residual norm is below this multiple of machine
# epsilon are treated as exact and coefficients are snapped to 0 or +-inf.
_EXACT_FIT_FACTOR = 1e4 * _EPS


class RankDeficiencyError(ValueError):
    """Design matrix column is (numerically) linearly dependent on earlier ones."""

    def __init__(self, column: int):
        self.column = column
        super().__init__(
            f"design matrix is rank deficient: column {column} is linearly "
            "dependent on the preceding columns"
        )


@dataclass
class TestResult:
    """Outcome of one diagnostic test.

    ``df`` is present exactly when the reference distribution is Student's t.
    ``verdict`` is set when a threshold rule overrides interpretation (for
    example "insufficient data" on very short inputs).
    """

    statistic: float
    p_value: float
    df: float | None = None
    method: str = ""
    verdict: str | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p_value {self.p_value} outside [0, 1]")


@dataclass
class OlsFit:
    """Least-squares fit with per-coefficient inference (df = n - k)."""

    coefficients: list[float]
    standard_errors: list[float]
    t_statistics: list[float]
    p_values: list[float]
    df: int
    rss: float


def std_normal_cdf(x: float) -> float:
    """Standard normal CDF, absolute error below 1e-9 for |x| <= 8.

    Evaluated through the complementary error function, which keeps the
    tails accurate to machine precision.
    """
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x!r}")
    return 0.5 * math.erfc(-x * _SQRT_HALF)


def std_normal_sf(x: float) -> float:
    """Upper tail P(Z > x), computed without cancellation near 1."""
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x!r}")
    return 0.5 * math.erfc(x * _SQRT_HALF)


def std_normal_quantile(p: float) -> float:
    """Inverse standard normal CDF on the open interval (0, 1).

    Uses the stdlib rational approximation plus one Newton refinement
    against ``std_normal_cdf``, so the round trip holds to well below the
    contracted 1e-9 in probability space.
    """
    if not (isinstance(p, (int, float)) and 0.0 < p < 1.0):
        raise ValueError(f"p must lie strictly between 0 and 1, got {p!r}")
    x = statistics.NormalDist().inv_cdf(p)
    pdf = math.exp(-0.5 * x * x) / _SQRT_TWO_PI
    if pdf > 1e-300:
        x -= (std_normal_cdf(x) - p) / pdf
    return x


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    # Lentz's algorithm for the incomplete-beta continued fraction.
    # Iteration count grows like sqrt(max(a, b)) when x sits near the
    # a/(a+b) crossover, hence the generous cap.
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 4001):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 3e-16:
            return h
    raise ArithmeticError(
        f"incomplete beta continued fraction failed to converge (a={a}, b={b}, x={x})"
    )


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b), relative error <= 1e-8."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x!r}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def student_t_sf(t: float, df: float) -> float:
    """Upper tail P(T > t) for Student's t with ``df`` degrees of freedom."""
    if not math.isfinite(t):
        raise ValueError(f"t must be finite, got {t!r}")
    if not (math.isfinite(df) and df >= 1.0):
        raise ValueError(f"df must be a real number >= 1, got {df!r}")
    if t == 0.0:
        return 0.5
    x = df / (df + t * t)
    tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x)
    return tail if t > 0.0 else 1.0 - tail


def _two_sided_t_p(t: float, df: int) -> float:
    if math.isinf(t):
        return 0.0
    return min(1.0, 2.0 * student_t_sf(abs(t), df))


def ols_fit(design: Sequence[Sequence[float]], response: Sequence[float]) -> OlsFit:
    """Ordinary least squares of ``response`` on the columns of ``design``.

    The design matrix must already contain any intercept column.  Solves the
    normal equations on column-equilibrated data via Cholesky; a failing
    pivot identifies the offending column.  Residual variance uses divisor
    n - k and each coefficient gets a two-sided t test on n - k degrees of
    freedom.

    Exact fits (residual norm at rounding level) would make t a ratio of
    noise terms, so there each t is snapped to 0 when the coefficient is
    itself at rounding level and to signed infinity otherwise.
    """
    n = len(design)
    if n == 0:
        raise ValueError("design matrix has no rows")
    k = len(design[0])
    if k == 0:
        raise ValueError("design matrix has no columns")
    if any(len(row) != k for row in design):
        raise ValueError("design matrix rows have inconsistent lengths")
    if len(response) != n:
        raise ValueError(f"response length {len(response)} != row count {n}")
    if n <= k:
        raise ValueError(f"need more observations than regressors (n={n}, k={k})")
    for i, row in enumerate(design):
        for j, v in enumerate(row):
            if not math.isfinite(v):
                raise ValueError(f"non-finite design entry at row {i}, column {j}")
    for i, v in enumerate(response):
        if not math.isfinite(v):
            raise ValueError(f"non-finite response entry at row {i}")

    col_norms: list[float] = []
    for j in range(k):
        norm = math.sqrt(math.fsum(design[i][j] ** 2 for i in range(n)))
        if norm == 0.0:
            raise RankDeficiencyError(j)
        col_norms.append(norm)
    xs = [[design[i][j] / col_norms[j] for j in range(k)] for i in range(n)]

    gram = [
        [math.fsum(xs[i][a] * xs[i][b] for i in range(n)) for b in range(k)]
        for a in range(k)
    ]
    xty = [math.fsum(xs[i][a] * response[i] for i in range(n)) for a in range(k)]

    # Cholesky on the unit-diagonal Gram matrix; pivots near zero flag the
    # first column explained by its predecessors.
    lower = [[0.0] * k for _ in range(k)]
    for j in range(k):
        pivot = gram[j][j] - math.fsum(lower[j][m] ** 2 for m in range(j))
        if pivot <= 1e-10:
            raise RankDeficiencyError(j)
        lower[j][j] = math.sqrt(pivot)
        for i in range(j + 1, k):
            lower[i][j] = (
                gram[i][j] - math.fsum(lower[i][m] * lower[j][m] for m in range(j))
            ) / lower[j][j]

    def cholesky_solve(rhs: list[float]) -> list[float]:
        fwd = [0.0] * k
        for i in range(k):
            fwd[i] = (rhs[i] - math.fsum(lower[i][m] * fwd[m] for m in range(i))) / lower[i][i]
        back = [0.0] * k
        for i in reversed(range(k)):
            back[i] = (
                fwd[i] - math.fsum(lower[m][i] * back[m] for m in range(i + 1, k))
            ) / lower[i][i]
        return back

    scaled_coefs = cholesky_solve(xty)
    coefficients = [scaled_coefs[j] / col_norms[j] for j in range(k)]

    residuals = [
        response[i] - math.fsum(design[i][j] * coefficients[j] for j in range(k))
        for i in range(n)
    ]
    rss = math.fsum(r * r for r in residuals)
    df = n - k

    inv_diag_scaled = []
    for j in range(k):
        unit = [0.0] * k
        unit[j] = 1.0
        inv_diag_scaled.append(cholesky_solve(unit)[j])

    response_norm = math.sqrt(math.fsum(v * v for v in response))
    noise_floor = _EXACT_FIT_FACTOR * (1.0 + response_norm)
    exact_fit = rss <= noise_floor * noise_floor * n

    standard_errors: list[float] = []
    t_statistics: list[float] = []
    p_values: list[float] = []
    sigma2 = rss / df
    for j in range(k):
        if exact_fit:
            standard_errors.append(0.0)
            if abs(scaled_coefs[j]) <= noise_floor:
                t_statistics.append(0.0)
                p_values.append(1.0)
            else:
                t_statistics.append(math.copysign(math.inf, scaled_coefs[j]))
                p_values.append(0.0)
            continue
        se = math.sqrt(sigma2 * inv_diag_scaled[j]) / col_norms[j]
        standard_errors.append(se)
        t = coefficients[j] / se
        t_statistics.append(t)
        p_values.append(_two_sided_t_p(t, df))

    return OlsFit(
        coefficients=coefficients,
        standard_errors=standard_errors,
        t_statistics=t_statistics,
        p_values=p_values,
        df=df,
        rss=rss,
    )


def kolmogorov_sf(lam: float) -> float:
    """Survival function of the Kolmogorov distribution at ``lam``.

    Uses the theta-function form for small arguments and the alternating
    exponential series otherwise; both agree to machine precision at the
    1.18 switch point.
    """
    if lam <= 0.0:
        return 1.0
    if lam < 1.18:
        q = math.exp(-math.pi * math.pi / (8.0 * lam * lam))
        total = q + q**9 + q**25 + q**49
        return max(0.0, min(1.0, 1.0 - _SQRT_TWO_PI / lam * total))
    total = 0.0
    for j in range(1, 101):
        term = math.exp(-2.0 * j * j * lam * lam)
        total += term if j % 2 == 1 else -term
        if term < 1e-17:
            break
    return max(0.0, min(1.0, 2.0 * total))


def ks_uniform_test(values: Sequence[float]) -> TestResult:
    """One-sample Kolmogorov-Smirnov test against the uniform distribution.

    The statistic is the exact sup-norm distance between the empirical CDF
    and U(0, 1), max over order statistics of max(i/n - v(i), v(i) - (i-1)/n).
    The p-value applies the asymptotic Kolmogorov tail to the small-sample
    rescaling (sqrt(n) + 0.12 + 0.11/sqrt(n)) * D; for n >= 10 it is within
    about 0.01 of the exact finite-n value.
    """
    n = len(values)
    if n == 0:
        raise ValueError("ks_uniform_test needs at least one value")
    for v in values:
        if not (isinstance(v, (int, float)) and 0.0 <= v <= 1.0):
            raise ValueError(f"values must lie in [0, 1], got {v!r}")
    ordered = sorted(values)
    d = 0.0
    for i, v in enumerate(ordered, start=1):
        d = max(d, i / n - v, v - (i - 1) / n)
    sqrt_n = math.sqrt(n)
    lam = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d
    return TestResult(statistic=d, p_value=kolmogorov_sf(lam), method="ks-uniform")


def quantile_type6(values: Sequence[float], p: float) -> float:
    """Sample quantile with (n+1)-position linear interpolation.

    Position h = (n + 1) * p is clamped to [1, n]; the result interpolates
    between the floor(h)-th and next order statistics.  This convention is
    what the cross-study summary tables are locked to.
    """
    n = len(values)
    if n == 0:
        raise ValueError("quantile of empty list")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    ordered = sorted(values)
    h = (n + 1) * p
    h = min(max(h, 1.0), float(n))
    lo = int(math.floor(h))
    frac = h - lo
    if lo >= n:
        return float(ordered[n - 1])
    return ordered[lo - 1] + frac * (ordered[lo] - ordered[lo - 1])
