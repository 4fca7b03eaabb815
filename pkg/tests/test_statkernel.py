"""Tests for the numerical primitives, checked against independent oracles.

Oracles used here: mpmath high-precision special functions for the normal
CDF, t survival function and Kolmogorov series; exact rational (Fraction)
normal-equation solves for least squares; brute-force enumeration over all
step discrepancies for the KS statistic.
"""

import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metaudit.statkernel import (
    RankDeficiencyError,
    kolmogorov_sf,
    ks_uniform_test,
    ols_fit,
    quantile_type6,
    regularized_incomplete_beta,
    std_normal_cdf,
    std_normal_quantile,
    student_t_sf,
)
from metaudit.statkernel import TestResult as StatTestResult

mpmath.mp.dps = 40


def phi_oracle(x: float) -> float:
    return float(mpmath.ncdf(x))


def t_sf_oracle(t: float, df: float) -> float:
    x = mpmath.mpf(df) / (df + mpmath.mpf(t) ** 2)
    half = mpmath.betainc(mpmath.mpf(df) / 2, mpmath.mpf("0.5"), 0, x, regularized=True) / 2
    return float(half if t > 0 else 1 - half)


def kolmogorov_oracle(lam: float) -> float:
    if lam <= 0:
        return 1.0
    s = mpmath.nsum(
        lambda j: (-1) ** (j - 1) * mpmath.exp(-2 * j**2 * mpmath.mpf(lam) ** 2),
        [1, mpmath.inf],
    )
    return float(2 * s)


def ks_statistic_brute_force(values: list[float]) -> float:
    # Enumerate all 2n candidate discrepancies between the empirical CDF
    # steps and the U(0,1) CDF.
    ordered = sorted(values)
    n = len(ordered)
    candidates = []
    for i, v in enumerate(ordered, start=1):
        candidates.append(i / n - v)
        candidates.append(v - (i - 1) / n)
    return max(candidates)


def solve_exact(design: list[list[Fraction]], response: list[Fraction]) -> list[Fraction]:
    # Exact rational Gauss-Jordan on the normal equations.
    k = len(design[0])
    n = len(design)
    gram = [
        [sum(design[i][a] * design[i][b] for i in range(n)) for b in range(k)]
        for a in range(k)
    ]
    rhs = [sum(design[i][a] * response[i] for i in range(n)) for a in range(k)]
    aug = [gram[i][:] + [rhs[i]] for i in range(k)]
    for col in range(k):
        pivot_row = next(r for r in range(col, k) if aug[r][col] != 0)
        aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        for r in range(k):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col] / aug[col][col]
                aug[r] = [aug[r][j] - factor * aug[col][j] for j in range(k + 1)]
    return [aug[i][k] / aug[i][i] for i in range(k)]


class TestStdNormalCdf:
    def test_zero_is_half(self):
        assert std_normal_cdf(0.0) == 0.5

    def test_critical_value(self):
        assert std_normal_cdf(1.959964) == pytest.approx(0.975, abs=1e-6)

    @pytest.mark.parametrize("x", [-8.0, -5.5, -2.0, -0.3, 0.7, 1.0, 3.25, 6.0, 8.0])
    def test_against_high_precision_oracle(self, x):
        assert std_normal_cdf(x) == pytest.approx(phi_oracle(x), abs=1e-9)

    @given(st.floats(min_value=-8, max_value=8, allow_nan=False))
    def test_reflection_identity(self, x):
        assert std_normal_cdf(x) + std_normal_cdf(-x) == pytest.approx(1.0, abs=1e-12)

    def test_monotone_on_random_pairs(self):
        rng = random.Random(20240917)
        for _ in range(1000):
            a = rng.uniform(-10, 10)
            b = rng.uniform(-10, 10)
            lo, hi = min(a, b), max(a, b)
            assert std_normal_cdf(lo) <= std_normal_cdf(hi)

    @pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(ValueError):
            std_normal_cdf(bad)


class TestStdNormalQuantile:
    def test_median_is_zero(self):
        assert std_normal_quantile(0.5) == pytest.approx(0.0, abs=1e-12)

    def test_upper_critical_value(self):
        assert std_normal_quantile(0.975) == pytest.approx(1.959964, abs=1e-5)

    @pytest.mark.parametrize("x", [-3.0, -1.0, 0.0, 1.0, 3.0])
    def test_round_trip_from_x(self, x):
        assert std_normal_quantile(std_normal_cdf(x)) == pytest.approx(x, abs=1e-7)

    @pytest.mark.parametrize("p", [1e-10, 1e-4, 0.025, 0.31, 0.5, 0.84, 0.999, 1 - 1e-9])
    def test_cdf_round_trip_within_contract(self, p):
        assert std_normal_cdf(std_normal_quantile(p)) == pytest.approx(p, abs=1e-9)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.2, 1.7, math.nan])
    def test_rejects_outside_open_interval(self, p):
        with pytest.raises(ValueError):
            std_normal_quantile(p)


class TestStudentTSf:
    @pytest.mark.parametrize("df", [1, 2.5, 7, 100])
    def test_symmetry_point(self, df):
        assert student_t_sf(0.0, df) == 0.5

    @pytest.mark.parametrize("t", [0.25, 1.0, 2.0, 10.0])
    def test_df1_closed_form(self, t):
        exact = 0.5 - math.atan(t) / math.pi
        assert student_t_sf(t, 1) == pytest.approx(exact, rel=1e-8)

    def test_huge_df_matches_normal_tail(self):
        assert student_t_sf(1.959964, 1e6) == pytest.approx(0.025, abs=1e-4)

    @pytest.mark.parametrize("df", [1, 2, 3, 5, 11, 30, 120, 1e4])
    @pytest.mark.parametrize("t", [0.5, 1.7, 4.0, -2.2])
    def test_against_incomplete_beta_oracle(self, df, t):
        assert student_t_sf(t, df) == pytest.approx(t_sf_oracle(t, df), rel=1e-8)

    @pytest.mark.parametrize("df", [0.5, 0.0, -3])
    def test_rejects_small_df(self, df):
        with pytest.raises(ValueError):
            student_t_sf(1.0, df)

    def test_rejects_non_finite_t(self):
        with pytest.raises(ValueError):
            student_t_sf(math.inf, 5)

    def test_incomplete_beta_bounds(self):
        assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
        assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0
        with pytest.raises(ValueError):
            regularized_incomplete_beta(-1.0, 2.0, 0.5)


class TestOlsFit:
    def test_exact_line(self):
        design = [[1.0, 1.0], [1.0, 2.0], [1.0, 3.0]]
        fit = ols_fit(design, [2.0, 4.0, 6.0])
        assert fit.coefficients[0] == pytest.approx(0.0, abs=1e-12)
        assert fit.coefficients[1] == pytest.approx(2.0, abs=1e-12)
        assert fit.rss == pytest.approx(0.0, abs=1e-20)

    def test_nested_exact_fit_quadratic_coefficient_vanishes(self):
        ranks = range(1, 15)
        design = [[1.0, float(i), float(i * i)] for i in ranks]
        response = [0.03 + 0.06 * i for i in ranks]
        fit = ols_fit(design, response)
        assert abs(fit.coefficients[2]) < 1e-10
        assert fit.t_statistics[2] == 0.0
        assert fit.p_values[2] == 1.0

    def test_five_point_dataset_matches_exact_normal_equations(self):
        xs = [1.0, 2.0, 3.0, 4.0, 5.0]
        ys = [1.0, 3.0, 2.0, 5.0, 4.0]
        design = [[1.0, x] for x in xs]
        exact = solve_exact(
            [[Fraction(1), Fraction(x)] for x in xs], [Fraction(y) for y in ys]
        )
        fit = ols_fit(design, ys)
        assert fit.coefficients[0] == pytest.approx(float(exact[0]), abs=1e-10)
        assert fit.coefficients[1] == pytest.approx(float(exact[1]), abs=1e-10)
        # Exact continuation: rss and the slope t statistic.
        residuals = [
            Fraction(y) - exact[0] - exact[1] * Fraction(x) for x, y in zip(xs, ys)
        ]
        rss = sum(r * r for r in residuals)
        assert fit.rss == pytest.approx(float(rss), abs=1e-10)
        sigma2 = rss / 3
        sxx = sum((Fraction(x) - Fraction(3)) ** 2 for x in xs)
        se_slope = math.sqrt(float(sigma2 / sxx))
        assert fit.standard_errors[1] == pytest.approx(se_slope, rel=1e-10)
        assert fit.t_statistics[1] == pytest.approx(float(exact[1]) / se_slope, rel=1e-10)
        assert fit.df == 3

    def test_recovers_coefficients_exactly_on_noiseless_data(self):
        rng = random.Random(7)
        for _ in range(100):
            n = rng.randint(5, 25)
            beta = [rng.uniform(-3, 3) for _ in range(3)]
            design = [
                [1.0, rng.uniform(-5, 5), rng.uniform(-5, 5)] for _ in range(n)
            ]
            response = [
                beta[0] * row[0] + beta[1] * row[1] + beta[2] * row[2]
                for row in design
            ]
            fit = ols_fit(design, response)
            for got, want in zip(fit.coefficients, beta):
                assert got == pytest.approx(want, abs=1e-9)
            assert fit.rss / fit.df == pytest.approx(0.0, abs=1e-18)

    def test_rank_deficiency_names_offending_column(self):
        design = [[1.0, x, 2.0 * x] for x in (1.0, 2.0, 3.0, 4.0)]
        with pytest.raises(RankDeficiencyError) as excinfo:
            ols_fit(design, [1.0, 2.0, 3.0, 4.0])
        assert excinfo.value.column == 2
        assert "column 2" in str(excinfo.value)

    def test_zero_column_reported(self):
        design = [[1.0, 0.0], [1.0, 0.0], [1.0, 0.0]]
        with pytest.raises(RankDeficiencyError) as excinfo:
            ols_fit(design, [1.0, 2.0, 3.0])
        assert excinfo.value.column == 1

    def test_rejects_too_few_rows(self):
        with pytest.raises(ValueError, match="more observations"):
            ols_fit([[1.0, 2.0], [1.0, 3.0]], [1.0, 2.0])

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="non-finite"):
            ols_fit([[1.0], [math.nan], [1.0]], [1.0, 2.0, 3.0])


class TestKsUniformTest:
    def test_centered_grid_n10(self):
        values = [(2 * i - 1) / 20 for i in range(1, 11)]
        result = ks_uniform_test(values)
        assert result.statistic == pytest.approx(0.05, abs=1e-15)
        assert result.method == "ks-uniform"
        assert result.df is None

    def test_single_midpoint(self):
        assert ks_uniform_test([0.5]).statistic == pytest.approx(0.5, abs=1e-15)

    def test_all_values_at_one(self):
        # Mass entirely at 1.0: the empirical CDF is 0 everywhere below 1,
        # so the sup distance to the uniform CDF is the full unit gap.
        result = ks_uniform_test([1.0, 1.0, 1.0, 1.0])
        assert result.statistic == pytest.approx(
            ks_statistic_brute_force([1.0, 1.0, 1.0, 1.0]), abs=1e-15
        )
        assert result.statistic == pytest.approx(1.0, abs=1e-15)

    def test_matches_brute_force_on_random_samples(self):
        rng = random.Random(31337)
        for _ in range(100):
            n = rng.randint(1, 20)
            values = [rng.random() for _ in range(n)]
            got = ks_uniform_test(values).statistic
            assert got == pytest.approx(ks_statistic_brute_force(values), abs=1e-12)

    @pytest.mark.parametrize("lam", [0.05, 0.3, 0.7, 1.0, 1.17, 1.18, 1.5, 2.5, 4.0])
    def test_tail_function_against_series_oracle(self, lam):
        assert kolmogorov_sf(lam) == pytest.approx(kolmogorov_oracle(lam), abs=1e-12)

    def test_pvalue_bounds(self):
        result = ks_uniform_test([0.62])
        assert isinstance(result, StatTestResult)
        assert 0.0 <= result.p_value <= 1.0

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            ks_uniform_test([])

    @pytest.mark.parametrize("bad", [-0.1, 1.1, math.nan])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(ValueError):
            ks_uniform_test([0.5, bad])


SPACE1_COLUMN = [28, 24, 95, 156, 40, 10, 300, 80, 588, 14, 14, 48, 200, 40]
SPACE3_COLUMN = [
    229376, 3072, 3040, 638976, 1280, 640, 9600, 20480,
    301056, 448, 7168, 49152, 6400, 5120,
]


class TestQuantileType6:
    def test_total_analyses_lower_quartile(self):
        assert quantile_type6(SPACE3_COLUMN, 0.25) == pytest.approx(2600.0)

    def test_total_analyses_upper_quartile(self):
        assert quantile_type6(SPACE3_COLUMN, 0.75) == pytest.approx(94208.0)

    def test_questions_lower_quartile(self):
        assert quantile_type6(SPACE1_COLUMN, 0.25) == pytest.approx(21.5)

    def test_boundaries_hit_extremes(self):
        values = [3.0, 1.0, 4.0, 1.5, 9.0]
        assert quantile_type6(values, 0.0) == 1.0
        assert quantile_type6(values, 1.0) == 9.0

    def test_monotone_in_p(self):
        rng = random.Random(5)
        values = [rng.uniform(0, 100) for _ in range(17)]
        grid = [i / 50 for i in range(51)]
        results = [quantile_type6(values, p) for p in grid]
        assert results == sorted(results)

    def test_rejects_empty_and_bad_p(self):
        with pytest.raises(ValueError):
            quantile_type6([], 0.5)
        with pytest.raises(ValueError):
            quantile_type6([1.0], 1.5)


@settings(max_examples=200)
@given(
    st.floats(min_value=-6, max_value=6, allow_nan=False),
    st.floats(min_value=-6, max_value=6, allow_nan=False),
)
def test_cdf_monotone_property(a, b):
    lo, hi = min(a, b), max(a, b)
    assert std_normal_cdf(lo) <= std_normal_cdf(hi)


def test_test_result_rejects_bad_pvalue():
    with pytest.raises(ValueError):
        StatTestResult(statistic=1.0, p_value=1.5)
