import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from depthcal import (
    AbscissaScale,
    InsufficientDataError,
    InsufficientDofError,
    PolynomialModel,
    RankDeficiencyError,
    confidence_intervals,
    evaluate,
    fit_polynomial,
    goodness_of_fit,
    sweep_degrees,
    t_quantile,
)

# Golden fit statistics, frozen from an exact rational-arithmetic solve of
# the least-squares normal equations on the three calibration sessions.
GOLDEN_STATS = {
    "h96": dict(degree=8, sse=991.926062772, sst=582960.0, rmse=12.857721822,
                r2=0.998298466, adj=0.996029755),
    "h118": dict(degree=7, sse=1537.356047158, sst=660240.0, rmse=14.819658986,
                 r2=0.997671519, adj=0.995343039),
    "h141": dict(degree=8, sse=1250.259110382, sst=660240.0, rmse=14.435252627,
                 r2=0.998106357, adj=0.995581499),
}

# Student-t quantiles frozen from numerical integration of the density
# (adaptive quadrature + bisection, independent of the betainc route).
T_ORACLE = {
    (0.975, 5): 2.57058184,
    (0.975, 6): 2.44691185,
    (0.975, 7): 2.36462425,
    (0.975, 13): 2.16036866,
    (0.975, 14): 2.14478669,
    (0.995, 7): 3.49948330,
    (0.9, 3): 1.63774435,
}


def xy(cal_set):
    return (
        np.array(cal_set.pixel_depths, dtype=float),
        np.array(cal_set.actual_depths, dtype=float),
    )


def naive_power_sum(coeffs, x):
    return sum(c * x**k for k, c in enumerate(coeffs))


class TestFitPolynomial:
    def test_exact_line(self):
        res = fit_polynomial([0, 1, 2, 3], [5, 7, 9, 11], 1)
        assert res.model.coeffs_raw == pytest.approx([5.0, 2.0], abs=1e-9)
        assert res.stats.sse == pytest.approx(0.0, abs=1e-18)
        assert res.stats.r_squared == pytest.approx(1.0)

    @pytest.mark.parametrize("key", ["h96", "h118", "h141"])
    def test_golden_statistics(self, key, request):
        cal = request.getfixturevalue(f"set_{key}")
        g = GOLDEN_STATS[key]
        res = fit_polynomial(*xy(cal), g["degree"])
        s = res.stats
        assert s.sse == pytest.approx(g["sse"], rel=1e-8)
        assert s.sst == pytest.approx(g["sst"], rel=1e-12)
        assert s.rmse == pytest.approx(g["rmse"], rel=1e-8)
        assert s.r_squared == pytest.approx(g["r2"], rel=1e-8)
        assert s.adj_r_squared == pytest.approx(g["adj"], rel=1e-8)
        assert (s.n, s.p) == (15, g["degree"] + 1)

    def test_insufficient_dof(self):
        with pytest.raises(InsufficientDofError):
            fit_polynomial([0, 1, 2, 3], [1, 2, 3, 4], 3)

    def test_all_identical_abscissae(self):
        with pytest.raises(RankDeficiencyError):
            fit_polynomial([5, 5, 5, 5], [1, 2, 3, 4], 1)

    def test_too_few_distinct_abscissae(self):
        with pytest.raises(RankDeficiencyError):
            fit_polynomial([1, 1, 2, 2, 2], [1, 1, 4, 4, 4], 2)

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length"):
            fit_polynomial([1, 2, 3], [1, 2], 1)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            fit_polynomial([1, 2, float("nan")], [1, 2, 3], 1)

    def test_minimal_dof_with_duplicate_point(self):
        # n = p + 1 via a duplicated observation still yields sse >= 0
        res = fit_polynomial([0, 1, 2, 2], [1, 3, 7, 7], 2)
        assert res.stats.sse >= 0

    def test_permutation_invariance(self, set_h118):
        xs, ys = xy(set_h118)
        base = fit_polynomial(xs, ys, 7).model.coeffs_raw
        perm = np.random.default_rng(7).permutation(len(xs))
        shuffled = fit_polynomial(xs[perm], ys[perm], 7).model.coeffs_raw
        for a, b in zip(base, shuffled):
            assert b == pytest.approx(a, rel=1e-9)

    @pytest.mark.parametrize("key", ["h96", "h118", "h141"])
    def test_sse_non_increasing_in_degree(self, key, request):
        xs, ys = xy(request.getfixturevalue(f"set_{key}"))
        sses = [fit_polynomial(xs, ys, d).stats.sse for d in range(1, 10)]
        for lo, hi in zip(sses[1:], sses):
            assert lo <= hi * (1 + 1e-12) + 1e-9

    @pytest.mark.parametrize("key", ["h96", "h118", "h141"])
    def test_residual_orthogonality(self, key, request):
        xs, ys = xy(request.getfixturevalue(f"set_{key}"))
        res = fit_polynomial(xs, ys, GOLDEN_STATS[key]["degree"])
        m = res.model
        z = (xs - m.scale.mu) / m.scale.sigma
        V = np.vander(z, m.degree + 1, increasing=True)
        r = ys - m.evaluate(xs)
        bound = 1e-6 * np.linalg.norm(ys) * len(ys)
        assert np.max(np.abs(V.T @ r)) <= bound

    @pytest.mark.parametrize("key", ["h96", "h118", "h141"])
    def test_stats_identities(self, key, request):
        xs, ys = xy(request.getfixturevalue(f"set_{key}"))
        s = fit_polynomial(xs, ys, GOLDEN_STATS[key]["degree"]).stats
        assert s.rmse**2 * (s.n - s.p) == pytest.approx(s.sse, rel=1e-12)
        assert s.r_squared == pytest.approx(1 - s.sse / s.sst, rel=1e-12)
        assert s.adj_r_squared == pytest.approx(
            1 - (s.sse / (s.n - s.p)) / (s.sst / (s.n - 1)), rel=1e-12
        )

    @pytest.mark.parametrize("key", ["h96", "h118", "h141"])
    def test_raw_and_scaled_agree_on_calibration_points(self, key, request):
        xs, _ = xy(request.getfixturevalue(f"set_{key}"))
        ys = xy(request.getfixturevalue(f"set_{key}"))[1]
        m = fit_polynomial(xs, ys, GOLDEN_STATS[key]["degree"]).model
        for x in xs:
            scaled = m.evaluate(x)
            raw = naive_power_sum(m.coeffs_raw, x)
            assert raw == pytest.approx(scaled, rel=1e-6)


class TestEvaluate:
    def test_hand_built_model(self):
        m = PolynomialModel(1, (1.0, 2.0), AbscissaScale(0.0, 1.0), (1.0, 2.0))
        assert evaluate(m, 3.0) == pytest.approx(7.0)

    def test_exact_line_extrapolates(self):
        m = fit_polynomial([0, 1, 2, 3], [5, 7, 9, 11], 1).model
        assert m.evaluate(10.0) == pytest.approx(25.0, rel=1e-12)

    def test_vectorized(self):
        m = fit_polynomial([0, 1, 2, 3], [5, 7, 9, 11], 1).model
        out = m.evaluate(np.array([0.0, 10.0]))
        assert out == pytest.approx([5.0, 25.0])

    def test_near_first_calibration_point(self, set_h118):
        xs, ys = xy(set_h118)
        res = fit_polynomial(xs, ys, 7)
        assert abs(res.model.evaluate(132.0) - 420.0) <= 3 * res.stats.rmse

    def test_horner_matches_naive_power_sum(self, set_h96):
        xs, ys = xy(set_h96)
        m = fit_polynomial(xs, ys, 8).model
        for x in np.linspace(xs.min(), xs.max(), 40):
            z = (x - m.scale.mu) / m.scale.sigma
            assert m.evaluate(x) == pytest.approx(
                naive_power_sum(m.coeffs_scaled, z), rel=1e-10
            )


class TestGoodnessOfFit:
    def test_matches_fit_stats(self, set_h118):
        xs, ys = xy(set_h118)
        res = fit_polynomial(xs, ys, 7)
        again = goodness_of_fit(res.model, xs, ys)
        assert again == res.stats

    def test_golden_sst_and_r2(self, set_h118):
        xs, ys = xy(set_h118)
        stats = goodness_of_fit(fit_polynomial(xs, ys, 7).model, xs, ys)
        assert stats.sst == pytest.approx(660240.0, rel=1e-12)
        assert stats.r_squared == pytest.approx(0.997672, abs=5e-7)

    def test_exact_line_perfect(self):
        res = fit_polynomial([0, 1, 2, 3], [5, 7, 9, 11], 1)
        stats = goodness_of_fit(res.model, [0, 1, 2, 3], [5, 7, 9, 11])
        assert stats.sse == pytest.approx(0.0, abs=1e-18)
        assert stats.r_squared == 1.0

    def test_constant_response_degenerate(self):
        res = fit_polynomial([1, 2, 3, 4], [4, 4, 4, 4], 0)
        stats = goodness_of_fit(res.model, [1, 2, 3, 4], [4, 4, 4, 4])
        assert stats.sst == 0.0
        assert stats.r_squared == 1.0

    def test_insufficient_dof(self):
        m = fit_polynomial([0, 1, 2, 3], [5, 7, 9, 11], 1).model
        with pytest.raises(InsufficientDofError):
            goodness_of_fit(m, [0, 1], [5, 7])


class TestConfidenceIntervals:
    def test_symmetric_about_estimates(self, set_h96):
        xs, ys = xy(set_h96)
        m = fit_polynomial(xs, ys, 8).model
        for ci in confidence_intervals(m, xs, ys):
            assert ci.lower <= ci.estimate <= ci.upper
            assert (ci.lower + ci.upper) / 2 == pytest.approx(ci.estimate, rel=1e-9)

    def test_exact_fit_zero_width(self):
        xs, ys = [0, 1, 2, 3], [5, 7, 9, 11]
        m = fit_polynomial(xs, ys, 1).model
        for ci in confidence_intervals(m, xs, ys):
            assert ci.upper - ci.lower == pytest.approx(0.0, abs=1e-12)

    def test_higher_level_strictly_wider(self, set_h118):
        xs, ys = xy(set_h118)
        m = fit_polynomial(xs, ys, 7).model
        narrow = confidence_intervals(m, xs, ys, level=0.95)
        wide = confidence_intervals(m, xs, ys, level=0.99)
        for a, b in zip(narrow, wide):
            assert b.lower < a.lower and a.upper < b.upper

    @pytest.mark.parametrize(
        "key,degree,published",
        [
            # 95% bounds as published for these sessions, highest power first
            (
                "h96",
                8,
                [(-2.325e-16, 1.093e-16), (-2.732e-13, 5.586e-13),
                 (-5.62e-10, 2.876e-10), (-1.654e-7, 3.073e-7),
                 (-9.916e-5, 5.632e-5), (-0.01149, 0.01913),
                 (-2.127, 1.351), (-81.14, 123.0), (-2303.0, 2304.0)],
            ),
            (
                "h118",
                7,
                [(-1.576e-13, 2.276e-13), (-5.078e-10, 3.877e-10),
                 (-3.976e-7, 4.743e-7), (-2.401e-4, 2.195e-4),
                 (-0.07022, 0.07099), (-12.24, 12.97),
                 (-1275.0, 1135.0), (-4.302e4, 5.157e4)],
            ),
        ],
    )
    def test_halfwidths_match_published(self, key, degree, published, request):
        xs, ys = xy(request.getfixturevalue(f"set_{key}"))
        m = fit_polynomial(xs, ys, degree).model
        ours = list(reversed(confidence_intervals(m, xs, ys, level=0.95)))
        for (lo, hi), ci in zip(published, ours):
            assert (ci.upper - ci.lower) / 2 == pytest.approx(
                (hi - lo) / 2, rel=1e-3
            )

    def test_bad_level(self, set_h96):
        xs, ys = xy(set_h96)
        m = fit_polynomial(xs, ys, 8).model
        with pytest.raises(ValueError):
            confidence_intervals(m, xs, ys, level=1.0)


class TestTQuantile:
    @pytest.mark.parametrize("dof", [1, 2, 7, 30])
    def test_median_is_zero(self, dof):
        assert t_quantile(0.5, dof) == 0.0

    @pytest.mark.parametrize("args,expected", sorted(T_ORACLE.items()))
    def test_against_quadrature_oracle(self, args, expected):
        p, dof = args
        assert t_quantile(p, dof) == pytest.approx(expected, abs=1e-6)

    @given(
        st.floats(min_value=0.01, max_value=0.99),
        st.integers(min_value=1, max_value=50),
    )
    @settings(max_examples=40)
    def test_symmetry(self, p, dof):
        assert t_quantile(p, dof) == pytest.approx(-t_quantile(1 - p, dof), abs=1e-7)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
    def test_bad_probability(self, p):
        with pytest.raises(ValueError):
            t_quantile(p, 5)

    def test_bad_dof(self):
        with pytest.raises(ValueError):
            t_quantile(0.975, 0)

    def test_monotone_in_probability(self):
        qs = [t_quantile(p, 7) for p in (0.6, 0.8, 0.95, 0.975, 0.995)]
        assert all(a < b for a, b in zip(qs, qs[1:]))


class TestSweepDegrees:
    def test_h118_over_7_to_9(self, set_h118):
        sweep = sweep_degrees(*xy(set_h118), 7, 9)
        assert sweep.best.degree == 7
        assert sweep.best.stats.rmse == pytest.approx(14.819659, rel=1e-6)

    def test_h96_over_8_to_9(self, set_h96):
        assert sweep_degrees(*xy(set_h96), 8, 9).best.degree == 8

    def test_h141_over_6_to_9(self, set_h141):
        assert sweep_degrees(*xy(set_h141), 6, 9).best.degree == 8

    def test_full_range_winners_by_dof_adjusted_rmse(self, set_h96, set_h118):
        # On these two sessions, degree 6 minimizes sqrt(sse/(n-p)) over 6..9
        # (verified against an exact rational-arithmetic solve per degree).
        assert sweep_degrees(*xy(set_h96), 6, 9).best.degree == 6
        assert sweep_degrees(*xy(set_h118), 6, 9).best.degree == 6

    def test_ranked_entries_sorted(self, set_h141):
        sweep = sweep_degrees(*xy(set_h141), 6, 9)
        rmses = [e.stats.rmse for e in sweep.entries]
        assert rmses == sorted(rmses)
        assert {e.degree for e in sweep.entries} == {6, 7, 8, 9}

    def test_exact_line_tie_breaks_low(self):
        xs = list(range(10))
        ys = [3 * x + 2 for x in xs]
        sweep = sweep_degrees(xs, ys, 1, 3)
        assert sweep.best.degree == 1
        assert all(e.stats.sse == pytest.approx(0.0, abs=1e-12) for e in sweep.entries)

    def test_inadmissible_degrees_skipped(self):
        xs = [0, 1, 2, 3, 4]
        ys = [1, 2, 4, 8, 16]
        sweep = sweep_degrees(xs, ys, 1, 9)
        assert [e.degree for e in sorted(sweep.entries, key=lambda e: e.degree)] == [1, 2, 3]
        assert [sk.degree for sk in sweep.skipped] == [4, 5, 6, 7, 8, 9]

    def test_no_admissible_degree(self):
        with pytest.raises(InsufficientDataError):
            sweep_degrees([0, 1], [1, 2], 2, 3)

    def test_bad_bounds(self):
        with pytest.raises(ValueError):
            sweep_degrees([0, 1, 2], [1, 2, 3], 0, 2)
        with pytest.raises(ValueError):
            sweep_degrees([0, 1, 2], [1, 2, 3], 3, 2)


class TestModelInvariants:
    def test_coeff_arity_enforced(self):
        with pytest.raises(ValueError, match="coeffs_raw"):
            PolynomialModel(8, (1.0,) * 8, AbscissaScale(0.0, 1.0), (1.0,) * 9)

    def test_sigma_positive(self):
        with pytest.raises(ValueError, match="sigma"):
            AbscissaScale(0.0, 0.0)

    @given(st.integers(min_value=3, max_value=60))
    @settings(max_examples=15)
    def test_scale_from_data(self, n):
        xs = np.arange(n, dtype=float)
        ys = 2 * xs + 1
        m = fit_polynomial(xs, ys, 1).model
        assert m.scale.mu == pytest.approx(xs.mean())
        assert m.scale.sigma > 0
