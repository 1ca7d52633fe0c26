import numpy as np
import pytest

from altfrail import FrailtyField, HazardShape, ShapeLabel, classify_shape, hazard_profile
from helpers import numeric_shape_oracle, sample_case_params


class TestClassification:
    def test_decreasing_small_beta(self):
        shape = classify_shape(FrailtyField(1.0, 0.5, 0.7, 1.3, 0.0))
        assert shape.label is ShapeLabel.DECREASING
        assert shape.turning_points == ()

    def test_decreasing_beta_one(self):
        assert classify_shape(FrailtyField(2.0, 1.0, 0.7, 1.3, 0.4)).label is ShapeLabel.DECREASING

    def test_n_shape(self):
        # beta^2 - beta = 2 < k/(4 gamma mu) = 2.5
        shape = classify_shape(FrailtyField(1.0, 2.0, 0.1, 1.0, 1.0))
        assert shape.label is ShapeLabel.N_SHAPE
        assert len(shape.turning_points) == 2
        t1, t2 = shape.turning_points
        assert 0 < t1 < t2

    def test_increasing(self):
        # beta^2 - beta = 2 > k/(4 gamma mu) = 0.25
        shape = classify_shape(FrailtyField(1.0, 2.0, 1.0, 1.0, 1.0))
        assert shape.label is ShapeLabel.INCREASING
        assert shape.turning_points == ()

    def test_upside_down_bathtub(self):
        shape = classify_shape(FrailtyField(1.0, 2.0, 1.0, 1.0, 0.0))
        assert shape.label is ShapeLabel.UPSIDE_DOWN_BATHTUB
        # peak of the gamma=0 hazard sits at alpha [mu (beta-1)]^(1/beta)
        assert shape.turning_points[0] == pytest.approx(1.0)

    def test_boundary_exact_equality(self):
        # k = 4 gamma mu beta (beta - 1) exactly, in binary floats
        shape = classify_shape(FrailtyField(1.0, 2.0, 0.125, 1.0, 1.0))
        assert shape.label is ShapeLabel.BOUNDARY
        assert len(shape.turning_points) == 1

    def test_scale_invariance(self):
        base = FrailtyField(1.0, 2.0, 0.1, 1.0, 1.0)
        ref = classify_shape(base)
        for c in (0.01, 3.7, 250.0):
            scaled = classify_shape(FrailtyField(c * base.alpha, 2.0, 0.1, 1.0, 1.0))
            assert scaled.label is ref.label
            np.testing.assert_allclose(
                scaled.turning_points, np.asarray(ref.turning_points) * c, rtol=1e-12
            )

    def test_shape_invariants_enforced(self):
        with pytest.raises(ValueError):
            HazardShape(ShapeLabel.DECREASING, (1.0,))
        with pytest.raises(ValueError):
            HazardShape(ShapeLabel.N_SHAPE, (1.0,))


class TestProfile:
    def test_unimodal_profile_single_sign_change(self):
        params = FrailtyField(1.0, 2.0, 1.0, 1.0, 0.0)
        grid = np.geomspace(0.01, 20.0, 2000)
        profile = hazard_profile(params, grid)
        d = np.sign(np.diff(profile[:, 1]))
        changes = np.sum(d[1:] != d[:-1])
        assert changes == 1

    def test_case2_profile_two_sign_changes(self):
        params = FrailtyField(1.0, 2.0, 0.1, 1.0, 1.0)
        lo = params._quantile(1e-6)
        hi = params._quantile(1 - 1e-6)
        grid = np.geomspace(lo, hi, 20_000)
        h = hazard_profile(params, grid)[:, 1]
        d = np.sign(np.diff(h))
        d = d[d != 0]
        changes = np.sum(d[1:] != d[:-1])
        assert changes == 2

    def test_beta_one_profile_decreases_to_gamma_over_alpha(self):
        params = FrailtyField(2.0, 1.0, 0.7, 1.3, 0.0)
        grid = np.geomspace(0.01, 500.0, 500)
        h = hazard_profile(params, grid)[:, 1]
        assert np.all(np.diff(h) < 0)
        assert h[-1] == pytest.approx(0.0, abs=1e-2)

    def test_rejects_bad_grid(self):
        params = FrailtyField(1.0, 2.0, 1.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            hazard_profile(params, [2.0, 1.0])
        with pytest.raises(ValueError):
            hazard_profile(params, [-1.0, 1.0])

    def test_profile_values_match_hazard(self):
        params = FrailtyField(1.2, 1.7, 0.8, 0.6, 0.35)
        grid = np.geomspace(0.05, 5.0, 50)
        profile = hazard_profile(params, grid)
        np.testing.assert_allclose(profile[:, 1], params.hazard(grid), rtol=0)


class TestNumericOracleAgreement:
    def test_random_points_desk_scale(self):
        rng = np.random.default_rng(321)
        for case in (1, 2, 3, 4):
            for _ in range(25):
                params = sample_case_params(rng, case)
                expect = classify_shape(params).label
                got, _, _ = numeric_shape_oracle(params)
                assert got is expect, f"case {case}: {params} -> {got} vs {expect}"

    def test_turning_points_match_derivative_sign_change(self):
        rng = np.random.default_rng(654)
        for case in (2, 4):
            for _ in range(10):
                params = sample_case_params(rng, case)
                shape = classify_shape(params)
                _, grid, h = numeric_shape_oracle(params)
                d = np.diff(h)
                for tp in shape.turning_points:
                    idx = np.searchsorted(grid, tp)
                    lo = max(idx - 2, 0)
                    hi = min(idx + 2, d.size)
                    assert np.min(np.sign(d[lo:hi])) != np.max(np.sign(d[lo:hi]))

    def test_boundary_oracle_sees_no_sign_change(self):
        params = FrailtyField(1.0, 2.0, 0.125, 1.0, 1.0)
        label, grid, h = numeric_shape_oracle(params)
        assert label is ShapeLabel.INCREASING
        # the tangency point is where the derivative dips to its minimum
        t_star = classify_shape(params).turning_points[0]
        d = np.diff(h) / np.diff(grid)
        t_min = grid[np.argmin(d / h[:-1])]
        assert abs(np.log(t_min / t_star)) < 0.2
