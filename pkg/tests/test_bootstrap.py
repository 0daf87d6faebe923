"""Tests for the wild residual law and the bootstrap bandwidth selector."""

import numpy as np
import pytest

from funkreg import (
    BootstrapConfig,
    FixedPilot,
    FunctionalSample,
    KernelSpec,
    MultiplierPilot,
    SemiMetricSpec,
    SimulationConfig,
    ValidationError,
    WildBootstrapResult,
    WildResidualLaw,
    bootstrap_error_curve,
    draw_wild_residual,
    generate_functional_sample,
    residuals,
    select_bandwidth,
)

QUADRATIC = KernelSpec.quadratic()
DERIV1 = SemiMetricSpec(derivative_order=1)
SQRT5 = np.sqrt(5.0)


class TestWildResidualLaw:
    def test_unit_residual_atoms_and_probabilities(self):
        law = WildResidualLaw.from_residual(1.0)
        assert law.atom_low == pytest.approx(-0.6180, abs=1e-4)
        assert law.atom_high == pytest.approx(1.6180, abs=1e-4)
        assert law.p_low == pytest.approx(0.7236, abs=1e-4)
        assert law.p_high == pytest.approx(0.2764, abs=1e-4)
        assert law.p_low + law.p_high == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("eps", [-3.0, -1.0, 0.0, 0.5, 10.0])
    def test_first_three_moments(self, eps):
        m1, m2, m3 = WildResidualLaw.from_residual(eps).moments()
        if eps == 0.0:
            assert abs(m1) <= 1e-12 and abs(m2) <= 1e-12 and abs(m3) <= 1e-12
        else:
            assert m1 == pytest.approx(0.0, abs=1e-12 * abs(eps))
            assert m2 == pytest.approx(eps**2, rel=1e-12)
            assert m3 == pytest.approx(eps**3, rel=1e-12)

    def test_draw_is_deterministic_inverse_cdf(self):
        law = WildResidualLaw.from_residual(2.0)
        assert draw_wild_residual(law, 0.0) == law.atom_low
        assert draw_wild_residual(law, law.p_low - 1e-12) == law.atom_low
        assert draw_wild_residual(law, law.p_low) == law.atom_high
        assert draw_wild_residual(law, 0.9) == pytest.approx(2.0 * (1 + SQRT5) / 2, abs=1e-4)

    def test_zero_residual_always_zero(self):
        law = WildResidualLaw.from_residual(0.0)
        for u in (0.0, 0.3, 0.9):
            assert draw_wild_residual(law, u) == 0.0


def small_sample(seed=0, n=40):
    config = SimulationConfig(n_train=n, n_test=5, grid_size=51, seed=seed)
    return generate_functional_sample(config)


class TestResiduals:
    def test_constant_responses_give_zero_residuals(self):
        train, _ = small_sample()
        flat = FunctionalSample(train.grid, train.curves, np.full(len(train), 3.0))
        r = residuals(flat, QUADRATIC, DERIV1, k=5)
        np.testing.assert_allclose(r, 0.0, atol=1e-12)

    def test_interpolating_fit_on_noiseless_near_duplicates(self):
        # k=2 balls stay inside each cluster of near-identical curves, so
        # the in-sample fit interpolates the noiseless responses
        from funkreg import Curve, true_regression
        from funkreg.simulation import default_grid, generate_curve

        grid = default_grid(51)
        rng = np.random.default_rng(10)
        curves, responses = [], []
        for base in range(8):
            proto = generate_curve(*rng.uniform(0, 1, 3), grid)
            for _ in range(3):
                wiggle = 1e-9 * rng.standard_normal(51)
                curve = Curve(grid, proto.values + wiggle)
                curves.append(curve)
                responses.append(true_regression(curve))
        sample = FunctionalSample(grid, tuple(curves), responses)
        r = residuals(sample, QUADRATIC, DERIV1, k=2)
        np.testing.assert_allclose(r, 0.0, atol=1e-6)

    def test_simulated_sample_residual_moments(self):
        config = SimulationConfig(n_train=100, n_test=5, seed=123)
        train, _ = generate_functional_sample(config)
        r = residuals(train, QUADRATIC, DERIV1, k=8)
        assert abs(np.mean(r)) <= 0.5
        assert 1.0 <= np.var(r, ddof=1) <= 3.0

    def test_exactly_one_bandwidth_rule(self):
        train, _ = small_sample()
        with pytest.raises(ValidationError):
            residuals(train, QUADRATIC, DERIV1)
        with pytest.raises(ValidationError):
            residuals(train, QUADRATIC, DERIV1, h=0.5, k=3)

    def test_global_and_per_point_rules_agree(self):
        train, _ = small_sample(seed=2)
        by_h = residuals(train, QUADRATIC, DERIV1, h=5.0)
        by_vec = residuals(train, QUADRATIC, DERIV1, h_per_point=np.full(len(train), 5.0))
        np.testing.assert_array_equal(by_h, by_vec)


class TestSelectBandwidth:
    def test_single_candidate(self):
        result = WildBootstrapResult(((4, 0.2, 1.0),), 4, 0.2)
        assert select_bandwidth(result) == (4, 0.2)

    def test_argmin(self):
        result = WildBootstrapResult(
            ((2, 0.1, 3.0), (3, 0.2, 1.0), (4, 0.3, 2.0)), 3, 0.2
        )
        assert select_bandwidth(result) == (3, 0.2)

    def test_tie_breaks_toward_smaller_h(self):
        result = WildBootstrapResult(
            ((2, 0.1, 1.0), (3, 0.2, 2.0), (4, 0.3, 1.0)), 2, 0.1
        )
        assert select_bandwidth(result) == (2, 0.1)

    def test_empty_grid(self):
        from funkreg import EmptyGrid

        with pytest.raises(EmptyGrid):
            select_bandwidth(WildBootstrapResult((), 0, 0.0))


class TestBootstrapErrorCurve:
    def test_zero_residuals_give_zero_error_curve(self):
        train, test = small_sample(seed=3)
        flat = FunctionalSample(train.grid, train.curves, np.full(len(train), 4.0))
        config = BootstrapConfig(n_replications=1, k_min=2, k_max=6, seed=0)
        result = bootstrap_error_curve(flat, test.curves[:3], QUADRATIC, DERIV1, config)
        for _, _, err in result.per_bandwidth:
            assert err == pytest.approx(0.0, abs=1e-20)

    def test_identical_seeds_bit_identical(self):
        train, test = small_sample(seed=4)
        config = BootstrapConfig(n_replications=20, k_min=2, k_max=8, seed=99)
        r1 = bootstrap_error_curve(train, test.curves, QUADRATIC, DERIV1, config)
        r2 = bootstrap_error_curve(train, test.curves, QUADRATIC, DERIV1, config)
        assert r1 == r2

    def test_different_seeds_differ(self):
        train, test = small_sample(seed=4)
        c1 = BootstrapConfig(n_replications=20, k_min=2, k_max=8, seed=1)
        c2 = BootstrapConfig(n_replications=20, k_min=2, k_max=8, seed=2)
        r1 = bootstrap_error_curve(train, test.curves, QUADRATIC, DERIV1, c1)
        r2 = bootstrap_error_curve(train, test.curves, QUADRATIC, DERIV1, c2)
        assert r1.per_bandwidth != r2.per_bandwidth

    def test_invariant_to_sample_permutation(self):
        train, test = small_sample(seed=5)
        config = BootstrapConfig(n_replications=25, k_min=2, k_max=8, seed=7)
        base = bootstrap_error_curve(train, test.curves, QUADRATIC, DERIV1, config)
        perm = np.random.default_rng(0).permutation(len(train))
        shuffled = FunctionalSample(
            train.grid,
            tuple(train.curves[i] for i in perm),
            train.responses[perm],
        )
        moved = bootstrap_error_curve(
            shuffled, test.curves, QUADRATIC, DERIV1, config, point_keys=perm
        )
        for (k1, h1, e1), (k2, h2, e2) in zip(base.per_bandwidth, moved.per_bandwidth):
            assert k1 == k2
            assert h2 == pytest.approx(h1, rel=1e-12)
            assert e2 == pytest.approx(e1, rel=1e-12)
        assert moved.selected_k == base.selected_k

    def test_response_scaling_equivariance(self):
        train, test = small_sample(seed=6)
        config = BootstrapConfig(n_replications=25, k_min=2, k_max=8, seed=11)
        base = bootstrap_error_curve(train, test.curves, QUADRATIC, DERIV1, config)
        c = 3.0
        scaled_sample = FunctionalSample(
            train.grid, train.curves, c * train.responses
        )
        scaled = bootstrap_error_curve(
            scaled_sample, test.curves, QUADRATIC, DERIV1, config
        )
        for (_, _, e1), (_, _, e2) in zip(base.per_bandwidth, scaled.per_bandwidth):
            assert e2 == pytest.approx(c**2 * e1, rel=1e-12)
        assert scaled.selected_k == base.selected_k

    def test_pointwise_equals_single_query_test_set(self):
        train, test = small_sample(seed=8)
        shared = dict(n_replications=10, k_min=2, k_max=6, seed=3)
        pointwise = bootstrap_error_curve(
            train, test.curves, QUADRATIC, DERIV1,
            BootstrapConfig(evaluation="pointwise", query_index=2, **shared),
        )
        single = bootstrap_error_curve(
            train, test.curves[2:3], QUADRATIC, DERIV1,
            BootstrapConfig(**shared),
        )
        assert pointwise == single

    def test_selected_entry_attains_minimum(self):
        train, test = small_sample(seed=9)
        config = BootstrapConfig(
            n_replications=30, k_min=2, k_max=10, seed=5, pilot=FixedPilot(12)
        )
        result = bootstrap_error_curve(train, test.curves, QUADRATIC, DERIV1, config)
        errs = [e for _, _, e in result.per_bandwidth]
        sel = [e for k, _, e in result.per_bandwidth if k == result.selected_k]
        assert sel[0] == min(errs)

    def test_pilot_validation(self):
        with pytest.raises(ValidationError):
            BootstrapConfig(pilot=MultiplierPilot(0.5))
        with pytest.raises(ValidationError):
            BootstrapConfig(pilot=FixedPilot(1))
        config = BootstrapConfig(k_min=2, k_max=8, pilot=FixedPilot(50))
        train, test = small_sample(seed=1, n=30)
        with pytest.raises(ValidationError):
            bootstrap_error_curve(train, test.curves, QUADRATIC, DERIV1, config)

    def test_empirical_atom_frequency(self):
        from funkreg.bootstrap import P_LOW, _multiplier_matrix, MULTIPLIER_LOW

        m = _multiplier_matrix(2024, 100, np.arange(10000))
        freq = float(np.mean(m == MULTIPLIER_LOW))
        assert freq == pytest.approx(P_LOW, abs=0.002)
