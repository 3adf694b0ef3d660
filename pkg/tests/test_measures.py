import math

import numpy as np
import pytest

from bellwalk.coin import CoinParams, SpinVector, WalkState, initial_state, simulate
from bellwalk.errors import Divergence, InvalidArgument, UndefinedSite
from bellwalk.linalg import density_from_vector
from bellwalk.measures import (
    GridDistribution,
    MeasureSeries,
    QuadratureSpec,
    classical_renyi,
    entangling_power,
    entangling_power_series,
    probability_grid,
    reduced_density_series,
    reduced_spin_density,
    renyi_series,
    rre,
    site_entanglement,
    site_entanglement_grid,
    spin_position_entanglement,
    srd,
)

from conftest import random_spin

LN2 = math.log(2)
R2 = 1 / math.sqrt(2)
# no mixing: every component keeps moving towards +m
STRAIGHT = CoinParams(0, 0, 0.1)


class TestProbabilityGrid:
    def test_time_zero(self, initen):
        grid = probability_grid(initial_state(initen))
        assert list(grid.entries()) == [(0, 0, pytest.approx(1.0))]

    def test_one_step(self, p1):
        grid = probability_grid(simulate(SpinVector(1, 0, 0, 0), p1, 1))
        assert list(zip(grid.m, grid.n)) == [(-1, -1), (-1, 1), (1, -1), (1, 1)]
        np.testing.assert_allclose(grid.values, [0.5, 0, 0, 0.5], atol=1e-15)

    def test_sums_to_one(self, preset, rng):
        grid = probability_grid(simulate(random_spin(rng), preset, 300))
        assert grid.total() == pytest.approx(1.0, abs=1e-12)
        assert len(grid.m) == 2 * 301 - 1

    def test_negative_values_rejected(self):
        with pytest.raises(InvalidArgument):
            GridDistribution(0, [0], [0], [-0.1])


class TestSiteEntanglement:
    def test_product_start(self, initen):
        assert site_entanglement(initial_state(initen), 0, 0) == pytest.approx(0.0, abs=1e-14)

    @pytest.mark.parametrize("keep", ["A", "B"])
    def test_bell_spinor(self, keep):
        state = WalkState(0, [[R2, R2]], [[0, 0]])
        assert site_entanglement(state, 0, 0, keep) == pytest.approx(LN2, abs=1e-14)

    def test_zero_probability_site(self):
        state = simulate(SpinVector(1, 0, 0, 0), STRAIGHT, 1)
        assert site_entanglement(state, 1, 1) == pytest.approx(0.0, abs=1e-14)
        with pytest.raises(UndefinedSite):
            site_entanglement(state, -1, -1)

    @pytest.mark.parametrize("site", [(0, 0), (3, 3), (1, 3)])
    def test_off_support_site(self, site):
        with pytest.raises(UndefinedSite):
            site_entanglement(simulate(SpinVector(1, 0, 0, 0), STRAIGHT, 1), *site)

    def test_grid_marks_undefined_sites(self):
        grid = site_entanglement_grid(simulate(SpinVector(1, 0, 0, 0), STRAIGHT, 1))
        defined = ~np.isnan(grid.entropy)
        assert list(zip(grid.m[defined], grid.n[defined])) == [(1, 1)]
        assert grid.entropy[defined][0] == pytest.approx(0.0, abs=1e-14)

    def test_grid_matches_single_sites(self, preset, rng):
        state = simulate(random_spin(rng), preset, 12)
        grid = site_entanglement_grid(state)
        assert np.nanmax(grid.entropy) <= LN2 + 1e-15
        assert np.nanmin(grid.entropy) >= 0
        for m, n, value in zip(grid.m, grid.n, grid.entropy):
            if not np.isnan(value):
                assert site_entanglement(state, m, n) == pytest.approx(value, abs=1e-12)

    def test_bad_keep(self, initen):
        with pytest.raises(InvalidArgument):
            site_entanglement_grid(initial_state(initen), keep="C")


class TestReducedDensity:
    def test_time_zero_is_pure(self, initen):
        rho = reduced_spin_density(initial_state(initen))
        np.testing.assert_allclose(rho, density_from_vector(initen.array), atol=1e-15)

    def test_one_step_decoheres(self, p1):
        rho = reduced_spin_density(simulate(SpinVector(1, 0, 0, 0), p1, 1))
        np.testing.assert_allclose(rho, np.diag([0.5, 0, 0, 0.5]), atol=1e-15)

    def test_engines_agree(self, p1, rng):
        spin = random_spin(rng)
        ts = [0, 3, 17]
        closed = reduced_density_series(spin, p1, ts, workers=1)
        walked = reduced_density_series(spin, p1, ts, engine="recursion")
        for a, b in zip(closed, walked):
            np.testing.assert_allclose(a, b, atol=1e-10)

    def test_unknown_engine(self, initen, p1):
        with pytest.raises(InvalidArgument):
            reduced_density_series(initen, p1, [1], engine="dense")


class TestSpinPositionEntanglement:
    def test_start_and_first_step(self, p1):
        series = spin_position_entanglement(SpinVector(1, 0, 0, 0), p1, 3, workers=1)
        assert series.label == "E"
        assert series.values[0] == pytest.approx(0.0, abs=1e-14)
        assert series.values[1] == pytest.approx(LN2, abs=1e-12)

    def test_bounds(self, preset, initen):
        series = spin_position_entanglement(initen, preset, 60, workers=1)
        assert len(series) == 61
        assert np.all(series.values >= 0)
        assert np.all(series.values <= math.log(4) + 1e-12)

    def test_engines_agree(self, preset, rng):
        spin = random_spin(rng)
        closed = spin_position_entanglement(spin, preset, 40, workers=2)
        walked = spin_position_entanglement(spin, preset, 40, engine="recursion")
        np.testing.assert_allclose(closed.values, walked.values, atol=1e-10)

    def test_families_split_at_odd_times(self, preset, initen):
        # odd t: the diagonals share no site, rho~ = rho_03 / 2 (+) rho_12 / 2
        both = spin_position_entanglement(initen, preset, 41, workers=1)
        plus = spin_position_entanglement(SpinVector(1, 0, 0, 0), preset, 41, workers=1)
        anti = spin_position_entanglement(SpinVector(0, 1, 0, 0), preset, 41, workers=1)
        odd = slice(1, None, 2)
        expected = LN2 + 0.5 * (np.asarray(plus.values)[odd] + np.asarray(anti.values)[odd])
        np.testing.assert_allclose(np.asarray(both.values)[odd], expected, atol=1e-10)

    def test_negative_T(self, initen, p1):
        with pytest.raises(InvalidArgument):
            spin_position_entanglement(initen, p1, -1)


class TestMeasureSeries:
    def test_window(self):
        series = MeasureSeries("x", [1, 2, 3, 4], [0.1, 0.2, 0.3, 0.4])
        t, v = series.window(2, 3)
        assert t.tolist() == [2, 3]
        assert v.tolist() == [0.2, 0.3]

    def test_length_mismatch(self):
        with pytest.raises(InvalidArgument):
            MeasureSeries("x", [1, 2], [0.1])

    def test_times_increase(self):
        with pytest.raises(InvalidArgument):
            MeasureSeries("x", [1, 1], [0.1, 0.2])


class TestEntanglingPower:
    def test_zero_at_start(self, preset):
        assert entangling_power(preset, 0, workers=1) == pytest.approx(0.0, abs=1e-14)

    def test_bounded(self, preset):
        for t in (1, 5, 10):
            value = entangling_power(preset, t, workers=1)
            assert 0 <= value <= 0.75 + 1e-12

    def test_quadrature_converged(self, p1):
        quad = QuadratureSpec()
        coarse = entangling_power(p1, 20, quad, workers=1)
        fine = entangling_power(p1, 20, quad.doubled(), workers=1)
        assert abs(coarse - fine) < 1e-10

    def test_workers_do_not_change_values(self, p1):
        one = entangling_power_series(p1, range(6), workers=1)
        two = entangling_power_series(p1, range(6), workers=2)
        assert one.label == "epower"
        np.testing.assert_allclose(one.values, two.values, atol=1e-14)

    def test_bad_quadrature(self):
        with pytest.raises(InvalidArgument):
            QuadratureSpec(n_theta=1)

    def test_weights_sum_to_one(self):
        states, weights = QuadratureSpec(5, 7).qubit_nodes()
        assert states.shape == (35, 2)
        assert weights.sum() == pytest.approx(1.0, abs=1e-14)
        np.testing.assert_allclose(np.linalg.norm(states, axis=1), 1.0, atol=1e-15)


class TestRenyiDivergences:
    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    def test_equal_states(self, alpha):
        rho = np.diag([0.7, 0.2, 0.1, 0.0])
        assert srd(rho, rho, alpha) == pytest.approx(0.0, abs=1e-12)
        assert rre(rho, rho, alpha) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    def test_pure_against_mixed(self, alpha):
        rho = np.diag([1.0, 0.0])
        sigma = np.eye(2) / 2
        assert srd(rho, sigma, alpha) == pytest.approx(LN2, abs=1e-12)
        assert rre(rho, sigma, alpha) == pytest.approx(LN2, abs=1e-12)

    def test_half_mixed_against_maximally_mixed(self):
        rho = np.diag([0.5, 0.5, 0.0, 0.0])
        assert srd(rho, np.eye(4) / 4, 0.5) == pytest.approx(LN2, abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    def test_commuting_states_are_classical(self, alpha):
        p = np.array([0.5, 0.3, 0.15, 0.05])
        q = np.array([0.1, 0.2, 0.3, 0.4])
        expected = classical_renyi(p, q, alpha)
        assert srd(np.diag(p), np.diag(q), alpha) == pytest.approx(expected, abs=1e-12)
        assert rre(np.diag(p), np.diag(q), alpha) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    def test_random_commuting_pairs_are_classical(self, alpha):
        rng = np.random.default_rng(7)
        for _ in range(100):
            p = rng.uniform(0.05, 1.0, 4)
            q = rng.uniform(0.05, 1.0, 4)
            p, q = p / p.sum(), q / q.sum()
            z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            u, _ = np.linalg.qr(z)
            rho = u @ np.diag(p) @ u.conj().T
            sigma = u @ np.diag(q) @ u.conj().T
            expected = classical_renyi(p, q, alpha)
            assert srd(rho, sigma, alpha) == pytest.approx(expected, abs=1e-12)
            assert rre(rho, sigma, alpha) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    def test_random_state_against_itself(self, alpha):
        rng = np.random.default_rng(11)
        for _ in range(100):
            a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            rho = a @ a.conj().T
            rho = 0.9 * rho / np.trace(rho).real + 0.025 * np.eye(4)
            assert srd(rho, rho, alpha) == pytest.approx(0.0, abs=1e-12)

    def test_sandwiched_below_plain(self, rng):
        # SRD <= RRE for non-commuting pairs
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = a @ a.conj().T
        rho /= np.trace(rho).real
        sigma = density_from_vector(rng.normal(size=4) + 1j * rng.normal(size=4))
        assert srd(rho, sigma, 0.5) <= rre(rho, sigma, 0.5) + 1e-12

    @pytest.mark.parametrize("alpha", [0, 1, 1.5, -0.2])
    def test_srd_alpha_range(self, alpha):
        with pytest.raises(InvalidArgument):
            srd(np.eye(2) / 2, np.eye(2) / 2, alpha)

    def test_rre_accepts_zero(self):
        assert rre(np.eye(2) / 2, np.eye(2) / 2, 0) == pytest.approx(0.0, abs=1e-14)

    def test_orthogonal_states_diverge(self):
        rho = np.diag([1.0, 0.0])
        sigma = np.diag([0.0, 1.0])
        with pytest.raises(Divergence):
            srd(rho, sigma, 0.5)
        with pytest.raises(Divergence):
            rre(rho, sigma, 0.5)


class TestClassicalRenyi:
    def test_point_mass_against_uniform(self):
        assert classical_renyi([1, 0], [0.5, 0.5], 0.5) == pytest.approx(LN2)

    def test_order_two(self):
        expected = math.log(0.25 / 0.25 + 0.25 / 0.75)
        assert classical_renyi([0.5, 0.5], [0.25, 0.75], 2) == pytest.approx(expected)

    def test_support_must_be_contained(self):
        with pytest.raises(InvalidArgument):
            classical_renyi([0.5, 0.5], [1, 0], 0.5)

    def test_alpha_one_rejected(self):
        with pytest.raises(InvalidArgument):
            classical_renyi([0.5, 0.5], [0.5, 0.5], 1)


class TestRenyiSeries:
    def test_start_at_zero(self, p1):
        s, r = renyi_series(p1, 0.25, 5, start=0, workers=1)
        assert s.t[0] == 0
        assert s.values[0] == pytest.approx(0.0, abs=1e-12)
        assert r.values[0] == pytest.approx(0.0, abs=1e-12)

    def test_labels_and_range(self, p1):
        s, r = renyi_series(p1, 0.25, 10, workers=1)
        assert (s.label, r.label) == ("srd_0.25", "rre_0.25")
        assert s.t.tolist() == list(range(1, 11))

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    def test_non_negative(self, preset, alpha):
        s, r = renyi_series(preset, alpha, 40, workers=1)
        assert np.all(s.values >= -1e-12)
        assert np.all(r.values >= -1e-12)
        assert np.all(s.values <= r.values + 1e-9)

    def test_cross_check(self, preset):
        renyi_series(preset, 0.5, 30, cross_check=True, workers=1)

    def test_engines_agree(self, p1):
        s1, r1 = renyi_series(p1, 0.25, 25, workers=1)
        s2, r2 = renyi_series(p1, 0.25, 25, engine="recursion")
        np.testing.assert_allclose(s1.values, s2.values, atol=1e-9)
        np.testing.assert_allclose(r1.values, r2.values, atol=1e-9)

    def test_spin_unchanged_by_straight_walk(self):
        s, r = renyi_series(STRAIGHT, 0.5, 8, spin=SpinVector(1, 0, 0, 0), workers=1)
        np.testing.assert_allclose(s.values, 0.0, atol=1e-12)
        np.testing.assert_allclose(r.values, 0.0, atol=1e-12)

    @pytest.mark.parametrize("alpha", [0.25, 0.75])
    def test_straight_walk_decoheres_superposition(self, alpha):
        # A0 and A1 separate after one step; rho = diag(1/2, 1/2, 0, 0)
        s, r = renyi_series(STRAIGHT, alpha, 4, spin=SpinVector(R2, 1j * R2, 0, 0), workers=1)
        expected = alpha / (1 - alpha) * LN2
        np.testing.assert_allclose(s.values, expected, atol=1e-12)
        np.testing.assert_allclose(r.values, expected, atol=1e-12)
        assert s.diverged == ()

    def test_bad_arguments(self, p1):
        with pytest.raises(InvalidArgument):
            renyi_series(p1, 1.0, 5)
        with pytest.raises(InvalidArgument):
            renyi_series(p1, 0.5, 0)
