import csv
import io
import math

import numpy as np
import pytest

from evorank import (
    ShapeMismatch,
    StepUnstable,
    edge_mean_dynamics,
    fermi_copy_prob,
    integrate,
    new_metagame,
    replicator_derivative,
)
from evorank.replicator import trajectory_to_csv

from conftest import random_game


@pytest.fixture
def coordination_single_pop():
    return new_metagame(2, ["A", "B"], [[[1, -1], [-1, 1]]], symmetric_flag=True)


class TestDerivative:
    def test_rps_interior_fixed_point(self, rps):
        (velocity,) = replicator_derivative(rps, np.full(3, 1.0 / 3.0))
        np.testing.assert_allclose(velocity, 0.0, atol=1e-15)

    def test_rps_edge_state_hand_computed(self, rps):
        # f = (-0.5, 0.5, 0), average 0: velocities x_i * f_i
        (velocity,) = replicator_derivative(rps, np.asarray([0.5, 0.5, 0.0]))
        np.testing.assert_allclose(velocity, [-0.25, 0.25, 0.0], atol=1e-15)

    def test_pure_vertex_is_fixed(self, rps, bos):
        (v,) = replicator_derivative(rps, np.asarray([0.0, 1.0, 0.0]))
        np.testing.assert_array_equal(v, 0.0)
        vx, vy = replicator_derivative(
            bos, (np.asarray([1.0, 0.0]), np.asarray([0.0, 1.0]))
        )
        np.testing.assert_array_equal(vx, 0.0)
        np.testing.assert_array_equal(vy, 0.0)

    def test_two_population_matches_bimatrix_form(self, bos):
        a = np.asarray([[3.0, 0.0], [0.0, 2.0]])
        b = np.asarray([[2.0, 0.0], [0.0, 3.0]])
        x = np.asarray([0.7, 0.3])
        y = np.asarray([0.2, 0.8])
        vx, vy = replicator_derivative(bos, (x, y))
        np.testing.assert_allclose(vx, x * (a @ y - x @ a @ y), atol=1e-15)
        np.testing.assert_allclose(vy, y * (x @ b - x @ b @ y), atol=1e-15)

    def test_velocity_sums_to_zero_everywhere(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            game = random_game(rng)
            for _ in range(100):
                state = tuple(rng.dirichlet(np.ones(n)) for n in game.shape)
                for v in replicator_derivative(game, state):
                    assert abs(float(v.sum())) <= 1e-10

    def test_rejects_non_simplex_state(self, rps):
        with pytest.raises(ShapeMismatch):
            replicator_derivative(rps, np.asarray([0.9, 0.9, -0.8]))


class TestEdgeMeanDynamics:
    def test_zero_gap_is_zero(self):
        for x in (0.0, 0.25, 1.0):
            assert edge_mean_dynamics(2.0, 2.0, 5.0, x) == 0.0

    def test_boundary_is_fixed(self):
        assert edge_mean_dynamics(3.0, 1.0, 2.0, 0.0) == 0.0
        assert edge_mean_dynamics(3.0, 1.0, 2.0, 1.0) == 0.0

    def test_midpoint_value(self):
        # 0.25 * tanh(0.5), frozen from direct evaluation
        expected = 0.25 * math.tanh(0.5)
        assert expected == pytest.approx(0.11552928931500243, abs=1e-16)
        assert edge_mean_dynamics(1.0, 0.0, 1.0, 0.5) == pytest.approx(
            expected, abs=1e-16
        )

    def test_matches_copy_probability_difference(self):
        # tanh form == P(sigma->tau) - P(tau->sigma), scaled by x(1-x)
        shares = np.linspace(0.0, 1.0, 10)
        gaps = np.linspace(-5.0, 5.0, 10)
        alphas = np.linspace(0.1, 10.0, 10)
        count = 0
        for alpha in alphas:
            for d in gaps:
                for x in shares:
                    direct = edge_mean_dynamics(d, 0.0, alpha, float(x))
                    fermi_gap = fermi_copy_prob(0.0, d, alpha) - fermi_copy_prob(
                        d, 0.0, alpha
                    )
                    expected = float(x) * (1.0 - float(x)) * fermi_gap
                    assert abs(direct - expected) <= 1e-12
                    count += 1
        assert count >= 10**3

    def test_share_outside_unit_interval_rejected(self):
        with pytest.raises(ShapeMismatch):
            edge_mean_dynamics(1.0, 0.0, 1.0, 1.5)


class TestIntegrate:
    def test_rps_stays_at_fixed_point(self, rps):
        traj = integrate(rps, np.full(3, 1.0 / 3.0), step=0.01, num_steps=10**4)
        worst = max(float(np.max(np.abs(s[0] - 1.0 / 3.0))) for s in traj.states)
        assert worst < 1e-9
        assert traj.max_drift < 1e-9

    def test_coordination_converges_to_dominant_basin(self, coordination_single_pop):
        traj = integrate(
            coordination_single_pop, np.asarray([0.6, 0.4]), step=0.01, num_steps=2000
        )
        shares = [float(s[0][0]) for s in traj.states]
        assert shares[-1] == pytest.approx(1.0, abs=1e-6)
        # monotone up to float noise at saturation
        assert all(b >= a - 1e-12 for a, b in zip(shares, shares[1:]))
        assert shares[100] > shares[0]

    def test_rps_product_conservation(self, rps):
        # x_R * x_P * x_S is a constant of motion of the zero-sum cycle;
        # its drift measures global integration error
        traj = integrate(rps, np.asarray([0.5, 0.25, 0.25]), step=0.01, num_steps=10**4)
        products = [float(np.prod(s[0])) for s in traj.states]
        assert max(abs(p - products[0]) for p in products) < 1e-6

    def test_rk4_order(self, coordination_single_pop):
        def endpoint(step: float, horizon: float = 4.0) -> float:
            traj = integrate(
                coordination_single_pop,
                np.asarray([0.6, 0.4]),
                step=step,
                num_steps=int(round(horizon / step)),
            )
            return float(traj.final_state[0][0])

        reference = endpoint(0.025)
        coarse = abs(endpoint(0.1) - reference)
        fine = abs(endpoint(0.05) - reference)
        # fourth order: halving the step shrinks the error about 16x
        assert 12.0 < coarse / fine < 24.0

    def test_unstable_step_detected(self, coordination_single_pop):
        with pytest.raises(StepUnstable):
            integrate(
                coordination_single_pop, np.asarray([0.6, 0.4]), step=50.0, num_steps=5
            )

    def test_times_are_uniform_multiples(self, rps):
        traj = integrate(rps, np.full(3, 1.0 / 3.0), step=0.25, num_steps=8)
        np.testing.assert_allclose(traj.times, 0.25 * np.arange(9), atol=0)
        assert len(traj.states) == 9

    def test_multi_population_integration(self, bos):
        x0 = (np.asarray([0.6, 0.4]), np.asarray([0.3, 0.7]))
        traj = integrate(bos, x0, step=0.01, num_steps=500)
        for state in traj.states:
            for x in state:
                assert abs(float(x.sum()) - 1.0) <= 1e-12
                assert np.all(x >= 0.0)


def test_trajectory_csv(bos):
    x0 = (np.asarray([0.6, 0.4]), np.asarray([0.3, 0.7]))
    traj = integrate(bos, x0, step=0.5, num_steps=2)
    rows = list(csv.reader(io.StringIO(trajectory_to_csv(bos, traj))))
    assert rows[0] == ["t", "pop0:O", "pop0:M", "pop1:O", "pop1:M"]
    assert len(rows) == 4
    assert float(rows[1][0]) == 0.0
    assert float(rows[1][1]) == 0.6
