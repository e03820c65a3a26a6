"""
Unit tests for the iCR open-loop planner.

This module tests the deterministic rollout, the trace cost, the adjoint
gradient and the projected gradient descent.
"""

import unittest

import numpy as np

from icr_slam.diagnostics.finite_difference import finite_difference_jacobian, relative_error
from icr_slam.dynamics.covariance import block_trace
from icr_slam.dynamics.motion import ControlBounds
from icr_slam.errors import InvalidInputError
from icr_slam.harness.environment import generate_environment
from icr_slam.planning.icr import IcrConfig, OpenLoopPlan, gradient, optimize, rollout, trace_cost
from tests.fixtures.instances import (
    default_model,
    default_sensor,
    random_controls,
    random_cov_vector,
    random_landmarks_near,
    random_pose,
)


class TestRollout(unittest.TestCase):
    """Tests for the nominal rollout and its cost."""

    def setUp(self):
        """Set up test environment before each test."""
        self.sensor = default_sensor()
        self.model = default_model()
        self.rng = np.random.default_rng(31)

    def test_trace_cost_example(self):
        """Test J = 12 for two landmarks with unit blocks over K = 2."""
        sigma = np.tile([1.0, 0.0, 1.0, 1.0, 0.0, 1.0], (3, 1))
        plan = OpenLoopPlan(x_nom=np.zeros((3, 3)), u_nom=np.zeros((2, 2)), sigma_nom=sigma, cost=0.0)
        self.assertEqual(trace_cost(plan), 12.0)

    def test_far_landmarks_keep_covariance(self):
        """Test σ₁ = σ₀ when every landmark is far outside the FoV."""
        sigma0 = random_cov_vector(2, self.rng)
        landmarks = np.array([[-3000.0, 0.0], [-2500.0, 400.0]])
        plan = rollout(np.zeros(3), sigma0, [[1.0, 0.0]], landmarks, self.sensor, self.model)
        np.testing.assert_allclose(plan.sigma_nom[1], sigma0, rtol=1e-9, atol=1e-8)
        np.testing.assert_allclose(plan.x_nom[1], [1.0, 0.0, 0.0], atol=1e-15)

    def test_visible_landmark_reduces_trace(self):
        """Test the covariance trace decreases while a landmark stays in view."""
        sigma0 = np.array([25.0, 0.0, 25.0])
        plan = rollout(np.zeros(3), sigma0, [[1.0, 0.0], [1.0, 0.0]], [[10.0, 0.0]], self.sensor, self.model)
        traces = [block_trace(s) for s in plan.sigma_nom]
        self.assertLess(traces[1], traces[0])
        self.assertLess(traces[2], traces[1])
        self.assertAlmostEqual(plan.cost, sum(traces), places=10)

    def test_rollout_is_deterministic(self):
        """Test identical inputs give bit-identical trajectories."""
        x0 = random_pose(self.rng)
        landmarks = random_landmarks_near(x0, 4, self.rng)
        sigma0 = random_cov_vector(4, self.rng)
        u = random_controls(5, self.rng)
        a = rollout(x0, sigma0, u, landmarks, self.sensor, self.model)
        b = rollout(x0, sigma0, u, landmarks, self.sensor, self.model)
        np.testing.assert_array_equal(a.x_nom, b.x_nom)
        np.testing.assert_array_equal(a.sigma_nom, b.sigma_nom)
        self.assertEqual(a.cost, b.cost)

    def test_invalid_control_sequence(self):
        """Test a malformed control sequence is rejected."""
        with self.assertRaises(InvalidInputError):
            rollout(np.zeros(3), [1.0, 0.0, 1.0], np.zeros((2, 3)), [[10.0, 0.0]], self.sensor, self.model)


class TestGradient(unittest.TestCase):
    """Tests for the adjoint gradient ∂J/∂U."""

    def setUp(self):
        """Set up test environment before each test."""
        self.sensor = default_sensor()
        self.model = default_model()
        self.rng = np.random.default_rng(41)

    def _cost(self, x0, sigma0, landmarks):
        return lambda u: rollout(x0, sigma0, u.reshape(-1, 2), landmarks, self.sensor, self.model).cost

    def test_gradient_matches_finite_differences(self):
        """Test the adjoint sweep against central differences of J."""
        for _ in range(50):
            horizon = int(self.rng.integers(1, 5))
            n_l = int(self.rng.integers(1, 4))
            x0 = random_pose(self.rng)
            landmarks = random_landmarks_near(x0, n_l, self.rng)
            sigma0 = random_cov_vector(n_l, self.rng)
            u = random_controls(horizon, self.rng)
            analytic = gradient(u, x0, sigma0, landmarks, self.sensor, self.model)
            self.assertEqual(analytic.shape, (horizon, 2))
            numeric = finite_difference_jacobian(self._cost(x0, sigma0, landmarks), u.reshape(-1))
            self.assertLess(relative_error(analytic.reshape(1, -1), numeric), 1e-4)

    def test_gradient_vanishes_far_away(self):
        """Test ∂J/∂U ≈ 0 when no landmark can be seen."""
        landmarks = np.array([[-3000.0, 0.0], [0.0, -3000.0]])
        grad = gradient(random_controls(3, self.rng), np.zeros(3), random_cov_vector(2, self.rng),
                        landmarks, self.sensor, self.model)
        self.assertLessEqual(np.max(np.abs(grad)), 1e-8)


class TestOptimize(unittest.TestCase):
    """Tests for the projected gradient descent."""

    def setUp(self):
        """Set up test environment before each test."""
        self.sensor = default_sensor()
        self.model = default_model()
        self.rng = np.random.default_rng(51)
        self.x0 = np.array([0.0, 0.0, 0.3])
        self.landmarks = random_landmarks_near(self.x0, 3, self.rng)
        self.sigma0 = np.tile([25.0, 0.0, 25.0], 3)

    def test_zero_iterations_returns_initial_controls(self):
        """Test iterations = 0 keeps U_init."""
        u_init = random_controls(5, self.rng)
        plan = optimize(self.x0, self.sigma0, u_init, IcrConfig(iterations=0), self.landmarks,
                        self.sensor, self.model)
        np.testing.assert_array_equal(plan.u_nom, u_init)
        self.assertEqual(plan.cost_history, [plan.cost])

    def test_zero_iterations_keeps_out_of_bounds_controls(self):
        """Test iterations = 0 returns U_init unchanged even outside the control box."""
        u_init = np.tile([4.5, -2.0], (5, 1))
        plan = optimize(self.x0, self.sigma0, u_init, IcrConfig(iterations=0), self.landmarks,
                        self.sensor, self.model)
        np.testing.assert_array_equal(plan.u_nom, u_init)

        clamped = optimize(self.x0, self.sigma0, u_init, IcrConfig(iterations=1), self.landmarks,
                           self.sensor, self.model)
        self.assertTrue(np.all(clamped.u_nom <= IcrConfig().bounds.upper))

    def test_controls_stay_in_bounds(self):
        """Test every iterate is clamped into the control box."""
        bounds = ControlBounds(v_max=1.0, omega_max=0.5)
        cfg = IcrConfig(horizon=4, iterations=10, alpha=(5.0, 5.0), bounds=bounds)
        plan = optimize(self.x0, self.sigma0, np.zeros((4, 2)), cfg, self.landmarks, self.sensor, self.model)
        self.assertTrue(np.all(plan.u_nom >= bounds.lower) and np.all(plan.u_nom <= bounds.upper))
        self.assertEqual(len(plan.cost_history), 11)

    def test_backtracking_is_monotone(self):
        """Test the cost history never increases with backtracking."""
        cfg = IcrConfig(horizon=5, iterations=10, alpha=(0.05, 0.01), backtracking=True)
        for _ in range(20):
            x0 = random_pose(self.rng)
            landmarks = random_landmarks_near(x0, 3, self.rng)
            plan = optimize(x0, self.sigma0, np.tile([0.5, 0.0], (5, 1)), cfg, landmarks,
                            self.sensor, self.model)
            history = plan.cost_history
            self.assertEqual(len(history), 11)
            self.assertTrue(all(b <= a for a, b in zip(history, history[1:])))
            self.assertAlmostEqual(history[-1], plan.cost)

    def test_default_settings_reduce_cost_from_rest(self):
        """Test the default planner improves on zero controls in most seeded environments."""
        improved = 0
        for seed in range(20):
            env = generate_environment(((0.0, 100.0), (0.0, 70.0)), 15, seed=seed)
            x0 = np.array([*env.center, 0.0])
            sigma0 = np.tile([25.0, 0.0, 25.0], 15)
            plan = optimize(x0, sigma0, np.zeros((5, 2)), IcrConfig(), env.landmarks_true.positions,
                            self.sensor, self.model)
            improved += plan.cost < plan.cost_history[0]
        self.assertGreaterEqual(improved, 18)

    def test_horizon_mismatch_rejected(self):
        """Test U_init must have K rows."""
        with self.assertRaises(InvalidInputError):
            optimize(self.x0, self.sigma0, np.zeros((3, 2)), IcrConfig(horizon=5), self.landmarks,
                     self.sensor, self.model)

    def test_config_validation(self):
        """Test rejection of K = 0, negative iterations and bad step sizes."""
        with self.assertRaises(InvalidInputError):
            IcrConfig(horizon=0)
        with self.assertRaises(InvalidInputError):
            IcrConfig(iterations=-1)
        with self.assertRaises(InvalidInputError):
            IcrConfig(alpha=(0.005, -1.0))
        np.testing.assert_allclose(IcrConfig().alpha_matrix, np.diag([0.005, 0.0005]))


if __name__ == "__main__":
    unittest.main()
