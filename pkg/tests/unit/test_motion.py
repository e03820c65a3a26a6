"""
Unit tests for the differential-drive motion model.
"""

import unittest

import numpy as np

from icr_slam.diagnostics.finite_difference import finite_difference_jacobian, relative_error
from icr_slam.dynamics.motion import (
    ControlBounds,
    ControlInput,
    ProcessNoiseModel,
    jacobians,
    sample_noise,
    sample_step,
    sinc,
    sinc_derivative,
    step,
)
from icr_slam.errors import InvalidInputError
from tests.fixtures.instances import default_model, random_pose

ZERO_NOISE = np.zeros(3)


class TestMotionStep(unittest.TestCase):
    """Tests for the pose propagation f(x, u, w)."""

    def setUp(self):
        """Set up test environment before each test."""
        self.model = default_model()
        self.rng = np.random.default_rng(11)

    def test_straight_line(self):
        """Test v = 1, ω = 0 from the origin moves one meter along x."""
        np.testing.assert_allclose(step([0, 0, 0], [1.0, 0.0], ZERO_NOISE, self.model), [1.0, 0.0, 0.0], atol=1e-15)

    def test_turn_in_place(self):
        """Test v = 0, ω = 1 only changes the heading."""
        np.testing.assert_allclose(step([0, 0, 0], [0.0, 1.0], ZERO_NOISE, self.model), [0.0, 0.0, 1.0], atol=1e-15)

    def test_quarter_arc(self):
        """Test v = 1, ω = π/2 ends on the exact arc."""
        nxt = step([0, 0, 0], ControlInput(1.0, np.pi / 2), ZERO_NOISE, self.model)
        np.testing.assert_allclose(nxt, [0.63662, 0.63662, np.pi / 2], atol=1e-5)

    def test_heading_is_wrapped(self):
        """Test the heading of the next pose stays in [-π, π)."""
        nxt = step([0, 0, 3.0], [0.0, 1.0], ZERO_NOISE, self.model)
        self.assertAlmostEqual(nxt[2], 4.0 - 2 * np.pi, places=12)

    def test_zero_control_jacobians(self):
        """Test E = I and D = I when the robot does not move."""
        jac = jacobians(random_pose(self.rng), [0.0, 0.0], self.model)
        np.testing.assert_allclose(jac.E, np.eye(3), atol=1e-15)
        np.testing.assert_allclose(jac.D, np.eye(3))

    def test_velocity_column_of_b(self):
        """Test ∂f/∂v = (τ, 0, 0) at θ = 0, ω = 0."""
        model = default_model(tau=0.5)
        jac = jacobians([0, 0, 0], [2.0, 0.0], model)
        np.testing.assert_allclose(jac.B[:, 0], [0.5, 0.0, 0.0], atol=1e-15)

    def test_jacobians_match_finite_differences(self):
        """Test E, B and D against central differences, including ω ≈ 0."""
        for i in range(50):
            x = random_pose(self.rng)
            omega = 1e-7 if i % 5 == 0 else self.rng.uniform(-1.0, 1.0)
            u = np.array([self.rng.uniform(0.0, 3.0), omega])
            jac = jacobians(x, u, self.model)
            num_e = finite_difference_jacobian(lambda xx: step(xx, u, ZERO_NOISE, self.model), x, angle_rows=[2])
            num_b = finite_difference_jacobian(lambda uu: step(x, uu, ZERO_NOISE, self.model), u, angle_rows=[2])
            num_d = finite_difference_jacobian(lambda w: step(x, u, w, self.model), ZERO_NOISE, angle_rows=[2])
            self.assertLess(relative_error(jac.E, num_e), 1e-5)
            self.assertLess(relative_error(jac.B, num_b), 1e-5)
            self.assertLess(relative_error(jac.D, num_d), 1e-5)


class TestProcessNoise(unittest.TestCase):
    """Tests for the additive process noise."""

    def setUp(self):
        """Set up test environment before each test."""
        self.rng = np.random.default_rng(3)

    def test_sample_covariance(self):
        """Test the empirical noise covariance is within 5% of W."""
        w = np.array([[0.1, 0.02, 0.0], [0.02, 0.1, 0.0], [0.0, 0.0, 0.01]])
        model = default_model(w=w)
        samples = np.stack([sample_noise(model, self.rng) for _ in range(100000)])
        empirical = np.cov(samples.T)
        for i in range(3):
            self.assertAlmostEqual(empirical[i, i] / w[i, i], 1.0, delta=0.05)
        self.assertAlmostEqual(empirical[0, 1], w[0, 1], delta=0.05 * w[0, 0])

    def test_zero_noise_is_deterministic(self):
        """Test sample_step equals step when W = 0."""
        model = default_model(w=np.zeros((3, 3)))
        x, u = random_pose(self.rng), np.array([1.2, -0.4])
        np.testing.assert_array_equal(sample_step(x, u, model, self.rng), step(x, u, ZERO_NOISE, model))

    def test_invalid_models_rejected(self):
        """Test rejection of an indefinite W and a non-positive τ."""
        with self.assertRaises(InvalidInputError):
            ProcessNoiseModel(W=np.diag([0.1, -0.1, 0.01]), tau=1.0)
        with self.assertRaises(InvalidInputError):
            ProcessNoiseModel(W=np.eye(3), tau=0.0)


class TestControls(unittest.TestCase):
    """Tests for control bounds and the sinc helpers."""

    def test_clamp(self):
        """Test clamping of single controls and sequences."""
        bounds = ControlBounds(v_max=3.0, omega_max=1.0)
        np.testing.assert_allclose(bounds.clamp([4.0, -2.0]), [3.0, -1.0])
        np.testing.assert_allclose(bounds.clamp([[-1.0, 0.5], [1.0, 2.0]]), [[0.0, 0.5], [1.0, 1.0]])

    def test_invalid_bounds(self):
        """Test v_min above v_max is rejected."""
        with self.assertRaises(InvalidInputError):
            ControlBounds(v_max=1.0, v_min=2.0)

    def test_sinc_near_zero(self):
        """Test sinc and its derivative around the series switch-over."""
        self.assertEqual(sinc(0.0), 1.0)
        for a in [1e-6, 5e-5, 2e-4, 0.3, -0.8]:
            self.assertAlmostEqual(sinc(a), np.sin(a) / a, places=12)
            numeric = (sinc(a + 1e-6) - sinc(a - 1e-6)) / 2e-6
            self.assertAlmostEqual(sinc_derivative(a), numeric, places=8)


if __name__ == "__main__":
    unittest.main()
