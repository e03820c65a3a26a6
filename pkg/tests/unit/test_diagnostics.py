"""
Unit tests for the numerical diagnostics.
"""

import unittest

import numpy as np

from icr_slam.diagnostics import SIGNED_DISTANCE_KINK, DiagnosticCounter
from icr_slam.diagnostics.finite_difference import finite_difference_jacobian, relative_error
from icr_slam.diagnostics.jacobian_check import CHECKS, CheckResult, run_checks


class TestFiniteDifference(unittest.TestCase):
    """Tests for the central-difference helpers."""

    def test_linear_map(self):
        """Test the Jacobian of a linear map is its matrix."""
        a = np.array([[1.0, 2.0, 3.0], [-1.0, 0.5, 4.0]])
        jac = finite_difference_jacobian(lambda x: a @ x, np.array([0.3, -0.2, 1.0]))
        np.testing.assert_allclose(jac, a, atol=1e-8)

    def test_angle_rows_are_wrapped(self):
        """Test an output angle crossing ±π does not produce a 2π jump."""
        def heading(x):
            return np.array([np.mod(x[0] + np.pi, 2 * np.pi) - np.pi])

        jac = finite_difference_jacobian(heading, np.array([np.pi]), angle_rows=[0])
        np.testing.assert_allclose(jac, [[1.0]], atol=1e-6)

    def test_relative_error_is_scale_free(self):
        """Test the error is relative to the reference norm, also for small references."""
        self.assertAlmostEqual(relative_error(np.array([11.0]), np.array([10.0])), 0.1)
        self.assertAlmostEqual(relative_error(np.array([1.1e-3]), np.array([1e-3])), 0.1)
        # A 10% mistake in a Jacobian of norm 0.01 must not look like 1e-3
        self.assertGreater(relative_error(np.array([[0.011, 0.0]]), np.array([[0.01, 0.0]])), 0.05)

    def test_relative_error_zero_reference(self):
        """Test an exactly zero reference falls back to the absolute error over the floor."""
        self.assertEqual(relative_error(np.zeros(2), np.zeros(2)), 0.0)
        self.assertAlmostEqual(relative_error(np.array([1e-15]), np.array([0.0])), 1e-3)


class TestDiagnosticCounter(unittest.TestCase):
    """Tests for the named event counter."""

    def setUp(self):
        """Set up test environment before each test."""
        self.counter = DiagnosticCounter()

    def test_increment_and_reset(self):
        """Test counting, snapshots and reset."""
        self.counter.increment(SIGNED_DISTANCE_KINK)
        self.counter.increment(SIGNED_DISTANCE_KINK, 2)
        self.assertEqual(self.counter.get(SIGNED_DISTANCE_KINK), 3)
        self.assertEqual(self.counter.snapshot(), {SIGNED_DISTANCE_KINK: 3})
        self.counter.reset()
        self.assertEqual(self.counter.get(SIGNED_DISTANCE_KINK), 0)


class TestJacobianCheck(unittest.TestCase):
    """Tests for the Jacobian verification suite."""

    def test_all_checks_pass(self):
        """Test every analytic Jacobian on a few random samples."""
        results = run_checks(n_samples=5, seed=3)
        self.assertEqual([r.name for r in results], list(CHECKS))
        for result in results:
            self.assertTrue(result.passed, f"{result.name}: {result.max_error:.2e}")

    def test_check_result(self):
        """Test the pass criterion."""
        self.assertTrue(CheckResult("x", 1, 1e-6, 1e-5).passed)
        self.assertFalse(CheckResult("x", 1, 1e-3, 1e-5).passed)


if __name__ == "__main__":
    unittest.main()
