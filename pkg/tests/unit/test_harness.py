"""
Unit tests for the simulation harness building blocks.

This module tests seeding, environment generation, the metric and policy
registries, and cross-trial aggregation.
"""

import unittest
from dataclasses import replace

import numpy as np
import pandas as pd

from icr_slam.errors import InvalidInputError
from icr_slam.estimation.ekf import JointBelief
from icr_slam.harness.aggregate import aggregate
from icr_slam.harness.environment import Environment, generate_environment
from icr_slam.harness.metrics import METRIC_COLUMNS, metric_registry
from icr_slam.harness.metrics.base import BaseMetricCalculator, MetricRegistry
from icr_slam.harness.policies import LqrWeights, PolicySettings, policy_registry
from icr_slam.harness.seeding import trial_seed, trial_streams
from icr_slam.harness.trial import TrialResult
from icr_slam.planning.icr import IcrConfig
from icr_slam.sensing.fov_sensing import LandmarkSet
from tests.fixtures.instances import default_model, default_sensor

BOUNDS = ((0.0, 100.0), (0.0, 70.0))


def toy_result(policy, seed, values):
    """TrialResult whose every metric column holds ``values``."""
    values = np.asarray(values, dtype=float)
    frame = pd.DataFrame({"step": np.arange(values.size)})
    for i, name in enumerate(METRIC_COLUMNS):
        frame[name] = values + i
    n = values.size
    return TrialResult(policy=policy, seed=seed, metrics=frame, x_true=np.zeros((n, 3)),
                       x_est=np.zeros((n, 3)), landmarks_true=np.zeros((1, 2)),
                       landmark_history=np.zeros((n, 1, 2)), landmark_sigma_history=np.zeros((n, 1, 3)))


class TestSeeding(unittest.TestCase):
    """Tests for trial seeds and random streams."""

    def test_trial_seed_is_deterministic(self):
        """Test the same (master, index) always gives the same seed."""
        self.assertEqual(trial_seed(0, 3), trial_seed(0, 3))
        self.assertNotEqual(trial_seed(0, 3), trial_seed(0, 4))
        self.assertNotEqual(trial_seed(0, 3), trial_seed(1, 3))

    def test_streams_are_independent(self):
        """Test the five streams of a seed differ and repeat across calls."""
        first = [s.random() for s in trial_streams(12)]
        second = [s.random() for s in trial_streams(12)]
        self.assertEqual(first, second)
        self.assertEqual(len(set(first)), 5)


class TestEnvironment(unittest.TestCase):
    """Tests for landmark environments."""

    def test_generation_is_deterministic(self):
        """Test equal seeds give equal landmarks and different seeds differ."""
        a = generate_environment(BOUNDS, 15, seed=5)
        b = generate_environment(BOUNDS, 15, seed=5)
        c = generate_environment(BOUNDS, 15, seed=6)
        np.testing.assert_array_equal(a.landmarks_true.positions, b.landmarks_true.positions)
        self.assertFalse(np.array_equal(a.landmarks_true.positions, c.landmarks_true.positions))
        self.assertEqual(a.n_landmarks, 15)

    def test_landmarks_inside_bounds(self):
        """Test every landmark lies inside the rectangle."""
        env = generate_environment(BOUNDS, 200, seed=1)
        pts = env.landmarks_true.positions
        self.assertTrue(np.all(pts[:, 0] >= 0.0) and np.all(pts[:, 0] <= 100.0))
        self.assertTrue(np.all(pts[:, 1] >= 0.0) and np.all(pts[:, 1] <= 70.0))
        np.testing.assert_array_equal(env.center, [50.0, 35.0])

    def test_uniform_placement(self):
        """Test the mean of many landmarks is close to the center."""
        env = generate_environment(BOUNDS, 10000, seed=2)
        mean = env.landmarks_true.positions.mean(axis=0)
        np.testing.assert_allclose(mean, [50.0, 35.0], rtol=0.02)

    def test_invalid_environments(self):
        """Test empty landmark sets, bad bounds and landmarks outside."""
        with self.assertRaises(InvalidInputError):
            generate_environment(BOUNDS, 0, seed=1)
        with self.assertRaises(InvalidInputError):
            generate_environment(((10.0, 0.0), (0.0, 1.0)), 3, seed=1)
        with self.assertRaises(InvalidInputError):
            Environment(bounds=np.array(BOUNDS), landmarks_true=LandmarkSet([[150.0, 10.0]]), seed=0)


class TestMetrics(unittest.TestCase):
    """Tests for the per-step metric calculators."""

    def setUp(self):
        """Set up test environment before each test."""
        self.x_true = np.array([10.0, 20.0, 0.5])
        self.landmarks = np.array([[1.0, 2.0], [3.0, 4.0]])

    def test_column_order(self):
        """Test the metric columns and their order."""
        self.assertEqual(METRIC_COLUMNS, (
            "robot_rmse_pos", "robot_rmse_theta", "robot_entropy",
            "lm_rmse", "lm_entropy_avg", "joint_entropy",
        ))

    def test_perfect_estimate(self):
        """Test zero errors when the estimate equals the truth."""
        belief = JointBelief(mean=np.concatenate([self.x_true, self.landmarks.reshape(-1)]), cov=np.eye(7))
        values = metric_registry.run_all(belief, self.x_true, self.landmarks)
        self.assertEqual(values["robot_rmse_pos"], 0.0)
        self.assertEqual(values["robot_rmse_theta"], 0.0)
        self.assertEqual(values["lm_rmse"], 0.0)
        self.assertAlmostEqual(values["lm_entropy_avg"], np.log(2 * np.pi * np.e))

    def test_errors(self):
        """Test RMSE values and the wrapped heading error."""
        mean = np.concatenate([self.x_true + [3.0, 4.0, 2 * np.pi - 0.1],
                               (self.landmarks + [[1.0, 0.0], [0.0, 3.0]]).reshape(-1)])
        values = metric_registry.run_all(JointBelief(mean=mean, cov=np.eye(7)), self.x_true, self.landmarks)
        self.assertAlmostEqual(values["robot_rmse_pos"], 5.0)
        self.assertAlmostEqual(values["robot_rmse_theta"], 0.1, places=10)
        self.assertLessEqual(values["robot_rmse_theta"], np.pi)
        self.assertAlmostEqual(values["lm_rmse"], np.sqrt(5.0))

    def test_custom_registry(self):
        """Test registration, lookup and removal of calculators."""
        class ConstantCalculator(BaseMetricCalculator):
            name = "constant"

            def calculate(self, belief, x_true, landmarks_true):
                return 1.0

        registry = MetricRegistry()
        registry.register(ConstantCalculator())
        self.assertEqual(registry.get_available_metrics(), ["constant"])
        self.assertIsNotNone(registry.get_calculator("constant"))
        registry.unregister("constant")
        self.assertEqual(registry.get_available_metrics(), [])


class TestPolicies(unittest.TestCase):
    """Tests for the policy registry and the random baseline."""

    def setUp(self):
        """Set up test environment before each test."""
        self.settings = PolicySettings(
            model=default_model(),
            sensor=default_sensor(),
            icr=IcrConfig(),
            lqr=LqrWeights(q1=np.eye(3), q2_pattern=np.eye(3), r=np.eye(2)),
            u_init=np.zeros((5, 2)),
        )

    def test_available_policies(self):
        """Test the built-in policies are registered."""
        self.assertEqual(sorted(policy_registry.get_available_policies()),
                         ["icr_lqr", "icr_open_loop", "random"])

    def test_unknown_policy(self):
        """Test an unknown kind is rejected."""
        with self.assertRaises(InvalidInputError):
            policy_registry.create("greedy", self.settings, np.random.default_rng(0))

    def test_random_policy_respects_bounds(self):
        """Test random controls fall inside the box and repeat with the seed."""
        a = policy_registry.create("random", self.settings, np.random.default_rng(4))
        b = policy_registry.create("random", self.settings, np.random.default_rng(4))
        belief = JointBelief(mean=np.zeros(5), cov=np.eye(5))
        a.begin_phase(belief)
        controls = np.stack([a.control(k, belief) for k in range(200)])
        np.testing.assert_array_equal(controls[0], b.control(0, belief))
        self.assertTrue(np.all(controls >= [0.0, -1.0]) and np.all(controls <= [3.0, 1.0]))

    def test_icr_policies_follow_the_plan(self):
        """Test open-loop replay and bounded LQR feedback over one phase."""
        mean = np.array([0.0, 0.0, 0.0, 8.0, 2.0, 12.0, -4.0])
        belief = JointBelief(mean=mean, cov=25.0 * np.eye(7))
        open_loop = policy_registry.create("icr_open_loop", self.settings, np.random.default_rng(0))
        open_loop.begin_phase(belief)
        for k in range(5):
            np.testing.assert_array_equal(open_loop.control(k, belief), open_loop.plan.u_nom[k])

        closed_loop = policy_registry.create("icr_lqr", self.settings, np.random.default_rng(0))
        closed_loop.begin_phase(belief)
        np.testing.assert_array_equal(closed_loop.plan.u_nom, open_loop.plan.u_nom)
        u = closed_loop.control(0, belief)
        np.testing.assert_allclose(u, self.settings.bounds.clamp(closed_loop.plan.u_nom[0] + closed_loop.feedback.eps[0]))

    def test_later_phases_start_from_the_previous_plan(self):
        """Test the warm start reuses the last optimized sequence and can be switched off."""
        mean = np.array([0.0, 0.0, 0.0, 8.0, 2.0, 12.0, -4.0])
        belief = JointBelief(mean=mean, cov=25.0 * np.eye(7))
        policy = policy_registry.create("icr_open_loop", self.settings, np.random.default_rng(0))
        np.testing.assert_array_equal(policy.initial_controls(), self.settings.u_init)
        policy.begin_phase(belief)
        first = policy.plan.u_nom.copy()
        np.testing.assert_array_equal(policy.initial_controls(), first)

        frozen = replace(self.settings, icr=IcrConfig(iterations=0))
        follower = policy_registry.create("icr_lqr", frozen, np.random.default_rng(0))
        follower.plan = policy.plan
        follower.begin_phase(belief)
        np.testing.assert_array_equal(follower.plan.u_nom, first)

        cold = replace(self.settings, icr=IcrConfig(warm_start=False))
        policy = policy_registry.create("icr_open_loop", cold, np.random.default_rng(0))
        policy.begin_phase(belief)
        np.testing.assert_array_equal(policy.initial_controls(), cold.u_init)


class TestAggregate(unittest.TestCase):
    """Tests for per-step mean and standard deviation."""

    def test_single_trial(self):
        """Test one trial gives its own values and zero spread."""
        summary = aggregate([toy_result("random", 1, [1.0, 2.0, 3.0])])
        np.testing.assert_array_equal(summary["step"], [0, 1, 2])
        np.testing.assert_allclose(summary["lm_rmse_mean"], [4.0, 5.0, 6.0])
        np.testing.assert_array_equal(summary["lm_rmse_std"], 0.0)

    def test_identical_trials(self):
        """Test identical trials have zero standard deviation."""
        summary = aggregate([toy_result("random", s, [0.5, 0.25]) for s in range(4)])
        np.testing.assert_array_equal(summary["robot_entropy_std"], 0.0)

    def test_toy_oracle(self):
        """Test mean and population std against numpy."""
        series = np.array([[1.0, 2.0], [3.0, 6.0], [5.0, 7.0]])
        summary = aggregate([toy_result("icr_lqr", s, row) for s, row in enumerate(series)])
        np.testing.assert_allclose(summary["robot_rmse_pos_mean"], series.mean(axis=0))
        np.testing.assert_allclose(summary["robot_rmse_pos_std"], series.std(axis=0))
        self.assertEqual(list(summary.columns[:3]), ["step", "robot_rmse_pos_mean", "robot_rmse_pos_std"])

    def test_invalid_input(self):
        """Test empty input and mismatched lengths are rejected."""
        with self.assertRaises(InvalidInputError):
            aggregate([])
        with self.assertRaises(InvalidInputError):
            aggregate([toy_result("random", 0, [1.0, 2.0]), toy_result("random", 1, [1.0])])


if __name__ == "__main__":
    unittest.main()
