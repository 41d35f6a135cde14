from unittest import TestCase

import numpy as np

from cmdp.envs import Environment, ConfigInvalid, QueueConfig, build_queue, random_ergodic_cmdp, weakly_communicating_chain
from cmdp.envs.chain import LEFT, RIGHT
from cmdp.math import markov
from cmdp.model.cmdp import StationaryPolicy
from cmdp.model.evaluation import evaluate_policy, induced_chain, gain, simulate_average, NotErgodic


class TestQueue(TestCase):

    def test_interior_row(self):
        config = QueueConfig()
        queue = build_queue(config)
        np.testing.assert_allclose(queue.transition[3, config.action_index(2, 1)], [0, 0, 0.3, 0.5, 0.2, 0], atol=1e-15)

    def test_full_buffer_row(self):
        config = QueueConfig()
        queue = build_queue(config)
        for flow_index in range(4):
            np.testing.assert_allclose(queue.transition[5, config.action_index(3, flow_index)], [0, 0, 0, 0, 0.8, 0.2], atol=1e-15)

    def test_empty_queue_row(self):
        config = QueueConfig()
        queue = build_queue(config)
        np.testing.assert_allclose(queue.transition[0, config.action_index(0, 0)], [0.68, 0.32, 0, 0, 0, 0], atol=1e-15)

    def test_rewards_and_costs(self):
        queue = build_queue()
        self.assertEqual(queue.reward[0, 0], 1)
        self.assertEqual(queue.original_reward(queue.reward[0, 0]), 5)
        self.assertAlmostEqual(queue.original_reward(queue.reward[5, 7]), 0)
        np.testing.assert_allclose(queue.original_costs(queue.costs[:, 0, 0]), [4, -0.88], atol=1e-12)
        self.assertLessEqual(np.max(np.abs(queue.costs)), 1)
        self.assertEqual(queue.channel_names, ('service', 'flow'))
        np.testing.assert_array_equal(queue.initial_distribution, [1, 0, 0, 0, 0, 0])

    def test_action_pairs(self):
        config = QueueConfig()
        self.assertEqual(config.n_actions, 16)
        self.assertEqual(config.action_pair(config.action_index(2, 1)), (0.6, 0.5))

    def test_smaller_buffer(self):
        queue = build_queue(QueueConfig(buffer_size=2))
        self.assertEqual(queue.n_states, 3)
        self.assertTrue(markov.check_stochastic(queue.transition))

    def test_invalid_configs(self):
        self.assertRaises(ConfigInvalid, QueueConfig, buffer_size=0)
        self.assertRaises(ConfigInvalid, QueueConfig, buffer_size=6)
        self.assertRaises(ConfigInvalid, QueueConfig, service_actions=(0.0, 0.5))
        self.assertRaises(ConfigInvalid, QueueConfig, flow_actions=(0.5, 1.0))
        self.assertRaises(ConfigInvalid, QueueConfig, flow_actions=())


class TestRandomCmdp(TestCase):

    def test_largest_floor_is_uniform(self):
        cmdp = random_ergodic_cmdp(4, 3, 2, np.random.default_rng(0), mix_floor=0.25)
        np.testing.assert_allclose(cmdp.transition, 0.25, atol=1e-15)

    def test_ergodic_for_random_policies(self):
        rng = np.random.default_rng(1)
        cmdp = random_ergodic_cmdp(6, 3, 1, rng)
        self.assertGreaterEqual(cmdp.transition.min(), 1. / 24 - 1e-15)
        for _ in range(20):
            policy = StationaryPolicy(rng.dirichlet(np.ones(3), size=6))
            self.assertTrue(markov.is_ergodic(induced_chain(cmdp, policy)))
        self.assertTrue(markov.is_ergodic(induced_chain(cmdp, StationaryPolicy.deterministic(np.zeros(6, dtype=int), 3))))

    def test_seed_reproducible(self):
        first = random_ergodic_cmdp(5, 2, 2, np.random.default_rng(7))
        second = random_ergodic_cmdp(5, 2, 2, np.random.default_rng(7))
        np.testing.assert_array_equal(first.transition, second.transition)
        np.testing.assert_array_equal(first.reward, second.reward)
        np.testing.assert_array_equal(first.costs, second.costs)

    def test_slater_margin(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            cmdp = random_ergodic_cmdp(4, 2, 2, rng, slater_margin=0.3)
            uniform_costs = gain(cmdp, StationaryPolicy.uniform(4, 2))[1:]
            np.testing.assert_array_less(uniform_costs, -0.3 / 2.3 + 1e-12)
            self.assertLessEqual(np.max(np.abs(cmdp.costs)), 1 + 1e-15)

    def test_invalid(self):
        rng = np.random.default_rng(3)
        self.assertRaises(ConfigInvalid, random_ergodic_cmdp, 4, 2, 1, rng, mix_floor=0)
        self.assertRaises(ConfigInvalid, random_ergodic_cmdp, 4, 2, 1, rng, mix_floor=0.3)
        self.assertRaises(ConfigInvalid, random_ergodic_cmdp, 0, 2, 1, rng)


class TestChain(TestCase):

    def test_left_only_is_absorbed(self):
        chain = weakly_communicating_chain(5, 0.9)
        left = StationaryPolicy.deterministic([LEFT] * 5, 2)
        self.assertRaises(NotErgodic, evaluate_policy, chain, left)
        d = markov.stationary_distribution(induced_chain(chain, left), require_ergodic=False)
        np.testing.assert_allclose(d, [1, 0, 0, 0, 0], atol=1e-12)

    def test_right_only_deterministic(self):
        chain = weakly_communicating_chain(4, 1.0)
        right = induced_chain(chain, StationaryPolicy.deterministic([RIGHT] * 4, 2))
        np.testing.assert_array_equal(right, [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 1]])
        self.assertTrue(markov.is_ergodic(induced_chain(chain, StationaryPolicy.uniform(4, 2))))

    def test_right_only_gain_matches_simulation(self):
        chain = weakly_communicating_chain(5, 0.9, rng=np.random.default_rng(4))
        policy = StationaryPolicy.deterministic([RIGHT] * 5, 2)
        expected = evaluate_policy(chain, policy).gain
        averages, trace = simulate_average(chain, policy, 100000, np.random.default_rng(5))
        batches = trace.reshape(trace.shape[0], 100, -1).mean(axis=2)
        stderr = batches.std(axis=1) / np.sqrt(100)
        np.testing.assert_array_less(np.abs(averages - expected), 4 * stderr + 1e-9)

    def test_costs(self):
        chain = weakly_communicating_chain(3, 0.5, right_cost=0.25)
        np.testing.assert_array_equal(chain.costs[0, :, RIGHT], 0.25)
        np.testing.assert_array_equal(chain.costs[0, :, LEFT], -0.25)
        self.assertEqual(chain.reward[2, RIGHT], 1)
        self.assertEqual(chain.reward[0, LEFT], 0.05)

    def test_invalid(self):
        self.assertRaises(ConfigInvalid, weakly_communicating_chain, 2, 0.5)
        self.assertRaises(ConfigInvalid, weakly_communicating_chain, 4, 0)
        self.assertRaises(ConfigInvalid, weakly_communicating_chain, 4, 0.5, right_cost=2)


class TestEnvironment(TestCase):

    def test_step_reports_known_signals(self):
        queue = build_queue()
        env = Environment(queue, np.random.default_rng(0))
        self.assertEqual(env.state, 0)
        action = QueueConfig().action_index(1, 2)
        next_state, reward, costs = env.step(action)
        self.assertIn(next_state, (0, 1))
        self.assertEqual(reward, queue.reward[0, action])
        np.testing.assert_array_equal(costs, queue.costs[:, 0, action])
        self.assertEqual(env.steps, 1)

    def test_no_reset_between_steps(self):
        chain = weakly_communicating_chain(4, 1.0)
        env = Environment(chain, np.random.default_rng(1))
        states = [env.step(RIGHT)[0] for _ in range(5)]
        self.assertEqual(states, [1, 2, 3, 3, 3])
        self.assertEqual(env.reset(), 0)
        self.assertEqual(env.reset(2), 2)

    def test_seeded_trajectories(self):
        queue = build_queue()
        actions = np.random.default_rng(2).integers(16, size=200)
        first = Environment(queue, np.random.default_rng(3))
        second = Environment(queue, np.random.default_rng(3))
        self.assertEqual([first.step(a)[0] for a in actions], [second.step(a)[0] for a in actions])

    def test_transition_frequencies(self):
        queue = build_queue()
        env = Environment(queue, np.random.default_rng(4), start_state=3)
        action = QueueConfig().action_index(2, 1)
        counts = np.zeros(6)
        for _ in range(20000):
            env.reset(3)
            counts[env.step(action)[0]] += 1
        row = queue.transition[3, action]
        sigma = np.sqrt(row * (1 - row) / 20000)
        np.testing.assert_array_less(np.abs(counts / 20000 - row), 4 * sigma + 1e-12)
