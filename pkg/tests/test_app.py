import os
import re
import shutil
import tempfile
import importlib.util
from unittest import TestCase, skipUnless, mock

import numpy as np
from six import StringIO

from cmdp.app.ledger import RegretLedger
from cmdp.app.config import ExperimentConfig, ConfigError, parse_config, load_config, describe, worker_count
from cmdp.app.experiment import oracle_gain, replication_streams, run_experiment, summarize
from cmdp.app.sweep import invariant_sweep
from cmdp.app.cli import main, EXIT_OK, EXIT_CONFIG, EXIT_FAILURE
from cmdp.data.cmdpformat import write_cmdp
from cmdp.envs import build_queue, weakly_communicating_chain
from cmdp.model.cmdp import TabularCmdp


HAS_MATPLOTLIB = importlib.util.find_spec('matplotlib') is not None

RANDOM_ENV = dict(env='random', states=3, actions=2, channels=1, slater_margin=0.2, env_seed=1)


class TestLedger(TestCase):

    def test_regret_of_constant_reward(self):
        ledger = RegretLedger(0.896, 1, horizon=10)
        for _ in range(10):
            ledger.record(1.0, [0.0])
        self.assertAlmostEqual(ledger.regret, -1.04, places=12)
        np.testing.assert_array_equal(ledger.violation, [0])

    def test_sums_follow_recording_order(self):
        rng = np.random.default_rng(0)
        rewards = rng.random(1000)
        costs = rng.uniform(-1, 1, size=(2, 1000))
        ledger = RegretLedger(0.5, 2, trace_interval=0)
        for t in range(1000):
            ledger.record(rewards[t], costs[:, t])
        total, cost_total = 0.0, [0.0, 0.0]
        for t in range(1000):
            total += float(rewards[t])
            cost_total[0] += float(costs[0, t])
            cost_total[1] += float(costs[1, t])
        self.assertEqual(ledger.regret, 1000 * 0.5 - total)
        np.testing.assert_array_equal(ledger.violation, [max(0.0, c) for c in cost_total])
        self.assertEqual(ledger.trace, [])

    def test_violation_is_positive_part(self):
        ledger = RegretLedger(0.0, 2, trace_interval=1)
        ledger.record(0, [0.5, -0.5])
        ledger.record(0, [0.25, 0.25])
        np.testing.assert_array_equal(ledger.violation, [0.75, 0])
        self.assertEqual(ledger.trace[0][2:4], (0.5, 0.0))

    def test_trace_interval(self):
        ledger = RegretLedger(0.5, 1, horizon=2500)
        self.assertEqual(ledger.trace_interval, 3)
        ledger.record_all(np.ones(2500), np.zeros((1, 2500)))
        self.assertEqual(len(ledger.trace), 834)
        self.assertEqual([row[0] for row in ledger.trace[:2]], [3, 6])
        self.assertEqual(ledger.trace[-1][0], 2500)

    def test_record_all_matches_record(self):
        rng = np.random.default_rng(1)
        rewards, costs = rng.random(50), rng.uniform(-1, 1, size=(1, 50))
        single, batch = RegretLedger(0.3, 1, horizon=50, trace_interval=7), RegretLedger(0.3, 1, horizon=50, trace_interval=7)
        for t in range(50):
            single.record(rewards[t], costs[:, t])
        batch.record_all(rewards, costs)
        self.assertEqual(single.trace, batch.trace)

    def test_in_units(self):
        ledger = RegretLedger(0.5, 1, trace_interval=4)
        for _ in range(4):
            ledger.record(0.2, [-0.1])
        t, regret, violation, reward_rate, cost_rate = ledger.in_units(5.0, [-2.0])[0]
        self.assertEqual(t, 4)
        self.assertAlmostEqual(regret, 6.0, places=12)
        self.assertEqual(violation, 0)
        self.assertAlmostEqual(reward_rate, 1.0, places=12)
        self.assertAlmostEqual(cost_rate, 0.2, places=12)

    def test_columns(self):
        ledger = RegretLedger(0.5, 2)
        self.assertEqual(ledger.columns(), ['t', 'R', 'C_1', 'C_2', 'reward_rate', 'cost_rate_1', 'cost_rate_2'])
        self.assertEqual(ledger.columns(('service', 'flow'))[2], 'C_service')


class TestConfig(TestCase):

    def test_defaults(self):
        config = ExperimentConfig()
        self.assertEqual((config.algorithm, config.env, config.T, config.seed), ('cucrl', 'queue', 10000, 0))
        self.assertEqual(config.mode, 'doubling')
        self.assertRaises(AttributeError, getattr, config, 'unknown')

    def test_parse(self):
        config = parse_config(['# queue run', '', 'algorithm = cpsrl  # sampling', 'T = 1e5', 'plot = yes', 'K=0.5'])
        self.assertEqual(config.algorithm, 'cpsrl')
        self.assertEqual(config.T, 100000)
        self.assertIsInstance(config.T, int)
        self.assertTrue(config.plot)
        self.assertEqual(config.K, 0.5)

    def test_errors(self):
        self.assertRaises(ConfigError, parse_config, ['speed = 3'])
        self.assertRaises(ConfigError, parse_config, ['T = 5', 'T = 6'])
        self.assertRaises(ConfigError, parse_config, ['T 5'])
        self.assertRaises(ConfigError, parse_config, ['= 5'])
        self.assertRaises(ConfigError, parse_config, ['T = 0'])
        self.assertRaises(ConfigError, parse_config, ['T = 2.5'])
        self.assertRaises(ConfigError, parse_config, ['T = many'])
        self.assertRaises(ConfigError, parse_config, ['algorithm = sarsa'])
        self.assertRaises(ConfigError, parse_config, ['plot = maybe'])
        self.assertRaises(ConfigError, parse_config, ['env = file'])
        self.assertRaises(ConfigError, ExperimentConfig, algorithm='pg', slater_delta=0)
        self.assertRaises(ConfigError, ExperimentConfig, algorithm='fha', delta=1)
        self.assertRaises(ConfigError, ExperimentConfig, env='chain', p_forward=0)

    def test_choices_checked(self):
        self.assertEqual(ExperimentConfig(mode='linear').mode, 'linear')
        self.assertRaises(ConfigError, ExperimentConfig, mode='lagged')
        self.assertRaises(ConfigError, ExperimentConfig, mode=None)
        self.assertRaises(ConfigError, ExperimentConfig, algorithm=3)
        self.assertRaises(ConfigError, ExperimentConfig().copied_with, env=['queue'])
        self.assertRaises(ConfigError, parse_config, ['mode = sideways'])

    def test_dump_round_trip(self):
        config = ExperimentConfig(algorithm='pg', T='20000', xi=0.3, name='pg on queue')
        stream = StringIO()
        config.dump(stream)
        self.assertEqual(parse_config(stream.getvalue().splitlines()), config)

    def test_copied_with(self):
        config = ExperimentConfig(seed=3)
        copy = config.copied_with(seed=4)
        self.assertEqual((config.seed, copy.seed), (3, 4))
        self.assertNotEqual(config, copy)
        self.assertRaises(ConfigError, config.copied_with, replications=0)

    def test_load_config(self):
        directory = tempfile.mkdtemp()
        try:
            path = os.path.join(directory, 'run.cfg')
            with open(path, 'w') as stream:
                stream.write('algorithm = fha\nT = 500\n')
            config = load_config(path, T='600')
            self.assertEqual((config.algorithm, config.T), ('fha', 600))
            self.assertRaises(ConfigError, load_config, os.path.join(directory, 'missing.cfg'))
        finally:
            shutil.rmtree(directory)

    def test_worker_count(self):
        with mock.patch.dict(os.environ, {'CMDP_WORKERS': '3'}):
            self.assertEqual(worker_count(), 3)
        with mock.patch.dict(os.environ, {'CMDP_WORKERS': '0'}):
            self.assertRaises(ConfigError, worker_count)
        with mock.patch.dict(os.environ, {'CMDP_WORKERS': 'all'}):
            self.assertRaises(ConfigError, worker_count)
        with mock.patch.dict(os.environ):
            os.environ.pop('CMDP_WORKERS', None)
            self.assertGreaterEqual(worker_count(), 1)

    def test_describe(self):
        text = describe()
        self.assertIn('algorithm = cucrl  # one of cucrl, cpsrl, pg, fha', text)
        self.assertIn('# pg', text)
        self.assertEqual(len([line for line in text.splitlines() if not line.startswith('#')]), len(ExperimentConfig.VALUES))


class TestExperiment(TestCase):

    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def test_oracle_gain(self):
        queue = build_queue()
        self.assertAlmostEqual(queue.original_reward(oracle_gain(queue)), 4.48, delta=0.01)

    def test_replication_streams(self):
        setup, pairs = replication_streams(11, 3)
        setup_again, pairs_again = replication_streams(11, 3)
        self.assertEqual(len(pairs), 3)
        self.assertEqual(setup.random(), setup_again.random())
        draws = [(env.random(), agent.random()) for env, agent in pairs]
        self.assertEqual(draws, [(env.random(), agent.random()) for env, agent in pairs_again])
        self.assertEqual(len(set(np.ravel(draws))), 6)

    def _run(self, output, workers):
        config = ExperimentConfig(name='determinism', algorithm='cucrl', T=300, K=0.1, replications=2, seed=5, output=output, **RANDOM_ENV)
        return run_experiment(config, workers=workers, log=False)

    def _files(self, directory):
        contents = {}
        for name in ('summary.csv', 'config.txt'):
            with open(os.path.join(directory, name), 'rb') as stream:
                contents[name] = stream.read()
        for rep in ('rep_000000', 'rep_000001'):
            for name in ('ledger.csv', 'epochs.csv', 'description.json'):
                with open(os.path.join(directory, rep, name), 'rb') as stream:
                    contents[rep, name] = stream.read()
        return contents

    def test_byte_identical_reruns(self):
        first = self._run(os.path.join(self.directory, 'a'), 1)
        second = self._run(os.path.join(self.directory, 'b'), 2)
        self.assertTrue(all(r.error is None for r in first.replications))
        files_first, files_second = self._files(first.directory), self._files(second.directory)
        self.assertEqual(set(files_first), set(files_second))
        for key in files_first:
            if key != 'config.txt':
                self.assertEqual(files_first[key], files_second[key], key)
        self.assertTrue(os.path.isfile(os.path.join(first.directory, 'rep_000000', 'timings.csv')))
        self.assertEqual(first.summary[1][-1][1], 2)
        self.assertNotEqual(first.replications[0].rows, first.replications[1].rows)

    def test_failing_replication(self):
        config = ExperimentConfig(name='short fha', algorithm='fha', T=10, span_bound=1.0, output=self.directory, **RANDOM_ENV)
        result = run_experiment(config, workers=1, log=False)
        self.assertIsNone(result.summary)
        self.assertIn('HorizonDegenerate', result.replications[0].error)
        self.assertFalse(os.path.isfile(os.path.join(result.directory, 'summary.csv')))
        with open(os.path.join(result.directory, 'rep_000000', 'description.json')) as stream:
            self.assertIn('"status": "failed"', stream.read())

    def test_summarize(self):
        columns, rows = summarize(['t', 'R'], [[(1, 1.0), (2, 3.0)], [(1, 3.0), (2, 5.0)]])
        self.assertEqual(columns, ['t', 'replications', 'R_mean', 'R_std'])
        self.assertEqual(rows, [(1, 2, 2.0, 1.0), (2, 2, 4.0, 1.0)])


class TestSweep(TestCase):

    def test_queue(self):
        checks = invariant_sweep(build_queue(), np.random.default_rng(0), policies=20)
        self.assertTrue(all(check.passed for check in checks), checks)

    def test_chain(self):
        checks = invariant_sweep(weakly_communicating_chain(5, 0.8), np.random.default_rng(1), policies=20)
        self.assertTrue(all(check.passed for check in checks), checks)


class TestCli(TestCase):

    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def _main(self, *argv):
        out = StringIO()
        return main(list(argv), out), out.getvalue()

    def _config_file(self, **values):
        path = os.path.join(self.directory, 'run.cfg')
        values.setdefault('output', self.directory)
        with open(path, 'w') as stream:
            for key, value in sorted(values.items()):
                stream.write('%s = %s\n' % (key, value))
        return path

    def test_solve(self):
        code, text = self._main('solve')
        self.assertEqual(code, EXIT_OK)
        constrained = float(re.search(r'^constrained optimum: ([\d.]+)', text, re.M).group(1))
        unconstrained = float(re.search(r'^unconstrained optimum: ([\d.]+)', text, re.M).group(1))
        self.assertAlmostEqual(constrained, 4.48, delta=0.01)
        self.assertAlmostEqual(unconstrained, 4.8, delta=1e-3)
        self.assertIn('  service: ', text)

    def test_config_errors(self):
        self.assertEqual(self._main('solve', '--set', 'T=abc')[0], EXIT_CONFIG)
        self.assertEqual(self._main('solve', '--set', 'T')[0], EXIT_CONFIG)
        self.assertEqual(self._main('solve', '--set', 'colour=red')[0], EXIT_CONFIG)
        self.assertEqual(self._main('run')[0], EXIT_CONFIG)
        self.assertEqual(self._main('solve', os.path.join(self.directory, 'missing.cfg'))[0], EXIT_CONFIG)
        code, text = self._main()
        self.assertEqual(code, EXIT_CONFIG)
        self.assertIn('usage', text)

    def test_argument_errors(self):
        with self.assertRaises(SystemExit) as context:
            self._main('frobnicate')
        self.assertEqual(context.exception.code, EXIT_CONFIG)
        with self.assertRaises(SystemExit) as context:
            self._main('solve', '--set')
        self.assertEqual(context.exception.code, EXIT_CONFIG)

    def test_help_config(self):
        code, text = self._main('run', '--help-config')
        self.assertEqual(code, EXIT_OK)
        self.assertIn('slater_delta = 0.1', text)

    def test_dump_and_validate(self):
        path = os.path.join(self.directory, 'chain.cmdp')
        self.assertEqual(self._main('dump', '--set', 'env=chain', '--to', path)[0], EXIT_OK)
        code, text = self._main('validate', path, '--policies', '10')
        self.assertEqual(code, EXIT_OK)
        self.assertIn('bellman residual', text)
        self.assertNotIn('FAILED', text)
        self.assertEqual(self._main('validate', os.path.join(self.directory, 'missing.cmdp'))[0], EXIT_CONFIG)

    def test_run(self):
        path = self._config_file(name='cli run', T=200, K=0.1, **RANDOM_ENV)
        code, text = self._main('run', path, '--workers', '1')
        self.assertEqual(code, EXIT_OK)
        self.assertIn('1 of 1 replications succeeded', text)
        self.assertTrue(os.path.isfile(os.path.join(self.directory, 'cli_run', 'summary.csv')))
        self.assertTrue(os.path.isfile(os.path.join(self.directory, 'cli_run', 'info.log')))

    def test_run_with_failed_replication(self):
        path = self._config_file(name='cli fha', algorithm='fha', T=10, span_bound=1, **RANDOM_ENV)
        self.assertEqual(self._main('run', path, '--workers', '1')[0], EXIT_FAILURE)

    def test_run_infeasible_model(self):
        model = os.path.join(self.directory, 'always_costly.cmdp')
        write_cmdp(TabularCmdp(np.ones((2, 2)), np.ones((1, 2, 2)), np.full((2, 2, 2), 0.5), name='always_costly'), model)
        path = self._config_file(name='infeasible', env='file', env_file=model, T=50)
        self.assertEqual(self._main('run', path, '--workers', '1')[0], EXIT_FAILURE)


@skipUnless(HAS_MATPLOTLIB, 'matplotlib is not installed')
class TestPlots(TestCase):

    def test_summary_plots(self):
        from cmdp.viz.plot import save_summary_plots
        directory = tempfile.mkdtemp()
        try:
            columns = ['t', 'replications', 'R_mean', 'R_std', 'C_flow_mean', 'C_flow_std', 'reward_rate_mean', 'reward_rate_std']
            rows = [(t, 2, 0.1 * t, 0.01, 0.0, 0.0, 0.5, 0.1) for t in range(1, 11)]
            paths = save_summary_plots(directory, columns, rows, 'cucrl on queue')
            self.assertEqual([os.path.basename(p) for p in paths], ['r.svg', 'c.svg', 'reward_rate.svg'])
            self.assertTrue(all(os.path.isfile(p) for p in paths))
        finally:
            shutil.rmtree(directory)
