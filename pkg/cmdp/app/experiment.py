# coding=utf-8
"""
Runs replicated experiments described by an ExperimentConfig and writes their results.

Output layout of an experiment named `name` in directory `output`:

    output/name/config.txt          effective configuration
    output/name/info.log            log of the run
    output/name/summary.csv         mean and standard deviation over successful replications per logged t
    output/name/*.svg               optional plots of the summary
    output/name/rep_000000/         one directory per replication with
        ledger.csv                  regret and violation trace in original units
        epochs.csv                  one row per epoch or episode of the learner
        timings.csv                 LP solve times, kept apart so the other files are reproducible byte for byte
        description.json            seed, status and final values
"""
import logging
import os
import sys
import traceback
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from cmdp.math.simplex import RevisedSimplex
from cmdp.math.scipy_lp import SciPyHighs
from cmdp.data.cmdpformat import read_cmdp
from cmdp.data.scene import Scene, slugify, write_csv
from cmdp.envs import Environment, QueueConfig, build_queue, random_ergodic_cmdp, weakly_communicating_chain
from cmdp.programs.occupancy import solve_true_model
from cmdp.learn.model_based import ModelBasedLearner
from cmdp.learn.policy_gradient import PolicyGradientLearner, EpochSchedule, mixing_hitting_oracle, estimate_smoothness, default_alpha
from cmdp.learn.fha import FiniteHorizonLearner, span_oracle
from .ledger import RegretLedger
from .config import worker_count


logger = logging.getLogger(__name__)

LOG_FORMAT = '%(message)s (%(levelname)s), %(asctime)s'

ExperimentSetup = namedtuple('ExperimentSetup', ['cmdp', 'oracle_gain', 'parameters'])
ReplicationResult = namedtuple('ReplicationResult', ['index', 'ledger', 'rows', 'records', 'record_fields', 'error'])
ExperimentResult = namedtuple('ExperimentResult', ['directory', 'setup', 'replications', 'summary'])


def oracle_gain(cmdp, solver=None):
    """
    J*, the optimal constrained average reward of the true model in normalized units.

    :param cmdp: TabularCmdp
    :raise Infeasible: if no policy satisfies the constraints
    """
    _, objective = solve_true_model(cmdp, 0.0, True, solver)
    return objective


def make_solver(config):
    return {'auto': None, 'simplex': RevisedSimplex(), 'highs': SciPyHighs()}[config.solver]


def build_model(config):
    """
Builds the true model named by `config.env`.
    """
    if config.env == 'queue':
        return build_queue(QueueConfig(buffer_size=config.buffer_size))
    if config.env == 'random':
        rng = np.random.Generator(np.random.Philox(config.env_seed))
        return random_ergodic_cmdp(config.states, config.actions, config.channels, rng,
                                   config.mix_floor or None, config.slater_margin or None)
    if config.env == 'chain':
        return weakly_communicating_chain(config.chain_length, config.p_forward, right_cost=config.right_cost)
    return read_cmdp(config.env_file)


def replication_streams(seed, count):
    """
    Independent (environment, agent) generator pairs, one pair per replication, plus one stream for the experiment setup.

    :return: tuple (setup_rng, list of (env_rng, agent_rng))
    """
    children = np.random.SeedSequence(seed).spawn(count + 1)
    pairs = [tuple(np.random.Generator(np.random.Philox(s)) for s in child.spawn(2)) for child in children[:count]]
    return np.random.Generator(np.random.Philox(children[count])), pairs


def prepare(config, rng=None):
    """
    Builds the model, solves for J* and derives the algorithm parameters that depend on the true model.

    :param config: ExperimentConfig
    :param rng: generator for the sampled oracles of the policy gradient
    :return: ExperimentSetup
    """
    cmdp = build_model(config)
    solver = make_solver(config)
    gain = oracle_gain(cmdp, solver)
    logger.info('%s: J* = %.10g (%.10g in original units)' % (cmdp, gain, cmdp.original_reward(gain)))
    parameters = {}
    if config.algorithm == 'pg':
        if cmdp.n_channels < config.cost_channel:
            raise ValueError('cost_channel=%d but %s has %d cost channels' % (config.cost_channel, cmdp, cmdp.n_channels))
        rng = rng if rng is not None else np.random.default_rng(config.seed)
        t_mix, t_hit = config.t_mix, config.t_hit
        if not t_mix or not t_hit:
            grid_mix, grid_hit = mixing_hitting_oracle(cmdp, rng)
            t_mix, t_hit = t_mix or grid_mix, t_hit or grid_hit
        alpha = config.alpha or default_alpha(estimate_smoothness(cmdp, rng), config.slater_delta)
        parameters.update(t_mix=t_mix, t_hit=t_hit, alpha=alpha, beta=config.beta or config.T ** -config.xi)
        parameters['schedule'] = EpochSchedule(config.T, t_mix, t_hit, config.xi, config.h_scale, config.n_scale)
    elif config.algorithm == 'fha':
        if config.span_bound:
            parameters['span_bound'] = config.span_bound
        else:
            parameters['span_bound'] = np.array([span_oracle(cmdp, c) for c in range(1, cmdp.n_channels + 1)])
    if parameters:
        logger.info('Derived parameters: %s' % ', '.join('%s=%s' % item for item in sorted(parameters.items())))
    return ExperimentSetup(cmdp, gain, parameters)


def make_learner(config, setup, env, rng):
    solver = make_solver(config)
    if config.algorithm in ('cucrl', 'cpsrl'):
        return ModelBasedLearner(env, rng, config.algorithm, config.K, config.mode, solver)
    if config.algorithm == 'pg':
        p = setup.parameters
        return PolicyGradientLearner(env, rng, p['schedule'], config.slater_delta, p['alpha'], p['beta'], config.cost_channel, oracle=setup.cmdp)
    return FiniteHorizonLearner(env, rng, config.T, setup.parameters['span_bound'], config.delta, solver)


def run_replication(config, setup, index, env_rng, agent_rng):
    """
    Runs one replication in isolation: its own environment, generators, learner and ledger.
    Failures are returned, not raised.

    :return: ReplicationResult
    """
    cmdp = setup.cmdp
    try:
        env = Environment(cmdp, env_rng)
        ledger = RegretLedger(setup.oracle_gain, cmdp.n_channels, config.T, config.trace_interval or None)
        learner = make_learner(config, setup, env, agent_rng)
        learner.run(config.T, ledger)
        rows = ledger.in_units(cmdp.reward_scale, cmdp.cost_scales)
        logger.info('Replication %d finished: %s' % (index, ledger))
        return ReplicationResult(index, ledger, rows, learner.records, learner.record_fields, None)
    except Exception as err:
        logger.exception('Replication %d failed' % index)
        message = ''.join(traceback.format_exception_only(type(err), err)).strip()
        return ReplicationResult(index, None, None, None, None, message)


def record_columns(record_fields, records):
    columns = list(record_fields)
    for record in records:
        columns.extend(key for key in record if key not in columns and key != 'solve_time')
    return columns


def write_replication(scene, config, result, channel_names):
    properties = {'replication': result.index, 'seed': config.seed, 'algorithm': config.algorithm, 'T': config.T}
    if result.error is not None:
        properties.update(status='failed', error=result.error)
    else:
        final = result.rows[-1] if result.rows else ()
        properties.update(status='ok', final=dict(zip(result.ledger.columns(channel_names), [float(v) for v in final])))
        scene.write_csv('ledger.csv', result.ledger.columns(channel_names), result.rows)
        scene.write_csv('epochs.csv', record_columns(result.record_fields, result.records), result.records)
        scene.write_csv('timings.csv', ['round', 'solve_time'],
                        [(i + 1, r['solve_time']) for i, r in enumerate(result.records) if 'solve_time' in r])
    scene.properties = properties


def summarize(columns, traces):
    """
    Mean and population standard deviation of every ledger column per logged t.

    :param columns: ledger columns, the first is `t`
    :param traces: one list of rows per successful replication, all logged at the same t
    :return: tuple (summary columns, rows)
    """
    stacked = np.array(traces, dtype=np.float64)  # (replications, rows, columns)
    mean, std = stacked.mean(axis=0), stacked.std(axis=0)
    summary_columns = ['t', 'replications']
    for name in columns[1:]:
        summary_columns += ['%s_mean' % name, '%s_std' % name]
    rows = []
    for i in range(stacked.shape[1]):
        row = [int(stacked[0, i, 0]), stacked.shape[0]]
        for j in range(1, len(columns)):
            row += [mean[i, j], std[i, j]]
        rows.append(tuple(row))
    return summary_columns, rows


def attach_log_handlers(directory):
    """
    Routes the `cmdp` loggers to `directory/info.log` and, at INFO level, to stdout.

    :return: list of added handlers, to be removed with `detach_log_handlers()`
    """
    formatter = logging.Formatter(LOG_FORMAT)
    package_logger = logging.getLogger('cmdp')
    package_logger.setLevel(logging.DEBUG)
    file_handler = logging.FileHandler(os.path.join(directory, 'info.log'))
    file_handler.setFormatter(formatter)
    file_handler.setLevel(logging.DEBUG)
    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setFormatter(formatter)
    console_handler.setLevel(logging.INFO)
    handlers = [file_handler, console_handler]
    for handler in handlers:
        package_logger.addHandler(handler)
    return handlers


def detach_log_handlers(handlers):
    package_logger = logging.getLogger('cmdp')
    for handler in handlers:
        package_logger.removeHandler(handler)
        handler.close()


def run_experiment(config, workers=None, log=True):
    """
    Runs `config.replications` replications on a bounded thread pool and writes all result files.

    Replication i uses the i-th child of `SeedSequence(config.seed)`, so results do not depend on the pool size
    or the order in which replications finish.

    :param config: ExperimentConfig
    :param workers: pool size, `CMDP_WORKERS` or the CPU count if None
    :param log: attach file and console log handlers for the duration of the run
    :return: ExperimentResult; failed replications have `error` set
    """
    directory = os.path.join(os.path.expanduser(config.output), slugify(config.name))
    os.path.isdir(directory) or os.makedirs(directory)
    handlers = attach_log_handlers(directory) if log else []
    try:
        with open(os.path.join(directory, 'config.txt'), 'w') as stream:
            config.dump(stream)
        setup_rng, streams = replication_streams(config.seed, config.replications)
        setup = prepare(config, setup_rng)
        workers = workers or worker_count()
        logger.info('Running %d replications of %s on %s for T=%d with %d workers. Output directory is %s'
                    % (config.replications, config.algorithm, setup.cmdp, config.T, workers, directory))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_replication, config, setup, i, env_rng, agent_rng) for i, (env_rng, agent_rng) in enumerate(streams)]
            results = [future.result() for future in futures]
        for result in results:
            write_replication(Scene.create(config.output, config.name, result.index), config, result, setup.cmdp.channel_names)
        succeeded = [r for r in results if r.error is None]
        summary = None
        if succeeded:
            columns = succeeded[0].ledger.columns(setup.cmdp.channel_names)
            summary = summarize(columns, [r.rows for r in succeeded])
            write_csv(os.path.join(directory, 'summary.csv'), *summary)
            if config.plot:
                from cmdp.viz.plot import save_summary_plots
                save_summary_plots(directory, summary[0], summary[1], '%s on %s' % (config.algorithm, setup.cmdp.name))
        failed = len(results) - len(succeeded)
        if failed:
            logger.error('%d of %d replications failed' % (failed, len(results)))
        else:
            logger.info('All %d replications finished' % len(results))
        return ExperimentResult(directory, setup, results, summary)
    finally:
        detach_log_handlers(handlers)
