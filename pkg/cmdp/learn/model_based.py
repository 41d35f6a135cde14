# coding=utf-8
"""
Epoch-based model-based learners: optimism (C-UCRL) and posterior sampling (C-PSRL).

Both keep visit counts, start a new epoch when a state-action pair has doubled its visits (or per the configured mode),
tighten the cost constraints by ε_e = K sqrt(ln t_e / t_e) and plan once per epoch with an occupancy LP.
"""
import logging
from collections import namedtuple

import numpy as np

from cmdp.programs.occupancy import epsilon_schedule, solve_occupancy, extract_policy, Infeasible
from cmdp.programs.optimistic import ConfidenceRadii, solve_optimistic
from .learner import Learner, Stopwatch


logger = logging.getLogger(__name__)

EPOCH_MODES = ('doubling', 'linear')
MIN_EPSILON = 1e-12

EpochState = namedtuple('EpochState', ['epoch_index', 'start_time', 'policy', 'epsilon'])
StepResult = namedtuple('StepResult', ['action', 'next_state', 'reward', 'costs', 'counts', 'new_epoch'])


class VisitCounts(object):

    def __init__(self, n_states, n_actions):
        """
        Visit statistics of an epoch-based learner.

        n_epoch_current: visits of (s,a) in the running epoch.
        n_epoch_start: visits of (s,a) before the running epoch.
        n_previous_start: visits of (s,a) before the previous epoch.
        n_triple: all observed transitions (s,a,s').
        """
        self.n_epoch_current = np.zeros((n_states, n_actions), dtype=np.int64)
        self.n_epoch_start = np.zeros((n_states, n_actions), dtype=np.int64)
        self.n_previous_start = np.zeros((n_states, n_actions), dtype=np.int64)
        self.n_triple = np.zeros((n_states, n_actions, n_states), dtype=np.int64)

    @property
    def total(self):
        return int(self.n_epoch_start.sum() + self.n_epoch_current.sum())

    def record(self, state, action, next_state):
        self.n_epoch_current[state, action] += 1
        self.n_triple[state, action, next_state] += 1

    def start_epoch(self):
        self.n_previous_start = self.n_epoch_start.copy()
        self.n_epoch_start = self.n_epoch_start + self.n_epoch_current
        self.n_epoch_current = np.zeros_like(self.n_epoch_current)

    def reconciled(self):
        return bool(np.all(self.n_triple.sum(axis=2) == self.n_epoch_start + self.n_epoch_current) and np.all(self.n_triple >= 0))


def epoch_trigger(counts, mode='doubling'):
    """
    Tells whether the running epoch ends.

    doubling: some (s,a) reached N_curr = max(1, N_e).
    linear: some (s,a) reached N_curr = max(1, N_{e-1}), its count before the previous epoch.

    :param counts: VisitCounts
    :param mode: one of EPOCH_MODES
    :return: bool
    """
    if mode == 'doubling':
        threshold = counts.n_epoch_start
    elif mode == 'linear':
        threshold = counts.n_previous_start
    else:
        raise ValueError("Unknown epoch mode '%s', use one of %s" % (mode, EPOCH_MODES))
    return bool(np.any(counts.n_epoch_current >= np.maximum(1, threshold)))


def empirical_transition(counts):
    """
    P̂(s'|s,a) = N(s,a,s') / N(s,a); rows without data are uniform.

    :param counts: VisitCounts or transition counts (S, A, S)
    :return: kernel (S, A, S)
    """
    triple = counts.n_triple if isinstance(counts, VisitCounts) else np.asarray(counts)
    visits = triple.sum(axis=2, keepdims=True)
    S = triple.shape[2]
    return np.where(visits > 0, triple / np.maximum(visits, 1), 1.0 / S)


def sample_dirichlet_kernel(transition_counts, rng):
    """
    Draws every row from Dirichlet(N(s,a,·) + 1) via normalized Gamma variates.

    :param transition_counts: (S, A, S)
    :param rng: numpy.random.Generator
    :return: kernel (S, A, S) with strictly positive entries
    """
    gammas = rng.standard_gamma(np.asarray(transition_counts, dtype=np.float64) + 1)
    gammas = np.maximum(gammas, np.finfo(np.float64).tiny)
    return gammas / gammas.sum(axis=2, keepdims=True)


class EpochPlan(namedtuple('EpochPlan', ['policy', 'epsilon', 'objective', 'status'])):
    """
Result of one planning round: the epoch policy, the tightening actually used, the LP objective and how it was obtained.
    """


def plan_with_fallback(solve, epsilon, context=''):
    """
    Calls `solve(epsilon, constrained)` and relaxes the tightening while the program is infeasible:
    ε is halved until it drops below 1e-12, then ε = 0 is tried, then the cost constraints are dropped.

    :param solve: function (epsilon, constrained) -> (occupancy, objective)
    :param epsilon: requested tightening
    :return: tuple (EpochPlan, occupancy)
    """
    current = epsilon
    while True:
        try:
            occupancy, objective = solve(current, True)
            status = 'optimal' if current == epsilon else 'relaxed'
            if status == 'relaxed':
                logger.warning('%sinfeasible at epsilon=%g, solved with epsilon=%g' % (context, epsilon, current))
            return EpochPlan(extract_policy(occupancy), current, objective, status), occupancy
        except Infeasible:
            if current == 0:
                break
            current = current / 2 if current / 2 >= MIN_EPSILON else 0.0
    occupancy, objective = solve(0.0, False)
    logger.warning('%sinfeasible even at epsilon=0, planning without cost constraints' % context)
    return EpochPlan(extract_policy(occupancy), 0.0, objective, 'unconstrained'), occupancy


def cucrl_plan(counts, t, env, epsilon, solver=None):
    """
Optimistic plan from the counts at the start of an epoch beginning at time t.
    """
    p_hat = empirical_transition(counts)
    radii = ConfidenceRadii.weissman(counts.n_epoch_start, t, env.n_states, env.n_actions)
    solve = lambda eps, constrained: solve_optimistic(p_hat, radii, env.reward, env.costs, eps, constrained, solver)
    return plan_with_fallback(solve, epsilon, 'C-UCRL epoch at t=%d: ' % t)


def cpsrl_plan(counts, t, env, epsilon, rng, solver=None):
    """
Plan for one kernel sampled from the Dirichlet posterior at the start of an epoch beginning at time t.
    """
    kernel = sample_dirichlet_kernel(counts.n_triple, rng)
    solve = lambda eps, constrained: solve_occupancy(env.reward, env.costs, kernel, eps, constrained, solver)
    return plan_with_fallback(solve, epsilon, 'C-PSRL epoch at t=%d: ' % t)


def _model_based_step(state, epoch, counts, env, rng, planner, K, mode, t, records):
    action = epoch.policy.sample(state, rng)
    next_state, reward, costs = env.step(action)
    counts.record(state, action, next_state)
    new_epoch = None
    if epoch_trigger(counts, mode):
        counts.start_epoch()
        start_time = t + 1
        epsilon = epsilon_schedule(K, start_time)
        with Stopwatch() as watch:
            plan, _ = planner(counts, start_time, epsilon)
        new_epoch = EpochState(epoch.epoch_index + 1, start_time, plan.policy, epsilon)
        logger.debug('Epoch %d at t=%d: epsilon=%g objective=%g (%s) in %.3f s' % (new_epoch.epoch_index, start_time, plan.epsilon, plan.objective, plan.status, watch.elapsed))
        if records is not None:
            records.append(_epoch_record(new_epoch, epsilon, plan, watch.elapsed))
    return StepResult(action, next_state, reward, costs, counts, new_epoch)


def _epoch_record(epoch, requested_epsilon, plan, solve_time):
    return {'epoch': epoch.epoch_index, 't_e': epoch.start_time, 'epsilon': requested_epsilon, 'epsilon_used': plan.epsilon,
            'objective': plan.objective, 'status': plan.status, 'solve_time': solve_time}


def cucrl_step(state, epoch, counts, env, rng, t, K=1.0, mode='doubling', solver=None, records=None):
    """
    One C-UCRL interaction at time t.

    Plays a ~ π_e(·|state), updates the counts and, if the epoch ends, plans the next epoch optimistically.

    :param state: current state
    :param epoch: EpochState of the running epoch
    :param counts: VisitCounts, updated in place
    :param env: Environment
    :param rng: generator for action sampling
    :param t: 1-based time of this step
    :return: StepResult with `new_epoch` set when a new epoch started
    """
    planner = lambda counts_, start_time, epsilon: cucrl_plan(counts_, start_time, env, epsilon, solver)
    return _model_based_step(state, epoch, counts, env, rng, planner, K, mode, t, records)


def cpsrl_step(state, epoch, counts, env, rng, t, K=1.0, mode='doubling', solver=None, records=None):
    """
    One C-PSRL interaction at time t.

    Plays a ~ π_e(·|state), updates the counts and, if the epoch ends, samples a kernel from the posterior
    and plans the next epoch on it.
    """
    planner = lambda counts_, start_time, epsilon: cpsrl_plan(counts_, start_time, env, epsilon, rng, solver)
    return _model_based_step(state, epoch, counts, env, rng, planner, K, mode, t, records)


class ModelBasedLearner(Learner):

    def __init__(self, env, rng, algorithm='cucrl', K=1.0, mode='doubling', solver=None):
        """
        Runs C-UCRL or C-PSRL on `env`.

        The first epoch starts at t = 1 with no data: a uniform empirical kernel and vacuous radii (C-UCRL)
        or a kernel drawn from the uniform Dirichlet prior (C-PSRL).

        :param env: Environment
        :param rng: numpy.random.Generator
        :param algorithm: 'cucrl' or 'cpsrl'
        :param K: tightening scale
        :param mode: epoch trigger, one of EPOCH_MODES
        :param solver: LpSolver or None
        """
        assert algorithm in ('cucrl', 'cpsrl'), 'unknown algorithm: %s' % algorithm
        assert mode in EPOCH_MODES, 'unknown epoch mode: %s' % mode
        assert K >= 0, 'invalid K: %s' % K
        Learner.__init__(self, 'C-UCRL' if algorithm == 'cucrl' else 'C-PSRL', env, rng)
        self.algorithm = algorithm
        self.K = K
        self.mode = mode
        self.solver = solver
        self.counts = VisitCounts(env.n_states, env.n_actions)
        epsilon = epsilon_schedule(K, 1)
        with Stopwatch() as watch:
            if algorithm == 'cucrl':
                plan, _ = cucrl_plan(self.counts, 1, env, epsilon, solver)
            else:
                plan, _ = cpsrl_plan(self.counts, 1, env, epsilon, rng, solver)
        self.epoch = EpochState(1, 1, plan.policy, epsilon)
        self.records.append(_epoch_record(self.epoch, epsilon, plan, watch.elapsed))

    record_fields = ('epoch', 't_e', 'epsilon', 'epsilon_used', 'objective', 'status')

    @property
    def policy(self):
        return self.epoch.policy

    def step(self):
        step_function = cucrl_step if self.algorithm == 'cucrl' else cpsrl_step
        result = step_function(self.env.state, self.epoch, self.counts, self.env, self.rng, self.time, self.K, self.mode, self.solver, self.records)
        if result.new_epoch is not None:
            self.epoch = result.new_epoch
        self.time += 1
        return result.action, result.next_state, result.reward, result.costs

    @property
    def epoch_count(self):
        return self.epoch.epoch_index
