# coding=utf-8
"""
Finite-horizon approximation for weakly communicating CMDPs.

The run is cut into K episodes of H = ceil((T / S²A)^(1/3)) steps. Every episode starts wherever the previous one ended,
plans with the finite-horizon optimistic program over Bernstein bands and follows the resulting non-stationary policy.
"""
import math
import logging
import warnings

import numpy as np

from cmdp.programs.finite_horizon import BernsteinSet, solve_opt1, extract_nonstationary
from cmdp.programs.occupancy import solve_true_model, extract_policy
from cmdp.model.evaluation import evaluate_policy
from cmdp.math.markov import span
from .learner import Learner, Stopwatch


logger = logging.getLogger(__name__)


class HorizonDegenerate(ValueError):
    """
Raised when T < S²A, where the episode length would collapse to a single step.
    """


def fha_schedule(T, n_states, n_actions):
    """
    H = ceil((T / (S²A))^(1/3)), K = floor(T / H).

    :return: tuple (H, K)
    :raise HorizonDegenerate: if T < S²A
    """
    size = n_states ** 2 * n_actions
    if T < size:
        raise HorizonDegenerate('T=%d is smaller than S^2 A=%d' % (T, size))
    ratio = float(T) / size
    H = int(math.ceil(ratio ** (1.0 / 3)))
    if (H - 1) ** 3 >= ratio:  # floating cube roots of perfect cubes
        H -= 1
    if H == 1:
        warnings.warn('Episode length H=1 for T=%d, S=%d, A=%d: every episode is a single step' % (T, n_states, n_actions))
    return H, T // H


def span_oracle(cmdp, channel=1, require_ergodic=False):
    """
    Span of the bias of a cost channel under the optimal constrained policy of the true model.

    :param cmdp: TabularCmdp with a single recurrent class under the optimal policy
    :param channel: signal channel (1 = first cost)
    :return: sp(v_c)
    """
    occupancy, _ = solve_true_model(cmdp)
    evaluation = evaluate_policy(cmdp, extract_policy(occupancy), require_ergodic=require_ergodic)
    return float(span(evaluation.bias[channel]))


class FiniteHorizonLearner(Learner):

    def __init__(self, env, rng, T, span_bound, delta=0.1, solver=None):
        """
        :param env: Environment
        :param rng: numpy.random.Generator
        :param T: total number of steps, fixes H, K and the confidence level ι'
        :param span_bound: cost budget per episode, scalar or per channel
        :param delta: confidence parameter
        :param solver: LpSolver or None
        """
        Learner.__init__(self, 'FHA', env, rng)
        self.T = T
        self.H, self.K = fha_schedule(T, env.n_states, env.n_actions)
        self.span_bound = span_bound
        self.delta = delta
        self.solver = solver
        self.transition_counts = np.zeros((env.n_states, env.n_actions, env.n_states), dtype=np.int64)
        self.policy = None
        self.episode = 0
        self.step_in_episode = 0
        self.last_bernstein = None
        self.last_occupancy = None

    record_fields = ('k', 'start_state', 'objective', 'cost_value')

    def start_episode(self):
        """
Plans the next episode from the current environment state and the counts gathered so far.
        """
        start = self.env.state
        bernstein = BernsteinSet.from_counts(self.transition_counts, self.T, self.delta)
        with Stopwatch() as watch:
            occupancy, objective = solve_opt1(start, bernstein, self.env.reward, self.env.costs, self.span_bound, self.H, self.solver)
        self.policy = extract_nonstationary(occupancy)
        self.episode += 1
        self.step_in_episode = 0
        self.last_bernstein, self.last_occupancy = bernstein, occupancy
        record = {'k': self.episode, 'start_state': start, 'objective': objective}
        for i, cost in enumerate(self.env.costs):
            record['cost_value' if i == 0 else 'cost_value_%d' % (i + 1)] = occupancy.value(cost)
        record['solve_time'] = watch.elapsed
        self.records.append(record)
        logger.debug('FHA episode %d from state %d: objective=%g in %.3f s' % (self.episode, start, objective, watch.elapsed))

    def step(self):
        if self.policy is None or (self.step_in_episode >= self.H and self.episode < self.K):
            self.start_episode()
        state = self.env.state
        action = self.policy.sample(state, self.step_in_episode % self.H, self.rng)
        next_state, reward, costs = self.env.step(action)
        self.transition_counts[state, action, next_state] += 1
        self.step_in_episode += 1
        self.time += 1
        return action, next_state, reward, costs


def fha_run(env, T, span_bound, delta, rng, ledger=None, solver=None):
    """
    Runs the finite-horizon approximation for T steps; steps after the last full episode reuse its policy.

    :return: tuple (FiniteHorizonLearner, ledger)
    """
    learner = FiniteHorizonLearner(env, rng, T, span_bound, delta, solver)
    learner.run(T, ledger)
    return learner, ledger
