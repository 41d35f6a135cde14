# coding=utf-8
"""
Invariant sweep over a model: the checks behind `cmdplab validate`.
"""
import logging
from collections import namedtuple

import numpy as np

from cmdp.math import markov
from cmdp.model.cmdp import StationaryPolicy
from cmdp.model.evaluation import induced_chain, evaluate_policy, bellman_residual, BELLMAN_TOL, SingularSystem
from cmdp.programs.occupancy import solve_true_model, Infeasible, OCCUPANCY_TOL


logger = logging.getLogger(__name__)

SweepCheck = namedtuple('SweepCheck', ['name', 'value', 'tolerance', 'passed'])


def random_policy(n_states, n_actions, rng):
    return StationaryPolicy(rng.dirichlet(np.ones(n_actions), size=n_states))


def invariant_sweep(cmdp, rng, policies=100, solver=None):
    """
    Evaluates `policies` random stationary policies plus the uniform one and solves the true-model LP.

    Checked: Bellman residual, zero stationary-weighted bias, zero-mean advantages (all within 1e-9) and the
    flow constraints of the optimal occupancy measure (within 1e-8). Policies whose chain is not ergodic are counted
    but not evaluated.

    :param cmdp: TabularCmdp
    :param rng: numpy.random.Generator
    :param policies: number of random policies
    :return: list of SweepCheck
    """
    candidates = [StationaryPolicy.uniform(cmdp.n_states, cmdp.n_actions)] + [random_policy(cmdp.n_states, cmdp.n_actions, rng) for _ in range(policies)]
    residual = normalization = advantage_mean = 0.0
    evaluated = non_ergodic = singular = 0
    for policy in candidates:
        if not markov.is_ergodic(induced_chain(cmdp, policy)):
            non_ergodic += 1
            continue
        try:
            evaluation = evaluate_policy(cmdp, policy)
        except SingularSystem:
            singular += 1
            continue
        evaluated += 1
        residual = max(residual, bellman_residual(cmdp, evaluation))
        normalization = max(normalization, float(np.max(np.abs(evaluation.bias.dot(evaluation.stationary_distribution)))))
        advantage_mean = max(advantage_mean, float(np.max(np.abs(np.einsum('sa,gsa->gs', policy.action_probs, evaluation.advantage)))))
    checks = [
        SweepCheck('policies evaluated', evaluated, None, True),
        SweepCheck('policies with non-ergodic chain', non_ergodic, None, True),
        SweepCheck('singular bias systems', singular, 0, singular == 0),
        SweepCheck('bellman residual', residual, BELLMAN_TOL, residual <= BELLMAN_TOL),
        SweepCheck('bias normalization', normalization, BELLMAN_TOL, normalization <= BELLMAN_TOL),
        SweepCheck('advantage mean', advantage_mean, BELLMAN_TOL, advantage_mean <= BELLMAN_TOL),
    ]
    try:
        occupancy, objective = solve_true_model(cmdp, solver=solver)
        violation = occupancy.violation(cmdp.transition)
        checks.append(SweepCheck('optimal gain', objective, None, True))
        checks.append(SweepCheck('occupancy flow violation', violation, OCCUPANCY_TOL, violation <= OCCUPANCY_TOL))
    except Infeasible as err:
        logger.warning('True-model program is infeasible: %s' % err)
        checks.append(SweepCheck('true-model program feasible', 0, None, False))
    for check in checks:
        logger.debug('%s: %s' % (check.name, check.value))
    return checks
