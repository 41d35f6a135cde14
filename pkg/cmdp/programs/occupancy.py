# coding=utf-8
"""
Occupancy-measure linear programs for average-reward CMDPs with a known transition kernel.

The decision variable ν(s, a) is the long-run state-action frequency, flattened with index `s * A + a`.
"""
import math
import logging

import numpy as np

from cmdp.math import lp
from cmdp.model.cmdp import StationaryPolicy


logger = logging.getLogger(__name__)

OCCUPANCY_TOL = 1e-8
DUST_TOL = 1e-10


class Infeasible(ValueError):
    """
Raised when an occupancy program has no feasible point, e.g. because the cost tightening is larger than the Slater margin.
    """


class OccupancyMeasure(object):

    def __init__(self, mass, transition=None):
        """
        Long-run state-action frequencies.

        :param mass: table (S, A)
        :param transition: kernel (S, A, S) for which `mass` is stationary, None if untagged
        """
        self.mass = np.asarray(mass, dtype=np.float64)
        self.transition = transition

    @property
    def state_mass(self):
        return self.mass.sum(axis=1)

    def channel_values(self, signals):
        """
Returns Σ ν(s,a) g(s,a) for every channel of `signals` (G, S, A).
        """
        return np.einsum('sa,gsa->g', self.mass, signals)

    def violation(self, transition=None):
        """
        Largest violation of the occupancy conditions: unit mass, nonnegativity and, if a kernel is known, flow balance.
        """
        transition = self.transition if transition is None else transition
        violations = [abs(self.mass.sum() - 1), max(0.0, -self.mass.min())]
        if transition is not None:
            inflow = np.einsum('sa,sat->t', self.mass, transition)
            violations.append(np.max(np.abs(inflow - self.state_mass)))
        return float(max(violations))

    def __repr__(self):
        return 'OccupancyMeasure(S=%d, A=%d)' % self.mass.shape


def epsilon_schedule(K, t):
    """
    Constraint tightening `K sqrt(ln t / t)` for an epoch starting at time t.
    At t = 1 the logarithm is replaced by 1 so the first epoch is tightened by K.

    :param K: scale, >= 0
    :param t: epoch start time, >= 1
    :return: epsilon
    """
    assert K >= 0, 'invalid K: %s' % K
    assert t >= 1, 'invalid t: %s' % t
    log_t = math.log(t) if t > 1 else 1.0
    return K * math.sqrt(log_t / t)


def _epsilon_vector(epsilon, n_channels):
    epsilon = np.broadcast_to(np.asarray(epsilon, dtype=np.float64), (n_channels,))
    assert np.all(epsilon >= 0), 'epsilon must be nonnegative but got %s' % epsilon
    return epsilon


def occupancy_program(reward, costs, transition, epsilon=0.0, constrained=True):
    """
    Builds the occupancy LP: maximize Σ ν r subject to unit mass, flow balance under `transition`
    and Σ ν c_i <= -ε_i for every cost channel.

    :param reward: (S, A)
    :param costs: (C, S, A)
    :param transition: (S, A, S)
    :param epsilon: scalar or one tightening per channel
    :param constrained: if False, cost rows are omitted
    :return: LpProblem over S·A variables
    """
    S, A = reward.shape
    n = S * A
    own_state = np.kron(np.eye(S), np.ones((1, A)))
    inflow = transition.reshape(n, S).T
    A_eq = np.vstack([np.ones((1, n)), inflow - own_state])
    b_eq = np.concatenate([[1.0], np.zeros(S)])
    if constrained and costs.shape[0]:
        A_ineq = costs.reshape(costs.shape[0], n)
        b_ineq = -_epsilon_vector(epsilon, costs.shape[0])
    else:
        A_ineq, b_ineq = None, None
    return lp.LpProblem.from_arrays(reward.reshape(n), A_eq, b_eq, A_ineq, b_ineq)


def solve_occupancy(reward, costs, transition, epsilon=0.0, constrained=True, solver=None):
    """
    Solves `occupancy_program()`.

    :return: tuple (OccupancyMeasure tagged with `transition`, objective)
    :raise Infeasible: if no occupancy measure satisfies the tightened constraints
    """
    problem = occupancy_program(reward, costs, transition, epsilon, constrained)
    solution = lp.solve(problem, solver=solver)
    if solution.status != lp.OPTIMAL:
        raise Infeasible('Occupancy program is %s (epsilon=%s)' % (solution.status, epsilon))
    mass = solution.primal.reshape(reward.shape)
    return OccupancyMeasure(mass, transition), solution.objective_value


def solve_true_model(cmdp, epsilon=0.0, constrained=True, solver=None):
    """
    Optimal occupancy measure of a known CMDP.

    :param cmdp: TabularCmdp
    :param epsilon: nonnegative tightening, scalar or per channel
    :param constrained: if False, cost constraints are dropped
    :param solver: LpSolver or None for the default choice
    :return: tuple (OccupancyMeasure, optimal average reward)
    :raise Infeasible: if the tightened constraints cannot be met
    """
    return solve_occupancy(cmdp.reward, cmdp.costs, cmdp.transition, epsilon, constrained, solver)


def extract_policy(occupancy, dust_tol=DUST_TOL):
    """
    π(a|s) = ν(s,a) / Σ_a' ν(s,a'), uniform where the state mass is at most `dust_tol`.

    :param occupancy: OccupancyMeasure, ExtendedOccupancy or (S, A) table
    :return: StationaryPolicy
    """
    if hasattr(occupancy, 'occupancy'):
        occupancy = occupancy.occupancy
    mass = occupancy.mass if isinstance(occupancy, OccupancyMeasure) else np.asarray(occupancy, dtype=np.float64)
    mass = np.maximum(mass, 0)
    state_mass = mass.sum(axis=1, keepdims=True)
    A = mass.shape[1]
    visited = state_mass > dust_tol
    probs = np.where(visited, mass / np.where(visited, state_mass, 1), 1.0 / A)
    probs /= probs.sum(axis=1, keepdims=True)
    return StationaryPolicy(probs)
