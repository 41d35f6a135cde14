# coding=utf-8
"""
Optimistic occupancy program over an L1 confidence set of transition kernels.

The joint choice of ν and a plausible kernel P̃ is linearized through z(s,a,s') = ν(s,a) P̃(s'|s,a).
Auxiliary variables w(s,a,s') bound |z - P̂ ν| so the L1 ball becomes linear.
"""
import math

import numpy as np
import scipy.linalg

from cmdp.math import lp
from .occupancy import OccupancyMeasure, Infeasible, OCCUPANCY_TOL, DUST_TOL, _epsilon_vector


MAX_RADIUS = 2.0


class ConfidenceRadii(object):

    def __init__(self, radius):
        radius = np.asarray(radius, dtype=np.float64)
        assert np.all(radius >= 0), 'radii must be nonnegative'
        self.radius = radius

    @staticmethod
    def weissman(counts, t, n_states, n_actions):
        """
        radius(s,a) = min(2, sqrt(14 S ln(2 A t) / max(1, N(s,a))))

        :param counts: visits N(s,a) before the epoch, shape (S, A)
        :param t: epoch start time
        """
        counts = np.asarray(counts, dtype=np.float64)
        radius = np.sqrt(14.0 * n_states * math.log(2.0 * n_actions * max(t, 1)) / np.maximum(1.0, counts))
        return ConfidenceRadii(np.minimum(MAX_RADIUS, radius))

    @staticmethod
    def constant(value, n_states, n_actions):
        return ConfidenceRadii(np.full((n_states, n_actions), float(value)))

    def contains(self, p_hat, kernel, tol=0.0):
        """
True if every row of `kernel` lies in the L1 ball of its radius around `p_hat`.
        """
        return bool(np.all(np.abs(kernel - p_hat).sum(axis=2) <= self.radius + tol))


class ExtendedOccupancy(object):

    def __init__(self, z):
        """
        Joint state-action-successor frequencies.

        :param z: table (S, A, S)
        """
        self.z = np.asarray(z, dtype=np.float64)

    @property
    def occupancy(self):
        return OccupancyMeasure(self.z.sum(axis=2))

    def kernel(self, fallback, dust_tol=DUST_TOL):
        """
        Recovers P̃(s'|s,a) = z(s,a,s') / ν(s,a); rows with ν(s,a) <= dust_tol are taken from `fallback`.
        """
        nu = self.z.sum(axis=2, keepdims=True)
        visited = nu > dust_tol
        return np.where(visited, self.z / np.where(visited, nu, 1), fallback)

    def violation(self):
        """
Largest violation of unit mass, nonnegativity and flow balance.
        """
        inflow = self.z.sum(axis=(0, 1))
        outflow = self.z.sum(axis=(1, 2))
        return float(max(abs(self.z.sum() - 1), max(0.0, -self.z.min()), np.max(np.abs(inflow - outflow))))

    def __repr__(self):
        return 'ExtendedOccupancy(S=%d, A=%d)' % self.z.shape[:2]


def optimistic_program(p_hat, radii, reward, costs, epsilon=0.0, constrained=True):
    """
    Builds the extended LP over z (S·A·S variables) followed by w (S·A·S variables).

    :param p_hat: empirical kernel (S, A, S)
    :param radii: ConfidenceRadii
    :param reward: (S, A)
    :param costs: (C, S, A)
    :param epsilon: tightening per channel
    :param constrained: if False, cost rows are omitted
    :return: LpProblem
    """
    S, A = reward.shape
    SA = S * A
    n = SA * S
    aggregate = np.kron(np.eye(SA), np.ones((1, S)))  # ν = aggregate · z
    arrive = np.tile(np.eye(S), (1, SA))  # Σ_{s,a} z(s,a,s')
    leave = np.kron(np.eye(S), np.ones((1, A * S)))  # Σ_{a,s''} z(s',a,s'')
    eq_z = np.vstack([np.ones((1, n)), arrive - leave])
    A_eq = np.hstack([eq_z, np.zeros_like(eq_z)])
    b_eq = np.concatenate([[1.0], np.zeros(S)])
    p_rows = p_hat.reshape(SA, S)
    deviation = np.eye(n) - scipy.linalg.block_diag(*[np.outer(p_rows[k], np.ones(S)) for k in range(SA)])
    ball = np.vstack([np.hstack([deviation, -np.eye(n)]),
                      np.hstack([-deviation, -np.eye(n)]),
                      np.hstack([-radii.radius.reshape(SA, 1) * aggregate, aggregate])])
    blocks = [ball]
    rhs = [np.zeros(ball.shape[0])]
    if constrained and costs.shape[0]:
        cost_rows = costs.reshape(costs.shape[0], SA).dot(aggregate)
        blocks.append(np.hstack([cost_rows, np.zeros_like(cost_rows)]))
        rhs.append(-_epsilon_vector(epsilon, costs.shape[0]))
    objective = np.concatenate([reward.reshape(SA).dot(aggregate), np.zeros(n)])
    return lp.LpProblem.from_arrays(objective, A_eq, b_eq, np.vstack(blocks), np.concatenate(rhs))


def solve_optimistic(p_hat, radii, reward, costs, epsilon=0.0, constrained=True, solver=None):
    """
    Maximizes the average reward jointly over occupancy measures and kernels in the L1 confidence set.

    :param p_hat: empirical kernel (S, A, S), rows are distributions
    :param radii: ConfidenceRadii
    :param reward: (S, A)
    :param costs: (C, S, A)
    :param epsilon: nonnegative tightening, scalar or per channel
    :param constrained: if False, cost rows are omitted
    :param solver: LpSolver or None
    :return: tuple (ExtendedOccupancy, objective)
    :raise Infeasible: if the tightening cannot be met by any plausible kernel
    """
    problem = optimistic_program(p_hat, radii, reward, costs, epsilon, constrained)
    solution = lp.solve(problem, solver=solver)
    if solution.status != lp.OPTIMAL:
        raise Infeasible('Optimistic program is %s (epsilon=%s)' % (solution.status, epsilon))
    S, A = reward.shape
    z = solution.primal[:S * A * S].reshape(S, A, S)
    occupancy = ExtendedOccupancy(z)
    assert occupancy.violation() <= OCCUPANCY_TOL, 'optimistic solution violates the occupancy conditions by %g' % occupancy.violation()
    return occupancy, solution.objective_value
