# coding=utf-8
"""
Finite-horizon occupancy programs with Bernstein confidence bands, non-stationary policies and dynamic-programming oracles.

Variables ν(s', a, h, s'') are flattened in C order over the shape (S, A, H, S); steps h are 0-based.
"""
import math
import logging

import numpy as np

from cmdp.math import lp
from cmdp.model.cmdp import ShapeMismatch, InvalidCmdp, sample_index
from cmdp.math.markov import check_stochastic
from .occupancy import Infeasible, OCCUPANCY_TOL, DUST_TOL


logger = logging.getLogger(__name__)


class BernsteinSet(object):

    def __init__(self, p_hat, alpha, iota):
        """
        Per-element confidence bands |P'(s'|s,a) - P̂(s'|s,a)| <= 4 sqrt(P̂(s'|s,a) α(s,a)) + 28 α(s,a).

        :param p_hat: empirical kernel (S, A, S)
        :param alpha: α(s,a) = ι' / max(1, N(s,a)), shape (S, A)
        :param iota: ι' = ln(2 S A T / δ)
        """
        self.p_hat = np.asarray(p_hat, dtype=np.float64)
        self.alpha = np.asarray(alpha, dtype=np.float64)
        self.iota = iota

    @staticmethod
    def from_counts(transition_counts, T, delta):
        """
        Builds the set from cumulative transition counts N(s,a,s').
        Rows without data use the uniform kernel; their band is vacuous anyway.

        :param transition_counts: (S, A, S)
        :param T: total number of steps of the run
        :param delta: confidence parameter in (0, 1)
        """
        counts = np.asarray(transition_counts, dtype=np.float64)
        S, A = counts.shape[:2]
        assert 0 < delta < 1, 'invalid delta: %s' % delta
        visits = counts.sum(axis=2)
        p_hat = np.where(visits[..., None] > 0, counts / np.maximum(visits, 1)[..., None], 1.0 / S)
        iota = math.log(2.0 * S * A * T / delta)
        return BernsteinSet(p_hat, iota / np.maximum(1.0, visits), iota)

    @property
    def radius(self):
        """
Band half-width per (s, a, s'), clipped to [0, 1].
        """
        return np.clip(4 * np.sqrt(self.p_hat * self.alpha[..., None]) + 28 * self.alpha[..., None], 0, 1)

    def contains(self, kernel, tol=0.0):
        return bool(np.all(np.abs(np.asarray(kernel) - self.p_hat) <= self.radius + tol))


class FiniteHorizonOccupancy(object):

    def __init__(self, nu, start_state):
        """
        :param nu: table (S, A, H, S)
        :param start_state: state the episode starts in
        """
        self.nu = np.asarray(nu, dtype=np.float64)
        self.start_state = start_state

    @property
    def horizon(self):
        return self.nu.shape[2]

    @property
    def state_action_step(self):
        """
ν(s', a, h) summed over successors, shape (S, A, H).
        """
        return self.nu.sum(axis=3)

    @property
    def state_step(self):
        return self.nu.sum(axis=(1, 3))

    def value(self, signal):
        """
Returns ⟨ν, g⟩ = Σ ν(s', a, h) g(s', a) for a table g (S, A).
        """
        return float(np.einsum('sah,sa->', self.state_action_step, signal))

    def violation(self):
        """
Largest violation of the initial-state, per-step mass, flow and nonnegativity conditions.
        """
        S = self.nu.shape[0]
        start = np.zeros(S)
        start[self.start_state] = 1
        step_state = self.state_step
        arrivals = self.nu.sum(axis=(0, 1))  # (H, S') mass arriving after step h
        violations = [np.max(np.abs(step_state[:, 0] - start)),
                      np.max(np.abs(self.nu.sum(axis=(0, 1, 3)) - 1)),
                      max(0.0, -self.nu.min())]
        if self.horizon > 1:
            violations.append(np.max(np.abs(arrivals[:-1].T - step_state[:, 1:])))
        return float(max(violations))

    def kernel(self, fallback, dust_tol=DUST_TOL):
        """
P_ν(s''|s', a, h), shape (S, A, H, S); pairs with mass <= dust_tol use `fallback` (S, A, S).
        """
        mass = self.state_action_step[..., None]
        visited = mass > dust_tol
        return np.where(visited, self.nu / np.where(visited, mass, 1), np.asarray(fallback)[:, :, None, :])


class NonStationaryPolicy(object):
    """
    One action distribution per state and step, stored as a table (S, H, A).
    """

    def __init__(self, action_probs):
        action_probs = np.array(action_probs, dtype=np.float64)
        if action_probs.ndim != 3:
            raise ShapeMismatch('action_probs must have shape (S, H, A) but has shape %s' % (action_probs.shape,))
        if not check_stochastic(action_probs):
            raise InvalidCmdp('Policy rows must be distributions')
        action_probs.flags.writeable = False
        self.action_probs = action_probs

    @property
    def horizon(self):
        return self.action_probs.shape[1]

    def sample(self, state, step, rng):
        return sample_index(self.action_probs[state, step], rng)

    def __repr__(self):
        return 'NonStationaryPolicy(S=%d, H=%d, A=%d)' % self.action_probs.shape


def opt1_program(start_state, bernstein, reward, costs, span_bound, horizon):
    """
    Builds the finite-horizon optimistic LP.

    :param start_state: s, the state the episode starts in
    :param bernstein: BernsteinSet
    :param reward: (S, A)
    :param costs: (C, S, A)
    :param span_bound: budget for ⟨ν, c⟩, scalar or per channel
    :param horizon: H
    :return: LpProblem over S·A·H·S variables
    """
    S, A = reward.shape
    H = horizon
    shape = (S, A, H, S)
    n = S * A * H * S
    index = np.arange(n).reshape(shape)
    eq_rows, eq_rhs = [], []
    # --- Initial state and per-step mass ---
    for s in range(S):
        row = np.zeros(n)
        row[index[s, :, 0, :].ravel()] = 1
        eq_rows.append(row)
        eq_rhs.append(1.0 if s == start_state else 0.0)
    for h in range(H):
        row = np.zeros(n)
        row[index[:, :, h, :].ravel()] = 1
        eq_rows.append(row)
        eq_rhs.append(1.0)
    # --- Flow conservation between consecutive steps ---
    for h in range(H - 1):
        for s in range(S):
            row = np.zeros(n)
            row[index[:, :, h, s].ravel()] = 1
            row[index[s, :, h + 1, :].ravel()] -= 1
            eq_rows.append(row)
            eq_rhs.append(0.0)
    # --- Bernstein bands, skipping vacuous sides ---
    radius = bernstein.radius
    upper = bernstein.p_hat + radius
    lower = bernstein.p_hat - radius
    ineq_rows = []
    for s in range(S):
        for a in range(A):
            for target in range(S):
                for h in range(H):
                    if upper[s, a, target] < 1:
                        row = np.zeros(n)
                        row[index[s, a, h, :]] = -upper[s, a, target]
                        row[index[s, a, h, target]] += 1
                        ineq_rows.append(row)
                    if lower[s, a, target] > 0:
                        row = np.zeros(n)
                        row[index[s, a, h, :]] = lower[s, a, target]
                        row[index[s, a, h, target]] -= 1
                        ineq_rows.append(row)
    ineq_rhs = [0.0] * len(ineq_rows)
    per_variable = lambda table: np.broadcast_to(table[:, :, None, None], shape).ravel()
    costs = np.reshape(costs, (-1, S, A))
    span_bound = np.broadcast_to(np.asarray(span_bound, dtype=np.float64), (costs.shape[0],))
    for channel in range(costs.shape[0]):
        ineq_rows.append(per_variable(costs[channel]))
        ineq_rhs.append(span_bound[channel])
    A_ineq = np.array(ineq_rows) if ineq_rows else None
    return lp.LpProblem.from_arrays(per_variable(reward), np.array(eq_rows), eq_rhs, A_ineq, ineq_rhs if ineq_rows else None)


def solve_opt1(start_state, bernstein, reward, costs, span_bound, horizon, solver=None):
    """
    Maximizes ⟨ν, r⟩ over finite-horizon occupancy measures from `start_state` whose conditional kernels lie in
    the Bernstein bands, subject to ⟨ν, c⟩ <= span_bound.

    :return: tuple (FiniteHorizonOccupancy, objective)
    :raise Infeasible: if the cost budget cannot be met
    """
    S, A = reward.shape
    problem = opt1_program(start_state, bernstein, reward, costs, span_bound, horizon)
    solution = lp.solve(problem, solver=solver)
    if solution.status != lp.OPTIMAL:
        raise Infeasible('Finite-horizon program from state %d is %s (span bound %s)' % (start_state, solution.status, span_bound))
    occupancy = FiniteHorizonOccupancy(solution.primal.reshape(S, A, horizon, S), start_state)
    assert occupancy.violation() <= OCCUPANCY_TOL, 'finite-horizon solution violates the occupancy conditions by %g' % occupancy.violation()
    return occupancy, solution.objective_value


def extract_nonstationary(occupancy, dust_tol=DUST_TOL):
    """
    π(a|s', h) = ν(s', a, h) / ν(s', h), uniform where ν(s', h) <= dust_tol.

    :param occupancy: FiniteHorizonOccupancy
    :return: NonStationaryPolicy
    """
    mass = np.maximum(occupancy.state_action_step, 0).transpose(0, 2, 1)  # (S, H, A)
    total = mass.sum(axis=2, keepdims=True)
    visited = total > dust_tol
    probs = np.where(visited, mass / np.where(visited, total, 1), 1.0 / mass.shape[2])
    probs /= probs.sum(axis=2, keepdims=True)
    return NonStationaryPolicy(probs)


def backward_induction(transition, reward, horizon, policy=None):
    """
    Finite-horizon dynamic programming.

    Without `policy`, computes the optimal values and a deterministic optimal policy.
    With `policy`, evaluates that policy. The transition may be stationary (S, A, S) or per step (S, A, H, S).

    :param transition: kernel
    :param reward: (S, A)
    :param horizon: H
    :param policy: NonStationaryPolicy or None
    :return: tuple (values (H + 1, S) with values[0] the expected total from each start state, NonStationaryPolicy)
    """
    S, A = reward.shape
    transition = np.asarray(transition)
    values = np.zeros((horizon + 1, S))
    probs = np.zeros((S, horizon, A))
    for h in reversed(range(horizon)):
        kernel = transition[:, :, h, :] if transition.ndim == 4 else transition
        q = reward + kernel.dot(values[h + 1])
        if policy is None:
            best = np.argmax(q, axis=1)
            probs[np.arange(S), h, best] = 1
        else:
            probs[:, h, :] = policy.action_probs[:, h, :]
        values[h] = np.sum(probs[:, h, :] * q, axis=1)
    return values, NonStationaryPolicy(probs)
