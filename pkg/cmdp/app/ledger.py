# coding=utf-8
import math

import numpy as np


TRACE_POINTS = 1000


class RegretLedger(object):

    def __init__(self, oracle_gain, n_channels, horizon=None, trace_interval=None):
        """
        Running regret R(t) = t J* - Σ r and constraint violation C(t) = max(0, Σ c) per cost channel.

        Sums are accumulated step by step in double precision, in the order the steps were recorded.
        A trace row is kept every `trace_interval` steps and at `horizon`.

        :param oracle_gain: J*, the optimal constrained average reward
        :param n_channels: number of cost channels
        :param horizon: planned number of steps T, used for the default interval ceil(T / 1000)
        :param trace_interval: steps between trace rows, None for the default, 0 to disable tracing
        """
        self.oracle_gain = float(oracle_gain)
        self.n_channels = n_channels
        self.horizon = horizon
        if trace_interval is None:
            trace_interval = int(math.ceil(horizon / float(TRACE_POINTS))) if horizon else 1
        self.trace_interval = trace_interval
        self.t = 0
        self.cum_reward = 0.0
        self.cum_cost = [0.0] * n_channels
        self.trace = []

    @property
    def regret(self):
        return self.t * self.oracle_gain - self.cum_reward

    @property
    def violation(self):
        return np.array([max(0.0, c) for c in self.cum_cost])

    def record(self, reward, costs):
        """
        Adds one step.

        :param reward: reward of the step
        :param costs: one cost per channel
        """
        self.t += 1
        self.cum_reward += float(reward)
        for i in range(self.n_channels):
            self.cum_cost[i] += float(costs[i])
        if self.trace_interval and (self.t % self.trace_interval == 0 or self.t == self.horizon):
            self.trace.append(self.row())

    def record_all(self, rewards, costs):
        """
Adds a batch of steps; equivalent to calling `record()` for each step in order.
        """
        costs = np.asarray(costs).reshape(self.n_channels, -1)
        for t in range(len(rewards)):
            self.record(rewards[t], costs[:, t])

    def row(self):
        """
Current (t, R, C_1..C_m, reward_rate, cost_rate_1..cost_rate_m).
        """
        t = max(self.t, 1)
        return (self.t, self.regret) + tuple(self.violation) + (self.cum_reward / t,) + tuple(c / t for c in self.cum_cost)

    def columns(self, channel_names=None):
        names = channel_names or ['%d' % (i + 1) for i in range(self.n_channels)]
        return ['t', 'R'] + ['C_%s' % n for n in names] + ['reward_rate'] + ['cost_rate_%s' % n for n in names]

    def in_units(self, reward_scale, cost_scales):
        """
        Converts trace rows to the original units of a normalized model.

        Regret and reward rates are multiplied by `reward_scale`; violations by |scale| and cost rates by the signed scale,
        so that for negative scales the violation counts the shortfall below 0 in original units.

        :return: list of rows
        """
        cost_scales = np.asarray(cost_scales, dtype=np.float64)
        m = self.n_channels
        converted = []
        for row in self.trace:
            row = np.array(row, dtype=np.float64)
            row[1] *= reward_scale
            row[2:2 + m] *= np.abs(cost_scales)
            row[2 + m] *= reward_scale
            row[3 + m:] *= cost_scales
            converted.append(tuple(row))
        return converted

    def __repr__(self):
        return 'RegretLedger(t=%d, R=%.6g, C=%s)' % (self.t, self.regret, self.violation.tolist())
