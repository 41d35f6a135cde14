# coding=utf-8
import numpy as np
import six

from cmdp.math.markov import check_stochastic, STOCHASTIC_TOL


class ShapeMismatch(ValueError):
    """
Raised when tables of a model or policy have incompatible shapes.
    """


class InvalidCmdp(ValueError):
    """
Raised when table entries violate the model conventions, e.g. rewards outside [0, 1] or transition rows that are not distributions.
    """


def _readonly(array):
    array = np.array(array, dtype=np.float64)
    array.flags.writeable = False
    return array


class TabularCmdp(object):
    """
    Finite constrained MDP with known rewards and costs.

    Signals are normalized: rewards lie in [0, 1], costs in [-1, 1] and a policy is feasible when every long-run
    average cost is <= 0.
    `reward_scale` and `cost_scales` convert normalized values back to the units the model was specified in:
    `original = normalized * scale`.

    All tables are read-only. Use `copied_with()` to derive modified models.
    """

    def __init__(self, reward, costs, transition, initial_distribution=None, channel_names=None, reward_scale=1.0, cost_scales=None, name='cmdp'):
        """
        :param reward: table (S, A)
        :param costs: table (C, S, A), one table per constraint channel
        :param transition: table (S, A, S)
        :param initial_distribution: distribution over S, uniform if None
        :param channel_names: one name per cost channel
        :param reward_scale: factor converting normalized rewards to original units
        :param cost_scales: one factor per cost channel
        :param name: display name
        """
        reward = _readonly(reward)
        if reward.ndim != 2:
            raise ShapeMismatch('reward must have shape (S, A) but has shape %s' % (reward.shape,))
        S, A = reward.shape
        costs = _readonly(np.reshape(costs, (-1, S, A)) if np.size(costs) else np.zeros((0, S, A)))
        transition = _readonly(transition)
        if transition.shape != (S, A, S):
            raise ShapeMismatch('transition must have shape %s but has shape %s' % ((S, A, S), transition.shape))
        if initial_distribution is None:
            initial_distribution = np.full(S, 1.0 / S)
        initial_distribution = _readonly(initial_distribution)
        if initial_distribution.shape != (S,):
            raise ShapeMismatch('initial distribution must have shape (%d,) but has shape %s' % (S, initial_distribution.shape))
        C = costs.shape[0]
        if channel_names is None:
            channel_names = tuple('c%d' % (i + 1) for i in range(C))
        channel_names = tuple(channel_names)
        if len(channel_names) != C:
            raise ShapeMismatch('Expected %d channel names but got %d' % (C, len(channel_names)))
        for channel_name in channel_names:
            assert isinstance(channel_name, six.string_types) and channel_name and not any(c.isspace() for c in channel_name), 'invalid channel name: %s' % channel_name
        cost_scales = _readonly(np.ones(C) if cost_scales is None else cost_scales)
        if cost_scales.shape != (C,):
            raise ShapeMismatch('Expected %d cost scales but got shape %s' % (C, cost_scales.shape))
        if not np.all(np.isfinite(reward)) or np.any(reward < 0) or np.any(reward > 1):
            raise InvalidCmdp('Rewards must lie in [0, 1]')
        if not np.all(np.isfinite(costs)) or np.any(np.abs(costs) > 1):
            raise InvalidCmdp('Costs must lie in [-1, 1]')
        if not check_stochastic(transition):
            raise InvalidCmdp('Transition rows must be distributions within %g' % STOCHASTIC_TOL)
        if not check_stochastic(initial_distribution):
            raise InvalidCmdp('Initial distribution must be a distribution')
        self.reward = reward
        self.costs = costs
        self.transition = transition
        self.initial_distribution = initial_distribution
        self.channel_names = channel_names
        self.reward_scale = float(reward_scale)
        self.cost_scales = cost_scales
        self.name = name

    @property
    def n_states(self):
        return self.reward.shape[0]

    @property
    def n_actions(self):
        return self.reward.shape[1]

    @property
    def n_channels(self):
        return self.costs.shape[0]

    @property
    def signals(self):
        """
Reward and costs stacked into one table of shape (1 + C, S, A). Channel 0 is the reward.
        """
        return np.concatenate([self.reward[None, ...], self.costs], axis=0)

    @property
    def signal_names(self):
        return ('reward',) + self.channel_names

    def original_reward(self, value):
        return value * self.reward_scale

    def original_costs(self, values):
        return np.asarray(values) * self.cost_scales

    def copied_with(self, **kwargs):
        """
Returns a copy of this model with some tables replaced. The original remains unaltered and the copy is validated again.
        :param kwargs: constructor arguments to change, e.g. transition=...
        :return: TabularCmdp
        """
        arguments = dict(reward=self.reward, costs=self.costs, transition=self.transition, initial_distribution=self.initial_distribution,
                         channel_names=self.channel_names, reward_scale=self.reward_scale, cost_scales=self.cost_scales, name=self.name)
        for key in kwargs:
            assert key in arguments, 'TabularCmdp has no property %s' % key
        arguments.update(kwargs)
        return TabularCmdp(**arguments)

    def without_constraints(self):
        return self.copied_with(costs=np.zeros((0,) + self.reward.shape), channel_names=(), cost_scales=np.zeros(0))

    def __repr__(self):
        return '%s(S=%d, A=%d, channels=%s)' % (self.name, self.n_states, self.n_actions, ','.join(self.channel_names))


class StationaryPolicy(object):
    """
    Stochastic stationary policy given by one action distribution per state.
    """

    def __init__(self, action_probs):
        action_probs = _readonly(action_probs)
        if action_probs.ndim != 2:
            raise ShapeMismatch('action_probs must have shape (S, A) but has shape %s' % (action_probs.shape,))
        if not check_stochastic(action_probs):
            raise InvalidCmdp('Policy rows must be distributions within %g' % STOCHASTIC_TOL)
        self.action_probs = action_probs

    @staticmethod
    def uniform(n_states, n_actions):
        return StationaryPolicy(np.full((n_states, n_actions), 1.0 / n_actions))

    @staticmethod
    def deterministic(actions, n_actions):
        """
        :param actions: one action index per state
        :param n_actions: size of the action space
        """
        actions = np.asarray(actions, dtype=np.int64)
        probs = np.zeros((actions.size, n_actions))
        probs[np.arange(actions.size), actions] = 1
        return StationaryPolicy(probs)

    @property
    def n_states(self):
        return self.action_probs.shape[0]

    @property
    def n_actions(self):
        return self.action_probs.shape[1]

    def sample(self, state, rng):
        return sample_index(self.action_probs[state], rng)

    def check_compatible(self, cmdp):
        if self.action_probs.shape != cmdp.reward.shape:
            raise ShapeMismatch('Policy of shape %s does not fit %s' % (self.action_probs.shape, cmdp))

    def __repr__(self):
        return 'StationaryPolicy(S=%d, A=%d)' % self.action_probs.shape


def sample_index(distribution, rng):
    """
    Draws an index from `distribution` by inverse CDF on a single `rng.random()` draw, in canonical index order.

    :param distribution: probabilities summing to 1
    :param rng: object with a `random()` method, e.g. numpy.random.Generator
    :return: index
    """
    cdf = np.cumsum(distribution)
    index = int(np.searchsorted(cdf, rng.random(), side='right'))
    if index >= len(distribution):
        index = int(np.flatnonzero(np.asarray(distribution) > 0)[-1])
    return index


def sample_step(cmdp, state, action, rng):
    """
    Simulates one transition.

    :param cmdp: TabularCmdp
    :param state: current state index
    :param action: action index
    :param rng: random source with a `random()` method
    :return: tuple (next_state, reward, costs) with costs of shape (C,)
    """
    assert 0 <= state < cmdp.n_states and 0 <= action < cmdp.n_actions, 'invalid state/action (%s, %s)' % (state, action)
    next_state = sample_index(cmdp.transition[state, action], rng)
    return next_state, cmdp.reward[state, action], cmdp.costs[:, state, action]
