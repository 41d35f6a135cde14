import numpy as np

from cmdp.model.cmdp import TabularCmdp, sample_index


class ConfigInvalid(ValueError):
    """
Raised when an environment builder receives parameters outside their admissible range.
    """


class Environment(object):
    """
    Simulator around a TabularCmdp that hides the transition kernel.

    Rewards and costs are known to the learner and exposed directly.
    The environment keeps its current state between calls; it is reset only on request.
    """

    def __init__(self, cmdp, rng, start_state=None):
        """
        :param cmdp: TabularCmdp, the hidden true model
        :param rng: numpy.random.Generator owned by this environment
        :param start_state: initial state, sampled from the initial distribution if None
        """
        assert isinstance(cmdp, TabularCmdp), cmdp
        self._cmdp = cmdp
        self._rng = rng
        self._transition_cdf = np.cumsum(cmdp.transition, axis=2)
        self.state = None
        self.steps = 0
        self.reset(start_state)

    @property
    def n_states(self):
        return self._cmdp.n_states

    @property
    def n_actions(self):
        return self._cmdp.n_actions

    @property
    def n_channels(self):
        return self._cmdp.n_channels

    @property
    def reward(self):
        return self._cmdp.reward

    @property
    def costs(self):
        return self._cmdp.costs

    @property
    def channel_names(self):
        return self._cmdp.channel_names

    @property
    def reward_scale(self):
        return self._cmdp.reward_scale

    @property
    def cost_scales(self):
        return self._cmdp.cost_scales

    def reset(self, start_state=None):
        if start_state is None:
            start_state = sample_index(self._cmdp.initial_distribution, self._rng)
        assert 0 <= start_state < self.n_states, 'invalid start state %s' % start_state
        self.state = int(start_state)
        return self.state

    def step(self, action):
        """
        Takes `action` in the current state.

        :param action: action index
        :return: tuple (next_state, reward, costs)
        """
        state = self.state
        cdf = self._transition_cdf[state, action]
        next_state = int(np.searchsorted(cdf, self._rng.random(), side='right'))
        if next_state >= self.n_states:
            next_state = int(np.flatnonzero(self._cmdp.transition[state, action] > 0)[-1])
        self.state = next_state
        self.steps += 1
        return next_state, self._cmdp.reward[state, action], self._cmdp.costs[:, state, action]

    def __repr__(self):
        return 'Environment(%s, state=%d)' % (self._cmdp, self.state)
