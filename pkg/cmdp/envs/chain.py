import numpy as np

from cmdp.model.cmdp import TabularCmdp
from .environment import ConfigInvalid


LEFT = 0
RIGHT = 1


def weakly_communicating_chain(n, p_forward, rng=None, right_cost=0.5, name='chain'):
    """
    River-swim style chain of `n` states.

    LEFT moves deterministically one state towards 0.
    RIGHT moves forward with probability `p_forward`; the remaining mass is split evenly between staying and moving back.
    Moves beyond either end stay in place.
    LEFT at state 0 pays a small reward 0.05, RIGHT at state n-1 pays 1.
    The single cost channel charges `right_cost` for RIGHT and credits it for LEFT.

    Policies that only go LEFT are absorbed at state 0, so the model is communicating but not ergodic.

    :param n: number of states, at least 3
    :param p_forward: success probability of RIGHT in (0, 1]
    :param rng: if given, rewards of all other state-action pairs receive a jitter in [0, 0.01)
    :param right_cost: cost magnitude in [0, 1]
    :return: TabularCmdp starting at state 0
    """
    if n < 3:
        raise ConfigInvalid('Chain needs at least 3 states but got %d' % n)
    if not 0 < p_forward <= 1:
        raise ConfigInvalid('p_forward must lie in (0, 1] but got %s' % p_forward)
    if not 0 <= right_cost <= 1:
        raise ConfigInvalid('right_cost must lie in [0, 1] but got %s' % right_cost)
    transition = np.zeros((n, 2, n))
    for s in range(n):
        back, forward = max(s - 1, 0), min(s + 1, n - 1)
        transition[s, LEFT, back] = 1
        transition[s, RIGHT, forward] += p_forward
        transition[s, RIGHT, s] += (1 - p_forward) / 2
        transition[s, RIGHT, back] += (1 - p_forward) / 2
    reward = np.zeros((n, 2))
    if rng is not None:
        reward += rng.uniform(0, 0.01, size=(n, 2))
    reward[0, LEFT] = 0.05
    reward[n - 1, RIGHT] = 1
    costs = np.zeros((1, n, 2))
    costs[0, :, RIGHT] = right_cost
    costs[0, :, LEFT] = -right_cost
    initial = np.zeros(n)
    initial[0] = 1
    return TabularCmdp(reward, costs, transition, initial, channel_names=('effort',), name=name)
