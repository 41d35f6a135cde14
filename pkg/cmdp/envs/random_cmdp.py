import numpy as np

from cmdp.model.cmdp import TabularCmdp, StationaryPolicy
from cmdp.model.evaluation import gain
from .environment import ConfigInvalid


def random_ergodic_cmdp(n_states, n_actions, n_channels, rng, mix_floor=None, slater_margin=None, name='random'):
    """
    Draws a CMDP whose transition rows are `(1 - S·η) · Dirichlet(1, ..., 1) + η`.

    Every entry is at least η, so the chain induced by any policy is ergodic.
    Rewards are uniform in [0, 1] and costs uniform in [-1, 1].

    If `slater_margin` is given, each cost channel is shifted (and shrunk back into [-1, 1] if necessary)
    so that the uniform policy satisfies it with average cost `-slater_margin / scale`, where scale >= 1
    is the shrink factor; the model is then strictly feasible.

    :param n_states: S
    :param n_actions: A
    :param n_channels: number of cost channels
    :param rng: numpy.random.Generator
    :param mix_floor: η in (0, 1/S], defaults to 1 / (4 S)
    :param slater_margin: desired strict-feasibility margin of the uniform policy or None
    :return: TabularCmdp with uniform initial distribution
    """
    S, A = int(n_states), int(n_actions)
    if S < 1 or A < 1 or n_channels < 0:
        raise ConfigInvalid('Invalid sizes S=%d, A=%d, channels=%d' % (S, A, n_channels))
    eta = 1.0 / (4 * S) if mix_floor is None else float(mix_floor)
    if not 0 < eta <= 1.0 / S:
        raise ConfigInvalid('mix_floor must lie in (0, 1/S] but got %s' % eta)
    weight = max(0.0, 1.0 - S * eta)
    transition = weight * rng.dirichlet(np.ones(S), size=(S, A)) + eta
    transition /= transition.sum(axis=2, keepdims=True)
    reward = rng.uniform(0, 1, size=(S, A))
    costs = rng.uniform(-1, 1, size=(n_channels, S, A))
    cmdp = TabularCmdp(reward, costs, transition, name=name)
    if slater_margin is not None and n_channels:
        uniform_costs = gain(cmdp, StationaryPolicy.uniform(S, A))[1:]
        costs = costs - (uniform_costs + slater_margin)[:, None, None]
        costs /= np.maximum(1.0, np.max(np.abs(costs), axis=(1, 2)))[:, None, None]
        cmdp = cmdp.copied_with(costs=costs)
    return cmdp
