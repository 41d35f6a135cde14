# coding=utf-8
"""
Exact average-reward evaluation of stationary policies on a known model.

All quantities are computed for every signal channel at once; channel 0 is the reward, channels 1..C the costs.
"""
import numpy as np
import scipy.linalg

from cmdp.math import markov
from cmdp.math.markov import NotErgodic, MixingCap  # re-exported
from .cmdp import StationaryPolicy, sample_index


BELLMAN_TOL = 1e-9


class SingularSystem(ValueError):
    """
Raised when the bias equations have no unique solution, which signals a periodic or reducible chain.
    """


class PolicyEvaluation(object):

    def __init__(self, gain, stationary_distribution, bias, q, signal_names):
        """
        Gain, stationary distribution and relative values of one policy.

        :param gain: (G,) long-run averages
        :param stationary_distribution: (S,)
        :param bias: (G, S) with stationary-weighted mean zero
        :param q: (G, S, A)
        :param signal_names: one name per channel
        """
        self.gain = gain
        self.stationary_distribution = stationary_distribution
        self.bias = bias
        self.q = q
        self.advantage = q - bias[:, :, None]
        self.signal_names = signal_names

    @property
    def reward_gain(self):
        return float(self.gain[0])

    @property
    def cost_gains(self):
        return self.gain[1:]

    def __repr__(self):
        return 'PolicyEvaluation(%s)' % ', '.join('%s=%.6g' % (name, g) for name, g in zip(self.signal_names, self.gain))


def _check(cmdp, policy):
    if not isinstance(policy, StationaryPolicy):
        policy = StationaryPolicy(policy)
    policy.check_compatible(cmdp)
    return policy


def induced_chain(cmdp, policy):
    """
P^π(s, s') = Σ_a π(a|s) P(s'|s, a)
    """
    policy = _check(cmdp, policy)
    return np.einsum('sa,sat->st', policy.action_probs, cmdp.transition)


def induced_signals(cmdp, policy):
    """
Per-state expected signals under `policy`, shape (G, S).
    """
    policy = _check(cmdp, policy)
    return np.einsum('sa,gsa->gs', policy.action_probs, cmdp.signals)


def stationary_distribution(chain, require_ergodic=True):
    return markov.stationary_distribution(chain, require_ergodic=require_ergodic)


def evaluate_policy(cmdp, policy, require_ergodic=True):
    """
    Computes gain, bias, Q-values and advantages of `policy` for the reward and every cost channel.

    The bias solves `(I - P^π) v = g^π - J` with the normalization `d·v = 0`, stacked into one least-squares system.

    :param cmdp: TabularCmdp
    :param policy: StationaryPolicy or (S, A) table
    :param require_ergodic: if False, unichain models with transient states are accepted
    :return: PolicyEvaluation
    :raise NotErgodic: if the induced chain has no unique stationary distribution
    :raise SingularSystem: if the bias equations cannot be solved to `BELLMAN_TOL`
    """
    policy = _check(cmdp, policy)
    chain = induced_chain(cmdp, policy)
    d = markov.stationary_distribution(chain, require_ergodic=require_ergodic)
    g_pi = induced_signals(cmdp, policy)
    gain = g_pi.dot(d)
    S = cmdp.n_states
    system = np.vstack([np.eye(S) - chain, d[None, :]])
    rhs = np.vstack([(g_pi - gain[:, None]).T, np.zeros((1, g_pi.shape[0]))])
    try:
        solution, _, rank, _ = scipy.linalg.lstsq(system, rhs)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SingularSystem('Bias equations could not be solved: %s' % exc)
    if rank < S:
        raise SingularSystem('Bias equations have rank %d < %d' % (rank, S))
    bias = solution.T
    residual = np.max(np.abs(system.dot(solution) - rhs)) if rhs.size else 0.0
    if residual > BELLMAN_TOL:
        raise SingularSystem('Bias equations residual %g exceeds %g' % (residual, BELLMAN_TOL))
    q = cmdp.signals - gain[:, None, None] + np.einsum('sat,gt->gsa', cmdp.transition, bias)
    return PolicyEvaluation(gain, d, bias, q, cmdp.signal_names)


def bellman_residual(cmdp, evaluation):
    """
Returns max |q(s,a) - g(s,a) + J - Σ_s' P(s'|s,a) v(s')| over channels, states and actions.
    """
    expected = cmdp.signals - evaluation.gain[:, None, None] + np.einsum('sat,gt->gsa', cmdp.transition, evaluation.bias)
    return float(np.max(np.abs(evaluation.q - expected)))


def gain(cmdp, policy, require_ergodic=True):
    """
Long-run averages (G,) of `policy` without computing relative values.
    """
    chain = induced_chain(cmdp, policy)
    d = markov.stationary_distribution(chain, require_ergodic=require_ergodic)
    return induced_signals(cmdp, policy).dot(d)


def mixing_time(cmdp, policy, cap=markov.MIXING_CAP):
    chain = induced_chain(cmdp, policy)
    return markov.mixing_time(chain, markov.stationary_distribution(chain), cap=cap)


def hitting_time(cmdp, policy):
    chain = induced_chain(cmdp, policy)
    return markov.hitting_time(markov.stationary_distribution(chain))


def simulate_average(cmdp, policy, steps, rng, start_state=None):
    """
    Runs `policy` for `steps` transitions and returns the empirical average of every channel.

    Used as a Monte-Carlo cross-check of `evaluate_policy`.

    :return: tuple (averages (G,), per-step signal array (G, steps))
    """
    policy = _check(cmdp, policy)
    state = sample_index(cmdp.initial_distribution, rng) if start_state is None else start_state
    signals = cmdp.signals
    trace = np.empty((signals.shape[0], steps))
    action_cdf = np.cumsum(policy.action_probs, axis=1)
    transition_cdf = np.cumsum(cmdp.transition, axis=2)
    uniforms = rng.random((steps, 2))
    for t in range(steps):
        action = min(int(np.searchsorted(action_cdf[state], uniforms[t, 0], side='right')), cmdp.n_actions - 1)
        trace[:, t] = signals[:, state, action]
        state = min(int(np.searchsorted(transition_cdf[state, action], uniforms[t, 1], side='right')), cmdp.n_states - 1)
    return trace.mean(axis=1), trace
