# coding=utf-8
"""
Primal-dual policy gradient for average-reward CMDPs with a tabular softmax policy.

Each epoch rolls out H steps without resets, estimates advantages from subtrajectories of length N that start
at least 2N steps apart, takes an ascent step on the Lagrangian J_r - λ J_c and a projected dual step on λ.
"""
import math
import logging
from collections import namedtuple

import numpy as np
from scipy.special import softmax

from cmdp.math.markov import NotErgodic, MixingCap
from cmdp.model.cmdp import StationaryPolicy
from cmdp.model.evaluation import evaluate_policy, induced_chain
from cmdp.math import markov
from .learner import Learner


logger = logging.getLogger(__name__)


class ScheduleTooShort(ValueError):
    """
Raised when an epoch of H steps cannot hold two subtrajectories of length N, i.e. H <= 2N, or when not even one epoch fits into T.
    """


class SoftmaxPolicyParams(object):

    def __init__(self, theta):
        """
        Tabular softmax parameters, π_θ(a|s) ∝ exp θ(s,a).

        :param theta: (S, A)
        """
        theta = np.array(theta, dtype=np.float64)
        assert theta.ndim == 2 and np.all(np.isfinite(theta)), 'invalid theta'
        self.theta = theta

    @staticmethod
    def zeros(n_states, n_actions):
        return SoftmaxPolicyParams(np.zeros((n_states, n_actions)))

    @property
    def probs(self):
        return softmax(self.theta, axis=1)

    def policy(self):
        return StationaryPolicy(self.probs)

    def copied_with(self, theta):
        return SoftmaxPolicyParams(theta)


def score(params, state, action):
    """
    ∇_θ log π_θ(a|s): coordinate (s, a') is 1{a'=a} - π_θ(a'|s), all other states are 0.

    :return: (S, A)
    """
    result = np.zeros_like(params.theta)
    result[state] = -params.probs[state]
    result[state, action] += 1
    return result


class DualState(namedtuple('DualState', ['lam', 'slater_delta', 'beta'])):
    """
Lagrange multiplier λ in [0, 2/δ] with its step size β.
    """

    @property
    def upper(self):
        return 2.0 / self.slater_delta

    def updated(self, cost_estimate):
        """
Returns the state after λ ← clip(λ + β Ĵ_c, 0, 2/δ).
        """
        return self._replace(lam=float(np.clip(self.lam + self.beta * cost_estimate, 0.0, self.upper)))


class EpochSchedule(object):

    def __init__(self, T, t_mix, t_hit, xi=0.4, h_scale=16.0, n_scale=4.0):
        """
        Epoch length H = h_scale · t_mix · t_hit · T^ξ · (log2 T)², subtrajectory length N = n_scale · t_mix · log2 T,
        number of epochs K = floor(T / H).

        :param T: total number of steps
        :param t_mix: mixing time bound
        :param t_hit: hitting time bound
        :param xi: exponent ξ
        :param h_scale: constant in H
        :param n_scale: constant in N
        :raise ScheduleTooShort: if H <= 2N or K < 1
        """
        assert T >= 2, 'T must be at least 2 but got %s' % T
        self.T = int(T)
        self.xi = xi
        log_T = math.log(T, 2)
        self.H = int(math.ceil(h_scale * t_mix * t_hit * T ** xi * log_T ** 2))
        self.N = max(1, int(math.ceil(n_scale * t_mix * log_T)))
        self.K = self.T // self.H
        if self.H <= 2 * self.N:
            raise ScheduleTooShort('Epoch length H=%d must exceed 2N=%d' % (self.H, 2 * self.N))
        if self.K < 1:
            raise ScheduleTooShort('Epoch length H=%d exceeds T=%d' % (self.H, self.T))

    def __repr__(self):
        return 'EpochSchedule(T=%d, H=%d, N=%d, K=%d)' % (self.T, self.H, self.N, self.K)


class Trajectory(namedtuple('Trajectory', ['states', 'actions', 'signals'])):
    """
    One epoch of interaction: states (H,), actions (H,) and signals (G, H) with the reward in channel 0.
    """

    @property
    def length(self):
        return len(self.states)


AdvantageEstimate = namedtuple('AdvantageEstimate', ['value', 'subtrajectory_count'])


def subtrajectory_starts(states, target_state, N):
    """
    Start indices τ_i of the subtrajectories used for `target_state`.

    The scan starts at 0; when s_τ is the target, τ is recorded and advanced by 2N, otherwise by 1.
    It stops once τ > len - 1 - N.
    """
    states = np.asarray(states)
    last = len(states) - 1 - N
    if last < 0:
        return np.zeros(0, dtype=np.int64)
    occurrences = np.flatnonzero(states[:last + 1] == target_state)
    starts = []
    cursor = 0
    while True:
        i = np.searchsorted(occurrences, cursor)
        if i >= occurrences.size:
            break
        tau = occurrences[i]
        starts.append(tau)
        cursor = tau + 2 * N
    return np.array(starts, dtype=np.int64)


def estimate_state_advantages(trajectory, target_state, probs, N, cumulative=None):
    """
    Advantage estimates Â_g(s, a) for one state and all actions.

    V̂ is the mean subtrajectory sum; Q̂(s,a) averages the sums whose first action is a, weighted by 1/π(a|s).

    :param trajectory: Trajectory
    :param target_state: s
    :param probs: policy table (S, A)
    :param N: subtrajectory length
    :param cumulative: optional prefix sums of the signals, shape (G, H + 1)
    :return: tuple (advantages (G, A), M)
    """
    if cumulative is None:
        cumulative = np.concatenate([np.zeros((trajectory.signals.shape[0], 1)), np.cumsum(trajectory.signals, axis=1)], axis=1)
    starts = subtrajectory_starts(trajectory.states, target_state, N)
    G = cumulative.shape[0]
    A = probs.shape[1]
    M = starts.size
    if M == 0:
        return np.zeros((G, A)), 0
    sums = cumulative[:, starts + N] - cumulative[:, starts]  # (G, M)
    first_actions = np.asarray(trajectory.actions)[starts]
    v_hat = sums.mean(axis=1)
    q_hat = np.zeros((G, A))
    for a in range(A):
        q_hat[:, a] = sums[:, first_actions == a].sum(axis=1) / M / probs[target_state, a]
    return q_hat - v_hat[:, None], M


def estimate_advantage(trajectory, target_state, target_action, params, N):
    """
    Subtrajectory estimate of the advantage of (s, a) for every signal channel.

    :return: AdvantageEstimate with value (G,) and the number of subtrajectories M
    """
    advantages, M = estimate_state_advantages(trajectory, target_state, params.probs, N)
    return AdvantageEstimate(advantages[:, target_action], M)


def advantage_table(trajectory, params, N):
    """
Estimated advantages (G, S, A) for every state visited by the trajectory; unvisited states are 0.
    """
    probs = params.probs
    S, A = probs.shape
    cumulative = np.concatenate([np.zeros((trajectory.signals.shape[0], 1)), np.cumsum(trajectory.signals, axis=1)], axis=1)
    table = np.zeros((trajectory.signals.shape[0], S, A))
    for s in np.unique(trajectory.states):
        table[:, s, :] = estimate_state_advantages(trajectory, s, probs, N, cumulative)[0]
    return table


def gradient_estimate(trajectory, params, lam, N=None, cost_channel=1, advantages=None):
    """
    ω = (1/H) Σ_t Â_L(s_t, a_t) ∇ log π_θ(a_t|s_t) with Â_L = Â_r - λ Â_c.

    :param trajectory: Trajectory of length H
    :param params: SoftmaxPolicyParams
    :param lam: multiplier λ
    :param N: subtrajectory length, required unless `advantages` is given
    :param cost_channel: signal channel of the constraint
    :param advantages: exact advantages (G, S, A) to use instead of estimates
    :return: (S, A)
    """
    if advantages is None:
        assert N is not None, 'N is required for estimated advantages'
        advantages = advantage_table(trajectory, params, N)
    lagrangian = advantages[0] - lam * advantages[cost_channel]
    probs = params.probs
    S, A = probs.shape
    visits = np.zeros((S, A))
    np.add.at(visits, (np.asarray(trajectory.states), np.asarray(trajectory.actions)), 1)
    weighted = visits * lagrangian
    omega = weighted - probs * weighted.sum(axis=1, keepdims=True)
    return omega / trajectory.length


def exact_gradient(cmdp, params, lam, cost_channel=1, require_ergodic=True):
    """
    ∇_θ (J_r - λ J_c) for the tabular softmax: d(s) π(a|s) A_L(s, a).

    :return: (S, A)
    """
    evaluation = evaluate_policy(cmdp, params.policy(), require_ergodic=require_ergodic)
    lagrangian = evaluation.advantage[0] - lam * evaluation.advantage[cost_channel]
    return evaluation.stationary_distribution[:, None] * params.probs * lagrangian


def rollout(env, params, H, rng):
    """
    Plays π_θ for H steps from the current environment state.

    :return: Trajectory
    """
    probs_cdf = np.cumsum(params.probs, axis=1)
    A = probs_cdf.shape[1]
    states = np.empty(H, dtype=np.int64)
    actions = np.empty(H, dtype=np.int64)
    signals = np.empty((1 + env.n_channels, H))
    uniforms = rng.random(H)
    for t in range(H):
        state = env.state
        action = min(int(np.searchsorted(probs_cdf[state], uniforms[t], side='right')), A - 1)
        _, reward, costs = env.step(action)
        states[t] = state
        actions[t] = action
        signals[0, t] = reward
        signals[1:, t] = costs
    return Trajectory(states, actions, signals)


EpochTrace = namedtuple('EpochTrace', ['trajectory', 'omega', 'cost_estimate', 'lam'])


def primal_dual_epoch(params, dual, schedule, env, rng, alpha, cost_channel=1, advantages=None):
    """
    One epoch of the primal-dual method.

    Rolls out H steps, estimates the Lagrangian gradient, sets θ ← θ + α ω and
    λ ← clip(λ + β Ĵ_c, 0, 2/δ) where Ĵ_c averages the cost over the last H - N steps.

    :param params: SoftmaxPolicyParams θ_k
    :param dual: DualState λ_k
    :param schedule: EpochSchedule
    :param env: Environment, continued from its current state
    :param rng: generator for action sampling
    :param alpha: primal step size
    :param cost_channel: signal channel of the constraint
    :param advantages: optional function params -> exact advantages (G, S, A)
    :return: tuple (params θ_{k+1}, dual λ_{k+1}, EpochTrace)
    """
    assert alpha > 0, 'invalid alpha: %s' % alpha
    if schedule.H <= 2 * schedule.N:
        raise ScheduleTooShort('Epoch length H=%d must exceed 2N=%d' % (schedule.H, 2 * schedule.N))
    trajectory = rollout(env, params, schedule.H, rng)
    exact = advantages(params) if advantages is not None else None
    omega = gradient_estimate(trajectory, params, dual.lam, schedule.N, cost_channel, exact)
    cost_estimate = float(np.mean(trajectory.signals[cost_channel, schedule.N:]))
    new_params = params.copied_with(params.theta + alpha * omega)
    new_dual = dual.updated(cost_estimate)
    return new_params, new_dual, EpochTrace(trajectory, omega, cost_estimate, dual.lam)


# --- Oracles computed from the true model ---

def mixing_hitting_oracle(cmdp, rng=None, samples=64, safety=2.0, max_deterministic=256, cap=markov.MIXING_CAP):
    """
    Upper bounds on t_mix and t_hit over a grid of policies: the uniform policy, every deterministic policy
    when there are at most `max_deterministic` of them, and `samples` random softmax policies otherwise.
    Policies whose chain is not ergodic are skipped. Both maxima are multiplied by `safety`.

    :return: tuple (t_mix, t_hit)
    """
    S, A = cmdp.n_states, cmdp.n_actions
    policies = [StationaryPolicy.uniform(S, A)]
    if A ** S <= max_deterministic:
        for index in range(A ** S):
            actions = [(index // A ** s) % A for s in range(S)]
            policies.append(StationaryPolicy.deterministic(actions, A))
    else:
        rng = rng if rng is not None else np.random.default_rng(0)
        for _ in range(samples):
            policies.append(SoftmaxPolicyParams(rng.normal(0, 3, size=(S, A))).policy())
    t_mix, t_hit, skipped = 0, 0.0, 0
    for policy in policies:
        chain = induced_chain(cmdp, policy)
        try:
            d = markov.stationary_distribution(chain)
            t_mix = max(t_mix, markov.mixing_time(chain, d, cap=cap))
            t_hit = max(t_hit, markov.hitting_time(d))
        except (NotErgodic, MixingCap):
            skipped += 1
    if skipped:
        logger.warning('Skipped %d of %d policies with non-ergodic or slowly mixing chains' % (skipped, len(policies)))
    if t_mix == 0:
        raise NotErgodic('No policy of the grid induces an ergodic chain')
    return safety * t_mix, safety * t_hit


def estimate_smoothness(cmdp, rng, samples=16, h=1e-4, safety=2.0, cost_channel=None):
    """
    Estimates the smoothness constant L of J_r (or of a cost channel) by central differences of the exact gradient
    along random unit directions at random θ, and returns `safety` times the largest ratio found.
    """
    channel = 0 if cost_channel is None else cost_channel
    S, A = cmdp.n_states, cmdp.n_actions
    largest = 0.0
    for _ in range(samples):
        theta = rng.normal(0, 1, size=(S, A))
        direction = rng.normal(0, 1, size=(S, A))
        direction /= np.linalg.norm(direction)
        plus = _channel_gradient(cmdp, theta + h * direction, channel)
        minus = _channel_gradient(cmdp, theta - h * direction, channel)
        largest = max(largest, np.linalg.norm(plus - minus) / (2 * h))
    return safety * largest


def _channel_gradient(cmdp, theta, channel):
    params = SoftmaxPolicyParams(theta)
    evaluation = evaluate_policy(cmdp, params.policy())
    return evaluation.stationary_distribution[:, None] * params.probs * evaluation.advantage[channel]


def default_alpha(smoothness, slater_delta):
    """
α = 1 / (4 L (1 + 2/δ))
    """
    return 1.0 / (4 * smoothness * (1 + 2.0 / slater_delta))


class PolicyGradientLearner(Learner):

    def __init__(self, env, rng, schedule, slater_delta, alpha, beta=None, cost_channel=1, theta=None, oracle=None):
        """
        Runs the primal-dual policy gradient on `env`.

        :param env: Environment
        :param rng: numpy.random.Generator
        :param schedule: EpochSchedule
        :param slater_delta: δ > 0, caps λ at 2/δ
        :param alpha: primal step size
        :param beta: dual step size, T^(-ξ) if None
        :param cost_channel: signal channel of the constraint (1 = first cost)
        :param theta: initial parameters (S, A), zeros if None
        :param oracle: TabularCmdp used only to report J_r(θ_k) and J_c(θ_k) per epoch, or None
        """
        Learner.__init__(self, 'Primal-dual PG', env, rng)
        assert slater_delta > 0, 'invalid slater_delta: %s' % slater_delta
        assert 1 <= cost_channel <= env.n_channels, 'invalid cost channel %d' % cost_channel
        self.schedule = schedule
        self.alpha = alpha
        self.cost_channel = cost_channel
        beta = schedule.T ** -schedule.xi if beta is None else beta
        self.params = SoftmaxPolicyParams(np.zeros((env.n_states, env.n_actions)) if theta is None else theta)
        self.dual = DualState(0.0, float(slater_delta), float(beta))
        self.oracle = oracle
        self.epoch = 0

    record_fields = ('k', 'J_r', 'J_c', 'J_c_hat', 'lambda', 'omega_norm')

    def run_epoch(self, ledger=None):
        params, dual = self.params, self.dual
        self.params, self.dual, trace = primal_dual_epoch(params, dual, self.schedule, self.env, self.rng, self.alpha, self.cost_channel)
        self.epoch += 1
        self.time += self.schedule.H
        if ledger is not None:
            ledger.record_all(trace.trajectory.signals[0], trace.trajectory.signals[1:])
        record = {'k': self.epoch, 'J_c_hat': trace.cost_estimate, 'lambda': trace.lam, 'omega_norm': float(np.linalg.norm(trace.omega))}
        if self.oracle is not None:
            gains = evaluate_policy(self.oracle, params.policy()).gain
            record['J_r'], record['J_c'] = float(gains[0]), float(gains[self.cost_channel])
        else:
            record['J_r'], record['J_c'] = float('nan'), float('nan')
        self.records.append(record)
        logger.debug('PG epoch %d: J_c_hat=%.4g lambda=%.4g |omega|=%.4g' % (self.epoch, trace.cost_estimate, self.dual.lam, record['omega_norm']))
        return trace

    def step(self):
        probs = self.params.probs
        state = self.env.state
        action = min(int(np.searchsorted(np.cumsum(probs[state]), self.rng.random(), side='right')), probs.shape[1] - 1)
        next_state, reward, costs = self.env.step(action)
        self.time += 1
        return action, next_state, reward, costs

    def run(self, steps, ledger=None):
        """
Runs as many full epochs as fit into `steps` and plays the remaining steps with the last policy.
        """
        epochs = steps // self.schedule.H
        for _ in range(epochs):
            self.run_epoch(ledger)
        return Learner.run(self, steps - epochs * self.schedule.H, ledger)


def run_policy_gradient(env, T, slater_delta, rng, oracle=None, xi=0.4, beta=None, alpha=None, h_scale=16.0, n_scale=4.0,
                        cost_channel=1, smoothness=None, t_mix=None, t_hit=None, ledger=None):
    """
    Sets up the schedule and step sizes and runs the learner for T steps.
    Mixing and hitting times, and the smoothness constant behind the default α, come from the true model `oracle`
    unless they are given.

    :return: tuple (PolicyGradientLearner, ledger)
    """
    if t_mix is None or t_hit is None:
        assert oracle is not None, 't_mix and t_hit must be given when no true model is available'
        grid_mix, grid_hit = mixing_hitting_oracle(oracle, rng)
        t_mix = grid_mix if t_mix is None else t_mix
        t_hit = grid_hit if t_hit is None else t_hit
    assert oracle is not None or alpha is not None or smoothness is not None, 'alpha or smoothness must be given when no true model is available'
    schedule = EpochSchedule(T, t_mix, t_hit, xi, h_scale, n_scale)
    if alpha is None:
        smoothness = estimate_smoothness(oracle, rng) if smoothness is None else smoothness
        alpha = default_alpha(smoothness, slater_delta)
    logger.info('Policy gradient with %s, t_mix=%g, t_hit=%g, alpha=%g' % (schedule, t_mix, t_hit, alpha))
    learner = PolicyGradientLearner(env, rng, schedule, slater_delta, alpha, beta, cost_channel, oracle=oracle)
    learner.run(T, ledger)
    return learner, ledger
