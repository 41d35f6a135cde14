# coding=utf-8
"""
Finite Markov chain utilities: recurrence structure, stationary distributions, mixing and hitting times.

Chains are dense row-stochastic matrices of shape (S, S).
"""
import numpy as np
import scipy.linalg
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, breadth_first_order


STOCHASTIC_TOL = 1e-12
STATIONARY_TOL = 1e-10
MIXING_THRESHOLD = 0.25
MIXING_CAP = 100000


class NotErgodic(ValueError):
    """
Raised when a chain has more than one recurrent class, is periodic, or its stationary distribution cannot be resolved.
    """


class MixingCap(ValueError):
    """
Raised when a chain does not mix within the configured number of steps.
    """


def check_stochastic(matrix, tol=STOCHASTIC_TOL):
    """
Returns True if all rows of `matrix` are probability distributions within `tol`.
    """
    matrix = np.asarray(matrix)
    return bool(np.all(matrix >= 0) and np.all(np.abs(matrix.sum(axis=-1) - 1) <= tol))


def communicating_classes(chain):
    """
    Partitions the states into strongly connected components of the support graph.

    :param chain: row-stochastic matrix (S, S)
    :return: tuple (labels, closed) where labels[s] is the class of s and closed[k] tells whether class k is recurrent
    """
    support = csr_matrix(np.asarray(chain) > 0)
    count, labels = connected_components(support, directed=True, connection='strong')
    closed = np.ones(count, dtype=bool)
    rows, cols = support.nonzero()
    leaving = labels[rows] != labels[cols]
    closed[np.unique(labels[rows[leaving]])] = False
    return labels, closed


def recurrent_classes(chain):
    labels, closed = communicating_classes(chain)
    return [np.flatnonzero(labels == k) for k in np.flatnonzero(closed)]


def period(chain, states):
    """
    Computes the period of an irreducible class as the gcd of `level(u) + 1 - level(v)` over all edges u→v inside the class,
    where levels are breadth-first distances from the first state of the class.
    """
    states = np.asarray(states)
    sub = np.asarray(chain)[np.ix_(states, states)] > 0
    graph = csr_matrix(sub)
    order, predecessors = breadth_first_order(graph, 0, directed=True, return_predecessors=True)
    level = np.zeros(states.size, dtype=np.int64)
    for node in order[1:]:
        level[node] = level[predecessors[node]] + 1
    rows, cols = graph.nonzero()
    differences = np.abs(level[rows] + 1 - level[cols])
    return int(np.gcd.reduce(differences)) if differences.size else 1


def is_unichain(chain):
    """
True if the chain has exactly one recurrent class. Transient states are allowed.
    """
    return len(recurrent_classes(chain)) == 1


def is_ergodic(chain):
    """
True if the chain is irreducible and aperiodic.
    """
    classes = recurrent_classes(chain)
    return len(classes) == 1 and classes[0].size == np.shape(chain)[0] and period(chain, classes[0]) == 1


def stationary_distribution(chain, require_ergodic=True):
    """
    Solves `d P = d`, `sum(d) = 1`.

    With `require_ergodic=False`, unichain chains are accepted; transient states then receive probability 0.

    :param chain: row-stochastic matrix (S, S)
    :param require_ergodic: whether to reject reducible and periodic chains
    :return: stationary distribution (S,)
    :raise NotErgodic: if the distribution is not unique or the linear solve does not reach `STATIONARY_TOL`
    """
    chain = np.asarray(chain, dtype=np.float64)
    S = chain.shape[0]
    assert chain.shape == (S, S), 'chain must be square but has shape %s' % (chain.shape,)
    classes = recurrent_classes(chain)
    if len(classes) != 1:
        raise NotErgodic('Chain has %d recurrent classes' % len(classes))
    if require_ergodic:
        if classes[0].size != S:
            raise NotErgodic('States %s are transient' % np.setdiff1d(np.arange(S), classes[0]).tolist())
        p = period(chain, classes[0])
        if p != 1:
            raise NotErgodic('Chain is periodic with period %d' % p)
    system = np.vstack([chain.T - np.eye(S), np.ones((1, S))])
    rhs = np.zeros(S + 1)
    rhs[-1] = 1
    d = scipy.linalg.lstsq(system, rhs)[0]
    d = np.maximum(d, 0)
    d /= d.sum()
    residual = np.max(np.abs(d.dot(chain) - d))
    if residual > STATIONARY_TOL:
        raise NotErgodic('Stationary distribution residual %g exceeds %g' % (residual, STATIONARY_TOL))
    return d


def distance_to_stationarity(chain, d, t):
    """
Returns max_s TV(P^t(s, ·), d) with TV = half L1.
    """
    power = np.linalg.matrix_power(np.asarray(chain, dtype=np.float64), t)
    return float(0.5 * np.max(np.sum(np.abs(power - d[None, :]), axis=1)))


def mixing_time(chain, d=None, cap=MIXING_CAP, threshold=MIXING_THRESHOLD):
    """
    Smallest t >= 1 with `distance_to_stationarity(chain, d, t) <= threshold`.

    :param chain: ergodic row-stochastic matrix
    :param d: stationary distribution, computed if None
    :param cap: largest t tried
    :return: mixing time
    :raise MixingCap: if t would exceed `cap`
    """
    chain = np.asarray(chain, dtype=np.float64)
    if d is None:
        d = stationary_distribution(chain)
    power = chain.copy()
    for t in range(1, int(cap) + 1):
        if 0.5 * np.max(np.sum(np.abs(power - d[None, :]), axis=1)) <= threshold:
            return t
        power = power.dot(chain)
    raise MixingCap('Chain did not mix within %d steps' % cap)


def hitting_time(d):
    """
Returns max_s 1 / d(s).
    """
    d = np.asarray(d, dtype=np.float64)
    if np.any(d <= 0):
        raise NotErgodic('Stationary distribution has zero entries at states %s' % np.flatnonzero(d <= 0).tolist())
    return float(np.max(1.0 / d))


def span(values, axis=-1):
    values = np.asarray(values)
    return np.max(values, axis=axis) - np.min(values, axis=axis)
