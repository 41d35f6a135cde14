# coding=utf-8
"""
Discrete-time single-server queue with a finite buffer.

The controller picks a service probability `a` and an arrival (flow) probability `b` each step.
The reward `5 - s` favours short queues; the two constraints ask for a service cost `-10a + 6 >= 0`
and a flow throughput `-8(1 - b)^2 + 2 >= 0` on average.
The built model is normalized to the package conventions: rewards in [0, 1], costs in [-1, 1] with feasibility `<= 0`.
"""
import numpy as np

from cmdp.model.cmdp import TabularCmdp
from .environment import ConfigInvalid


REWARD_OFFSET = 5.0


class QueueConfig(object):

    def __init__(self, buffer_size=5, service_actions=(0.2, 0.4, 0.6, 0.8), flow_actions=(0.4, 0.5, 0.6, 0.7)):
        """
        :param buffer_size: L, largest queue length
        :param service_actions: admissible service probabilities a
        :param flow_actions: admissible arrival probabilities b
        """
        self.buffer_size = int(buffer_size)
        self.service_actions = tuple(float(a) for a in service_actions)
        self.flow_actions = tuple(float(b) for b in flow_actions)
        if self.buffer_size < 1:
            raise ConfigInvalid('Buffer size must be at least 1 but got %d' % self.buffer_size)
        if self.buffer_size > REWARD_OFFSET:
            raise ConfigInvalid('Buffer size %d would produce negative rewards 5 - s' % self.buffer_size)
        for name, values in (('service', self.service_actions), ('flow', self.flow_actions)):
            if not values:
                raise ConfigInvalid('No %s actions given' % name)
            if not 0 < min(values) <= max(values) < 1:
                raise ConfigInvalid('%s probabilities must lie in (0, 1) but got %s' % (name, values))

    @property
    def n_states(self):
        return self.buffer_size + 1

    @property
    def n_actions(self):
        return len(self.service_actions) * len(self.flow_actions)

    def action_index(self, service_index, flow_index):
        return service_index * len(self.flow_actions) + flow_index

    def action_pair(self, action):
        """
Returns the (service, flow) probabilities of a composite action index.
        """
        service_index, flow_index = divmod(action, len(self.flow_actions))
        return self.service_actions[service_index], self.flow_actions[flow_index]

    def __repr__(self):
        return 'QueueConfig(L=%d, service=%s, flow=%s)' % (self.buffer_size, self.service_actions, self.flow_actions)


def queue_transition_row(state, service, flow, buffer_size):
    """
    Distribution of the next queue length.

    :param state: current queue length x
    :param service: probability a that a customer is served
    :param flow: probability b that a customer arrives
    :param buffer_size: L
    :return: array of length L + 1
    """
    row = np.zeros(buffer_size + 1)
    a, b = service, flow
    if state == 0:
        row[0] = 1 - b * (1 - a)
        row[1] = b * (1 - a)
    elif state == buffer_size:
        row[state - 1] = a
        row[state] = 1 - a
    else:
        row[state - 1] = a * (1 - b)
        row[state] = a * b + (1 - a) * (1 - b)
        row[state + 1] = (1 - a) * b
    return row


def service_cost(service):
    return -10.0 * service + 6.0


def flow_cost(flow):
    return -8.0 * (1.0 - flow) ** 2 + 2.0


def build_queue(config=None):
    """
    Builds the normalized queue CMDP.

    Composite action `i * |flow| + j` combines service action i with flow action j.
    Rewards are divided by 5; each cost is negated and divided by its largest magnitude over the table.
    The recorded scales convert back: `original = normalized * scale`.

    :param config: QueueConfig or None for the default queue
    :return: TabularCmdp starting from the empty queue
    """
    config = config or QueueConfig()
    L = config.buffer_size
    S, A = config.n_states, config.n_actions
    transition = np.zeros((S, A, S))
    reward = np.zeros((S, A))
    raw_costs = np.zeros((2, S, A))
    for s in range(S):
        for action in range(A):
            a, b = config.action_pair(action)
            transition[s, action] = queue_transition_row(s, a, b, L)
            reward[s, action] = REWARD_OFFSET - s
            raw_costs[0, s, action] = service_cost(a)
            raw_costs[1, s, action] = flow_cost(b)
    magnitudes = np.max(np.abs(raw_costs), axis=(1, 2))
    magnitudes[magnitudes == 0] = 1
    cost_scales = -magnitudes
    initial = np.zeros(S)
    initial[0] = 1
    return TabularCmdp(reward / REWARD_OFFSET, raw_costs / cost_scales[:, None, None], transition, initial,
                       channel_names=('service', 'flow'), reward_scale=REWARD_OFFSET, cost_scales=cost_scales, name='queue')
