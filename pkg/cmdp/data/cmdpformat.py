# coding=utf-8
"""
Self-describing text format for tabular CMDPs.

    cmdp <name>
    states <S>
    actions <A>
    channels <name_1> ... <name_C>
    scales <reward_scale> <cost_scale_1> ... <cost_scale_C>
    initial <rho_1> ... <rho_S>
    reward
    <S lines of A values>
    cost <name>
    <S lines of A values>
    transition
    <S*A lines of S values, row (s, a) at index s*A + a>

Numbers are written with 17 significant digits so that reading a written model reproduces it bit for bit.
"""
import os

import six
import numpy as np

from cmdp.model.cmdp import TabularCmdp


HEADER_KEYS = ('cmdp', 'states', 'actions', 'channels', 'scales', 'initial')


class FormatError(ValueError):
    """
Raised when a CMDP file is truncated or contains malformed lines.
    """


def _format_row(row):
    return ' '.join('%.17g' % v for v in row)


def write_cmdp(cmdp, target):
    """
    Writes `cmdp` to a file path or a writable text stream.

    :param cmdp: TabularCmdp
    :param target: file path or stream
    """
    if isinstance(target, six.string_types):
        with open(os.path.expanduser(target), 'w') as stream:
            return write_cmdp(cmdp, stream)
    target.write('cmdp %s\n' % cmdp.name.replace(' ', '_'))
    target.write('states %d\n' % cmdp.n_states)
    target.write('actions %d\n' % cmdp.n_actions)
    target.write(('channels %s' % ' '.join(cmdp.channel_names)).rstrip() + '\n')
    target.write('scales %s\n' % _format_row([cmdp.reward_scale] + list(cmdp.cost_scales)))
    target.write('initial %s\n' % _format_row(cmdp.initial_distribution))
    target.write('reward\n')
    for row in cmdp.reward:
        target.write(_format_row(row) + '\n')
    for name, cost in zip(cmdp.channel_names, cmdp.costs):
        target.write('cost %s\n' % name)
        for row in cost:
            target.write(_format_row(row) + '\n')
    target.write('transition\n')
    for row in cmdp.transition.reshape(-1, cmdp.n_states):
        target.write(_format_row(row) + '\n')


def read_cmdp(source):
    """
    Reads a model written by `write_cmdp()`. Blank lines and lines starting with '#' are ignored.

    :param source: file path or readable text stream
    :return: TabularCmdp
    :raise FormatError: if the file is malformed
    :raise InvalidCmdp: if the tables violate the model invariants
    """
    if isinstance(source, six.string_types):
        with open(os.path.expanduser(source), 'r') as stream:
            return read_cmdp(stream)
    lines = [line.split() for line in source]
    lines = [tokens for tokens in lines if tokens and not tokens[0].startswith('#')]
    header = {}
    position = 0
    while position < len(lines) and lines[position][0] in HEADER_KEYS:
        header[lines[position][0]] = lines[position][1:]
        position += 1
    for key in ('states', 'actions'):
        if key not in header or len(header[key]) != 1:
            raise FormatError("Missing header line '%s'" % key)
    try:
        S, A = int(header['states'][0]), int(header['actions'][0])
    except ValueError:
        raise FormatError('State and action counts must be integers')
    channel_names = header.get('channels', [])
    C = len(channel_names)

    def table(rows, width, label):
        if position + rows > len(lines):
            raise FormatError('Truncated %s table' % label)
        try:
            values = np.array([[float(v) for v in lines[position + i]] for i in range(rows)])
        except ValueError:
            raise FormatError('Non-numeric entry in %s table' % label)
        if values.shape != (rows, width):
            raise FormatError('%s table must have %d rows of %d values' % (label, rows, width))
        return values

    def expect(keyword, argument=None):
        if position >= len(lines) or lines[position][0] != keyword or (argument is not None and lines[position][1:] != [argument]):
            raise FormatError("Expected '%s' at table line %d" % (' '.join(filter(None, [keyword, argument])), position + 1))

    expect('reward')
    position += 1
    reward = table(S, A, 'reward')
    position += S
    costs = []
    for name in channel_names:
        expect('cost', name)
        position += 1
        costs.append(table(S, A, 'cost %s' % name))
        position += S
    expect('transition')
    position += 1
    transition = table(S * A, S, 'transition').reshape(S, A, S)
    position += S * A
    if position != len(lines):
        raise FormatError('Unexpected content after transition table')
    scales = [float(v) for v in header.get('scales', [1.0] + [1.0] * C)]
    if len(scales) != 1 + C:
        raise FormatError('Expected %d scales but got %d' % (1 + C, len(scales)))
    initial = [float(v) for v in header['initial']] if 'initial' in header else None
    name = header['cmdp'][0] if header.get('cmdp') else 'cmdp'
    return TabularCmdp(reward, np.array(costs).reshape(C, S, A), transition, initial, channel_names, scales[0], scales[1:], name)
