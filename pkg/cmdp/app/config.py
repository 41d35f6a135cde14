# coding=utf-8
"""
Experiment configuration files.

A configuration is a sequence of `key = value` lines. Everything after '#' is a comment and blank lines are ignored.
Keys that are not given take their defaults, see `ExperimentConfig.VALUES` or `cmdplab run --help-config`.
"""
import os
import multiprocessing

import six

from .value import ConfigValue, ConfigInt, ConfigFloat, ConfigBool, ConfigString, ConfigChoice


ALGORITHMS = ('cucrl', 'cpsrl', 'pg', 'fha')
ENVIRONMENTS = ('queue', 'random', 'chain', 'file')
WORKERS_VARIABLE = 'CMDP_WORKERS'


class ConfigError(ValueError):
    """
Raised for unknown keys, malformed lines and values outside their admissible range.
    """


class ExperimentConfig(object):

    VALUES = (
        # --- Experiment ---
        ConfigString('name', 'experiment', category='experiment'),
        ConfigChoice('algorithm', 'cucrl', ALGORITHMS, category='experiment'),
        ConfigInt('T', 10000, (1, 10 ** 9), category='experiment'),
        ConfigInt('seed', 0, (0, 2 ** 63 - 1), category='experiment'),
        ConfigInt('replications', 1, (1, 100000), category='experiment'),
        ConfigString('output', 'experiments', category='experiment'),
        ConfigInt('trace_interval', 0, (0, 10 ** 9), category='experiment'),
        ConfigBool('plot', False, category='experiment'),
        ConfigChoice('solver', 'auto', ('auto', 'simplex', 'highs'), category='experiment'),
        # --- Environment ---
        ConfigChoice('env', 'queue', ENVIRONMENTS, category='env'),
        ConfigInt('buffer_size', 5, (1, 1000), category='queue'),
        ConfigInt('states', 4, (1, 10000), category='random'),
        ConfigInt('actions', 2, (1, 10000), category='random'),
        ConfigInt('channels', 1, (0, 100), category='random'),
        ConfigFloat('mix_floor', 0.0, (0, 1), category='random'),
        ConfigFloat('slater_margin', 0.0, (0, 1), category='random'),
        ConfigInt('env_seed', 0, (0, 2 ** 63 - 1), category='random'),
        ConfigInt('chain_length', 6, (3, 10000), category='chain'),
        ConfigFloat('p_forward', 0.9, (0, 1), category='chain'),
        ConfigFloat('right_cost', 0.5, (0, 1), category='chain'),
        ConfigString('env_file', '', category='file'),
        # --- C-UCRL / C-PSRL ---
        ConfigFloat('K', 1.0, (0, 1e6), category='cucrl,cpsrl'),
        ConfigChoice('mode', 'doubling', ('doubling', 'linear'), category='cucrl,cpsrl'),
        # --- Policy gradient ---
        ConfigFloat('slater_delta', 0.1, (0, 1e6), category='pg'),
        ConfigFloat('alpha', 0.0, (0, 1e9), category='pg'),
        ConfigFloat('beta', 0.0, (0, 1e9), category='pg'),
        ConfigFloat('xi', 0.4, (0, 1), category='pg'),
        ConfigFloat('h_scale', 16.0, (0, 1e9), category='pg'),
        ConfigFloat('n_scale', 4.0, (0, 1e9), category='pg'),
        ConfigInt('cost_channel', 1, (1, 100), category='pg'),
        ConfigInt('t_mix', 0, (0, 10 ** 9), category='pg'),
        ConfigInt('t_hit', 0, (0, 10 ** 9), category='pg'),
        # --- Finite-horizon approximation ---
        ConfigFloat('delta', 0.1, (0, 1), category='fha'),
        ConfigFloat('span_bound', 0.0, (0, 1e9), category='fha'),
    )

    def __init__(self, **values):
        """
        Holds one value per key of `VALUES`. Zero-valued optional numbers (mix_floor, slater_margin, alpha, beta,
        t_mix, t_hit, span_bound, trace_interval) mean "derive automatically".

        :param values: overrides of the defaults
        :raise ConfigError: for unknown keys or invalid values
        """
        declared = {value.name: value for value in self.VALUES}
        self._values = {name: value.initial_value for name, value in declared.items()}
        for key, value in values.items():
            if key not in declared:
                raise ConfigError("Unknown configuration key '%s'" % key)
            try:
                self._values[key] = declared[key].parse(value) if isinstance(value, six.string_types) else declared[key].check(ConfigValue.value(value))
            except (ValueError, OverflowError) as err:
                raise ConfigError(str(err))
        self._validate()

    def _validate(self):
        if self.env == 'file' and not self.env_file:
            raise ConfigError('env = file requires env_file')
        if self.algorithm == 'pg' and self.slater_delta <= 0:
            raise ConfigError('pg requires slater_delta > 0')
        if self.algorithm == 'fha' and not 0 < self.delta < 1:
            raise ConfigError('fha requires 0 < delta < 1')
        if self.env == 'chain' and not 0 < self.p_forward <= 1:
            raise ConfigError('p_forward must lie in (0, 1]')

    def __getattr__(self, item):
        if item.startswith('_'):
            raise AttributeError(item)
        try:
            return self._values[item]
        except KeyError:
            raise AttributeError("ExperimentConfig has no key '%s'" % item)

    @property
    def values(self):
        return dict(self._values)

    def copied_with(self, **kwargs):
        values = self.values
        values.update(kwargs)
        return ExperimentConfig(**values)

    def dump(self, stream):
        for value in self.VALUES:
            stream.write('%s = %s\n' % (value.name, self._values[value.name]))

    def __eq__(self, other):
        return isinstance(other, ExperimentConfig) and self._values == other._values

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'ExperimentConfig(%s)' % ', '.join('%s=%s' % (v.name, self._values[v.name]) for v in self.VALUES)


def parse_config(lines):
    """
    Parses `key = value` lines.

    :param lines: iterable of strings
    :return: ExperimentConfig
    :raise ConfigError: for malformed lines, duplicate or unknown keys and invalid values
    """
    values = {}
    for number, line in enumerate(lines, 1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError("Line %d is not of the form 'key = value': %s" % (number, line))
        key, value = [part.strip() for part in line.split('=', 1)]
        if not key:
            raise ConfigError('Line %d has no key' % number)
        if key in values:
            raise ConfigError("Duplicate key '%s' in line %d" % (key, number))
        values[key] = value
    return ExperimentConfig(**values)


def load_config(path, **overrides):
    """
    Reads a configuration file. `overrides` replace values from the file.

    :return: ExperimentConfig
    :raise ConfigError: if the file cannot be read or is invalid
    """
    try:
        with open(os.path.expanduser(path), 'r') as stream:
            config = parse_config(stream)
    except (IOError, OSError) as err:
        raise ConfigError('Cannot read configuration %s: %s' % (path, err))
    return config.copied_with(**overrides) if overrides else config


def describe():
    """
Lists all keys with their defaults and ranges, grouped by category.
    """
    lines = []
    category = None
    for value in ExperimentConfig.VALUES:
        if value.category != category:
            category = value.category
            lines.append('# %s' % category)
        admissible = '' if value.minmax is None else ('  # one of %s' % ', '.join(value.minmax) if value.type == 'choice' else '  # in [%s, %s]' % value.minmax)
        lines.append('%s = %s%s' % (value.name, value.initial_value, admissible))
    return '\n'.join(lines)


def worker_count():
    """
    Size of the replication worker pool: `CMDP_WORKERS` if set, else the CPU count; at least 1.

    :raise ConfigError: if `CMDP_WORKERS` is not a positive integer
    """
    text = os.environ.get(WORKERS_VARIABLE)
    if text is None:
        return max(1, multiprocessing.cpu_count())
    try:
        workers = int(text)
    except ValueError:
        raise ConfigError('%s must be a positive integer but is %s' % (WORKERS_VARIABLE, text))
    if workers < 1:
        raise ConfigError('%s must be a positive integer but is %s' % (WORKERS_VARIABLE, text))
    return workers
