import six


class ConfigValue(object):

    def __init__(self, name, type, initial_value, category, minmax):
        """
        Typed configuration entry with a default and an admissible range.

        :param name: key in the configuration file
        :param type: 'int', 'float', 'bool', 'text' or 'choice'
        :param initial_value: default
        :param category: grouping shown in `describe()`, e.g. the algorithm the key applies to
        :param minmax: (min, max) for numbers, tuple of admissible values for choices, None otherwise
        """
        self.name = name
        self.type = type
        self.initial_value = initial_value
        self.category = category
        self.minmax = minmax

    @property
    def min_value(self):
        return self.minmax[0]

    @property
    def max_value(self):
        return self.minmax[1]

    def parse(self, text):
        """
        Converts the text of a configuration line to this value's type.

        :raise ValueError: if the text cannot be converted or lies outside the admissible range
        """
        raise NotImplementedError(self.__class__)

    def check(self, value):
        if self.minmax is not None and not self.min_value <= value <= self.max_value:
            raise ValueError('%s=%s lies outside [%s, %s]' % (self.name, value, self.min_value, self.max_value))
        return value

    @staticmethod
    def value(value_or_config_value):
        if isinstance(value_or_config_value, ConfigValue):
            return value_or_config_value.initial_value
        else:
            return value_or_config_value

    def __repr__(self):
        return '%s = %s' % (self.name, self.initial_value)


class ConfigFloat(ConfigValue):

    def __init__(self, name, initial_value, minmax=None, category=None):
        if minmax is not None:
            assert len(minmax) == 2, 'minmax must be pair (min, max)'
            minmax = (float(minmax[0]), float(minmax[1]))
        ConfigValue.__init__(self, name, 'float', float(initial_value), category, minmax)

    def parse(self, text):
        return self.check(float(text))


class ConfigInt(ConfigValue):

    def __init__(self, name, initial_value, minmax=None, category=None):
        if minmax is not None:
            assert len(minmax) == 2, 'minmax must be pair (min, max)'
        ConfigValue.__init__(self, name, 'int', initial_value, category, minmax)

    def parse(self, text):
        try:
            value = int(text)
        except ValueError:
            value = float(text)  # 1e5
            if value != int(value):
                raise ValueError('%s must be an integer but got %s' % (self.name, text))
        return self.check(int(value))


class ConfigBool(ConfigValue):

    def __init__(self, name, initial_value, category=None):
        ConfigValue.__init__(self, name, 'bool', initial_value, category, None)

    def parse(self, text):
        lowered = text.strip().lower()
        if lowered in ('1', 'true', 'yes', 'on'):
            return True
        if lowered in ('0', 'false', 'no', 'off'):
            return False
        raise ValueError('%s must be true or false but got %s' % (self.name, text))


class ConfigString(ConfigValue):

    def __init__(self, name, initial_value, category=None):
        ConfigValue.__init__(self, name, 'text', initial_value, category, None)

    def parse(self, text):
        assert isinstance(text, six.string_types)
        return text.strip()


class ConfigChoice(ConfigValue):

    def __init__(self, name, initial_value, choices, category=None):
        assert initial_value in choices, '%s is not one of %s' % (initial_value, choices)
        ConfigValue.__init__(self, name, 'choice', initial_value, category, tuple(choices))

    @property
    def choices(self):
        return self.minmax

    def parse(self, text):
        text = text.strip()
        if text not in self.choices:
            raise ValueError('%s must be one of %s but got %s' % (self.name, ', '.join(self.choices), text))
        return text

    def check(self, value):
        if value not in self.choices:
            raise ValueError('%s must be one of %s but got %s' % (self.name, ', '.join(self.choices), value))
        return value
