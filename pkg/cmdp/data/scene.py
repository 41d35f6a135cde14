# coding=utf-8
import csv
import json
import os
import re
from os.path import join, isfile, isdir

import six
import numpy as np


def slugify(value):
    """
Normalizes a string: lower case, characters other than letters, digits, '_', '.', '-' and whitespace are dropped and runs of '-' and whitespace become '_'.
    """
    value = re.sub(r'[^\w\s.-]', '', six.text_type(value)).strip().lower()
    return re.sub(r'[-\s]+', '_', value)


def format_value(value):
    if isinstance(value, six.string_types):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return '%d' % value
    return '%.17g' % value


def write_csv(path, columns, rows):
    """
    Writes a header row followed by `rows`. Floats use 17 significant digits.

    :param path: target file
    :param columns: column names
    :param rows: sequence of tuples or dicts keyed by column name
    """
    with open(path, 'w') as stream:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            if isinstance(row, dict):
                row = [row.get(column, '') for column in columns]
            writer.writerow([format_value(v) for v in row])


class Scene(object):

    def __init__(self, dir, category, index):
        """
        One replication directory `dir/category/rep_<index>` holding its CSV files and `description.json`.

        :param dir: output directory
        :param category: experiment name
        :param index: replication index
        """
        self.dir = dir
        self.category = category
        self.index = index
        self._properties = None

    @property
    def path(self):
        return join(self.dir, self.category, 'rep_%06d' % self.index)

    def subpath(self, name, create=False):
        path = join(self.path, name)
        if create and not isdir(path):
            os.makedirs(path)
        return path

    def _init_properties(self):
        if self._properties is not None:
            return
        dfile = join(self.path, 'description.json')
        if isfile(dfile):
            with open(dfile, 'r') as stream:
                self._properties = json.load(stream)
        else:
            self._properties = {}

    @property
    def properties(self):
        self._init_properties()
        return self._properties

    @properties.setter
    def properties(self, dict):
        self._properties = dict
        self._write_properties()

    def _write_properties(self):
        with open(join(self.path, 'description.json'), 'w') as out:
            json.dump(self._properties, out, indent=2, sort_keys=True)

    def write_csv(self, name, columns, rows):
        path = self.subpath(name)
        write_csv(path, columns, rows)
        return path

    def mkdir(self):
        isdir(self.path) or os.makedirs(self.path)

    def __str__(self):
        return self.path

    def __repr__(self):
        return self.path

    @staticmethod
    def create(directory, category, index, mkdir=True):
        """
        Returns the scene of replication `index`. Existing files of an earlier run in that directory are overwritten.
        """
        directory = os.path.expanduser(directory)
        scene = Scene(directory, slugify(category), index)
        if mkdir:
            scene.mkdir()
        return scene

