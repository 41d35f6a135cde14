import os
import shutil
import tempfile
from unittest import TestCase
from os.path import isfile

import numpy as np
from six import StringIO

from cmdp.data.cmdpformat import write_cmdp, read_cmdp, FormatError
from cmdp.data.scene import Scene, slugify, write_csv
from cmdp.envs import build_queue, random_ergodic_cmdp
from cmdp.model.cmdp import InvalidCmdp


def _written(cmdp):
    stream = StringIO()
    write_cmdp(cmdp, stream)
    return stream.getvalue()


class TestCmdpFormat(TestCase):

    def assert_same_model(self, loaded, cmdp):
        np.testing.assert_array_equal(loaded.reward, cmdp.reward)
        np.testing.assert_array_equal(loaded.costs, cmdp.costs)
        np.testing.assert_array_equal(loaded.transition, cmdp.transition)
        np.testing.assert_array_equal(loaded.initial_distribution, cmdp.initial_distribution)
        np.testing.assert_array_equal(loaded.cost_scales, cmdp.cost_scales)
        self.assertEqual(loaded.reward_scale, cmdp.reward_scale)
        self.assertEqual(loaded.channel_names, cmdp.channel_names)
        self.assertEqual(loaded.name, cmdp.name)

    def test_bit_exact(self):
        rng = np.random.default_rng(0)
        for cmdp in (random_ergodic_cmdp(4, 3, 2, rng), build_queue(), random_ergodic_cmdp(2, 2, 0, rng)):
            self.assert_same_model(read_cmdp(StringIO(_written(cmdp))), cmdp)

    def test_file_path(self):
        directory = tempfile.mkdtemp()
        try:
            path = os.path.join(directory, 'queue.cmdp')
            write_cmdp(build_queue(), path)
            self.assertTrue(isfile(path))
            self.assert_same_model(read_cmdp(path), build_queue())
        finally:
            shutil.rmtree(directory)

    def test_layout(self):
        lines = _written(build_queue()).splitlines()
        self.assertEqual(lines[:3], ['cmdp queue', 'states 6', 'actions 16'])
        self.assertEqual(lines[3], 'channels service flow')
        self.assertEqual(lines[6], 'reward')
        self.assertEqual(len(lines), 6 + 1 + 6 + 2 * 7 + 1 + 96)

    def test_comments_and_blank_lines(self):
        text = '# written by hand\n\n' + _written(build_queue()).replace('reward\n', 'reward\n\n')
        self.assert_same_model(read_cmdp(StringIO(text)), build_queue())

    def test_truncated(self):
        text = _written(build_queue())
        self.assertRaises(FormatError, read_cmdp, StringIO('\n'.join(text.splitlines()[:-3])))
        self.assertRaises(FormatError, read_cmdp, StringIO(text.split('transition')[0]))

    def test_malformed(self):
        text = _written(random_ergodic_cmdp(2, 2, 1, np.random.default_rng(1)))
        self.assertRaises(FormatError, read_cmdp, StringIO(text.replace('states 2', 'states two')))
        self.assertRaises(FormatError, read_cmdp, StringIO(text.replace('actions 2\n', '')))
        self.assertRaises(FormatError, read_cmdp, StringIO(text + '0.5 0.5\n'))
        self.assertRaises(FormatError, read_cmdp, StringIO(text.replace('cost c1', 'cost c2')))
        reward_line = text.splitlines()[7]
        self.assertRaises(FormatError, read_cmdp, StringIO(text.replace(reward_line, reward_line + ' 0.1')))
        self.assertRaises(FormatError, read_cmdp, StringIO(text.replace(reward_line, 'x y')))
        scales = [line for line in text.splitlines() if line.startswith('scales')][0]
        self.assertRaises(FormatError, read_cmdp, StringIO(text.replace(scales, 'scales 1')))

    def test_invalid_tables(self):
        text = _written(random_ergodic_cmdp(2, 1, 0, np.random.default_rng(2)))
        lines = text.splitlines()
        lines[-1] = '0.7 0.7'
        self.assertRaises(InvalidCmdp, read_cmdp, StringIO('\n'.join(lines)))


class TestScene(TestCase):

    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def test_slugify(self):
        self.assertEqual(slugify('Queue C-UCRL run'), 'queue_c_ucrl_run')
        self.assertEqual(slugify('k=1.0'), 'k1.0')

    def test_create(self):
        scene = Scene.create(self.directory, 'My Run', 2)
        self.assertTrue(scene.path.endswith(os.path.join('my_run', 'rep_000002')))
        self.assertTrue(os.path.isdir(scene.path))
        self.assertEqual((scene.category, scene.index), ('my_run', 2))
        self.assertFalse(os.path.isdir(Scene.create(self.directory, 'later', 0, mkdir=False).path))

    def test_properties(self):
        scene = Scene.create(self.directory, 'props', 0)
        scene.properties = {'seed': 3, 'status': 'ok', 'final': {'R': 1.5}}
        reloaded = Scene(self.directory, 'props', 0)
        self.assertEqual(reloaded.properties, {'seed': 3, 'status': 'ok', 'final': {'R': 1.5}})
        with open(scene.subpath('description.json')) as stream:
            self.assertEqual(stream.readline(), '{\n')

    def test_csv(self):
        scene = Scene.create(self.directory, 'csv', 1)
        path = scene.write_csv('ledger.csv', ['t', 'R', 'status'], [(1, 0.1, 'ok'), {'t': 2, 'R': 1. / 3}])
        self.assertEqual(path, scene.subpath('ledger.csv'))
        with open(path) as stream:
            lines = stream.read().splitlines()
        self.assertEqual(lines, ['t,R,status', '1,0.10000000000000001,ok', '2,0.33333333333333331,'])
        self.assertEqual(float(lines[2].split(',')[1]), 1. / 3)

    def test_write_csv_types(self):
        path = os.path.join(self.directory, 'types.csv')
        write_csv(path, ['a', 'b', 'c'], [(np.int64(4), np.float64(2.5), True)])
        with open(path) as stream:
            self.assertEqual(stream.read(), 'a,b,c\n4,2.5,True\n')
