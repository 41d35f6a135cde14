# pylint: disable-msg = wildcard-import, unused-wildcard-import, unused-import

from .math.lp import *
from .math.simplex import RevisedSimplex
from .math.scipy_lp import SciPyHighs
from .math.markov import NotErgodic, MixingCap, check_stochastic, communicating_classes, recurrent_classes, period, is_unichain, is_ergodic, \
    distance_to_stationarity, span
from .math.markov import mixing_time as chain_mixing_time, hitting_time as chain_hitting_time  # policy-level versions come from evaluation

from .model.cmdp import *
from .model.evaluation import *

from .programs.occupancy import *
from .programs.optimistic import *
from .programs.finite_horizon import *

from .envs.environment import *
from .envs.queue import *
from .envs.random_cmdp import *
from .envs.chain import *

from .learn.learner import *
from .learn.model_based import *
from .learn.policy_gradient import *
from .learn.fha import *

from .data.cmdpformat import *
from .data.scene import Scene

from .app import *

import numpy

np = numpy
