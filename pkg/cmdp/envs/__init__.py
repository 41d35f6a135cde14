from .environment import Environment, ConfigInvalid
from .queue import QueueConfig, build_queue
from .random_cmdp import random_ergodic_cmdp
from .chain import weakly_communicating_chain
