from .learner import Learner
from .model_based import ModelBasedLearner
from .policy_gradient import PolicyGradientLearner, run_policy_gradient
from .fha import FiniteHorizonLearner, fha_run
