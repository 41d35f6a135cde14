from .cmdp import TabularCmdp, StationaryPolicy, ShapeMismatch, InvalidCmdp
from .evaluation import PolicyEvaluation, evaluate_policy, NotErgodic, SingularSystem, MixingCap
