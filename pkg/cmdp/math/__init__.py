from .lp import LpProblem, LpSolution, LpSolver, solve, validate, MalformedProblem, NumericalBreakdown
from .simplex import RevisedSimplex
from .scipy_lp import SciPyHighs
