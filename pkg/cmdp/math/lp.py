# coding=utf-8
"""
Dense linear programs, their solutions and the solver API.

Every occupancy-measure program in the package is expressed as an `LpProblem` and handed to `solve()`,
which picks a backend the same way for every caller.
"""
import logging
from collections import namedtuple

import numpy as np
import six


logger = logging.getLogger(__name__)


FEAS_TOL = 1e-9
OPT_TOL = 1e-8
PIVOT_TOL = 1e-10

MAXIMIZE = 'maximize'
MINIMIZE = 'minimize'

OPTIMAL = 'optimal'
INFEASIBLE = 'infeasible'
UNBOUNDED = 'unbounded'


class MalformedProblem(ValueError):
    """
Raised when an LpProblem or a candidate point is inconsistent, e.g. ragged rows, NaN coefficients or crossed bounds.
    """


class NumericalBreakdown(ValueError):
    """
Raised when a solver cannot continue in double precision, e.g. only pivots below `PIVOT_TOL` remain or the basis becomes singular.
    """


LpSolution = namedtuple('LpSolution', ['status', 'primal', 'objective_value', 'max_constraint_residual', 'iterations'])


class LpProblem(object):
    """
    Linear program `max/min c·x` subject to equality rows, one-sided inequality rows and variable bounds.

    Rows are stored densely. Inequality senses are '<=' or '>='.
    Lower bounds default to 0, upper bounds to +inf.
    """

    def __init__(self, objective, eq_constraints=(), ineq_constraints=(), lower_bounds=None, upper_bounds=None, sense=MAXIMIZE):
        objective = _as_vector(objective, 'objective')
        n = objective.shape[0]
        eq_rows = [_as_vector(row, 'equality row') for row, _ in eq_constraints]
        eq_rhs = [rhs for _, rhs in eq_constraints]
        ineq_rows = [_as_vector(row, 'inequality row') for row, _, _ in ineq_constraints]
        ineq_rhs = [rhs for _, rhs, _ in ineq_constraints]
        senses = [sense_ for _, _, sense_ in ineq_constraints]
        for row in eq_rows + ineq_rows:
            if row.shape[0] != n:
                raise MalformedProblem('Row width %d does not match %d variables' % (row.shape[0], n))
        self._init_arrays(objective,
                          np.reshape(eq_rows, (len(eq_rows), n)), eq_rhs,
                          np.reshape(ineq_rows, (len(ineq_rows), n)), ineq_rhs, senses,
                          lower_bounds, upper_bounds, sense)

    @staticmethod
    def from_arrays(objective, A_eq=None, b_eq=None, A_ineq=None, b_ineq=None, ineq_senses=None, lower_bounds=None, upper_bounds=None, sense=MAXIMIZE):
        """
Builds a problem from dense matrices, avoiding per-row tuples for the large occupancy programs.
        :param ineq_senses: sequence of '<=' / '>=' or None for all '<='
        :return: LpProblem
        """
        objective = _as_vector(objective, 'objective')
        n = objective.shape[0]
        A_eq = np.zeros((0, n)) if A_eq is None else np.array(A_eq, dtype=np.float64)
        A_ineq = np.zeros((0, n)) if A_ineq is None else np.array(A_ineq, dtype=np.float64)
        b_eq = np.zeros(0) if b_eq is None else b_eq
        b_ineq = np.zeros(0) if b_ineq is None else b_ineq
        if ineq_senses is None:
            ineq_senses = ['<='] * A_ineq.shape[0]
        problem = LpProblem.__new__(LpProblem)
        problem._init_arrays(objective, A_eq, b_eq, A_ineq, b_ineq, ineq_senses, lower_bounds, upper_bounds, sense)
        return problem

    def _init_arrays(self, objective, A_eq, b_eq, A_ineq, b_ineq, senses, lower_bounds, upper_bounds, sense):
        n = objective.shape[0]
        if A_eq.ndim != 2 or A_eq.shape[1] != n or A_ineq.ndim != 2 or A_ineq.shape[1] != n:
            raise MalformedProblem('Constraint matrices must have %d columns, got %s and %s' % (n, A_eq.shape, A_ineq.shape))
        b_eq = np.array(b_eq, dtype=np.float64).reshape(-1)
        b_ineq = np.array(b_ineq, dtype=np.float64).reshape(-1)
        if b_eq.shape[0] != A_eq.shape[0] or b_ineq.shape[0] != A_ineq.shape[0]:
            raise MalformedProblem('Right-hand sides do not match the number of rows')
        senses = tuple(senses)
        if len(senses) != A_ineq.shape[0]:
            raise MalformedProblem('Expected %d inequality senses, got %d' % (A_ineq.shape[0], len(senses)))
        for s in senses:
            if s not in ('<=', '>='):
                raise MalformedProblem("Unknown inequality sense '%s'" % s)
        if not isinstance(sense, six.string_types) or sense not in (MAXIMIZE, MINIMIZE):
            raise MalformedProblem("Objective sense must be '%s' or '%s' but got %s" % (MAXIMIZE, MINIMIZE, sense))
        lower = np.zeros(n) if lower_bounds is None else np.array(lower_bounds, dtype=np.float64).reshape(-1)
        upper = np.full(n, np.inf) if upper_bounds is None else np.array(upper_bounds, dtype=np.float64).reshape(-1)
        if lower.shape[0] != n or upper.shape[0] != n:
            raise MalformedProblem('Bounds must have one entry per variable')
        for name, array in (('objective', objective), ('A_eq', A_eq), ('A_ineq', A_ineq), ('b_eq', b_eq), ('b_ineq', b_ineq), ('lower_bounds', lower)):
            if not np.all(np.isfinite(array)):
                raise MalformedProblem('Non-finite entries in %s' % name)
        if np.any(np.isnan(upper)) or np.any(lower > upper):
            raise MalformedProblem('Bounds must satisfy lower <= upper')
        self.objective_coeffs = objective
        self.A_eq, self.b_eq = A_eq, b_eq
        self.A_ineq, self.b_ineq = A_ineq, b_ineq
        self.ineq_senses = senses
        self.lower_bounds, self.upper_bounds = lower, upper
        self.sense = sense
        for array in (self.objective_coeffs, self.A_eq, self.b_eq, self.A_ineq, self.b_ineq, self.lower_bounds, self.upper_bounds):
            array.flags.writeable = False

    @property
    def variable_count(self):
        return self.objective_coeffs.shape[0]

    @property
    def row_count(self):
        return self.A_eq.shape[0] + self.A_ineq.shape[0]

    @property
    def eq_constraints(self):
        return list(zip(self.A_eq, self.b_eq))

    @property
    def ineq_constraints(self):
        return list(zip(self.A_ineq, self.b_ineq, self.ineq_senses))

    def objective(self, point):
        return float(np.dot(self.objective_coeffs, point))

    def scaled(self, factor):
        """
Returns a copy with the objective multiplied by `factor`.
        """
        return LpProblem.from_arrays(self.objective_coeffs * factor, self.A_eq, self.b_eq, self.A_ineq, self.b_ineq, self.ineq_senses, self.lower_bounds, self.upper_bounds, self.sense)

    def __repr__(self):
        return 'LpProblem(%s, %d variables, %d equalities, %d inequalities)' % (self.sense, self.variable_count, self.A_eq.shape[0], self.A_ineq.shape[0])


def _as_vector(values, name):
    try:
        vector = np.array(values, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise MalformedProblem('Could not read %s: %s' % (name, exc))
    if vector.ndim != 1:
        raise MalformedProblem('%s must be one-dimensional but has shape %s' % (name, vector.shape))
    return vector


def validate(problem, point):
    """
    Measures how far `point` is from satisfying every constraint and bound of `problem`.

    :param problem: LpProblem
    :param point: one value per variable
    :return: maximum violation magnitude, 0 for feasible points
    :rtype: float
    """
    point = np.array(point, dtype=np.float64).reshape(-1)
    if point.shape[0] != problem.variable_count:
        raise MalformedProblem('Point has %d entries but the problem has %d variables' % (point.shape[0], problem.variable_count))
    if not np.all(np.isfinite(point)):
        raise MalformedProblem('Point contains non-finite entries')
    residuals = [0.0]
    if problem.A_eq.shape[0]:
        residuals.append(np.max(np.abs(problem.A_eq.dot(point) - problem.b_eq)))
    if problem.A_ineq.shape[0]:
        lhs = problem.A_ineq.dot(point)
        upper = np.array([s == '<=' for s in problem.ineq_senses])
        excess = np.where(upper, lhs - problem.b_ineq, problem.b_ineq - lhs)
        residuals.append(np.max(excess))
    residuals.append(np.max(problem.lower_bounds - point))
    residuals.append(np.max(point - problem.upper_bounds))
    return float(max(0.0, max(residuals)))


class LpSolver(object):
    """
    Base class for linear program solvers.
    """

    def __init__(self, name, exact_vertices, max_variables):
        """
        :param name: display name
        :param exact_vertices: whether optimal points are basic feasible solutions
        :param max_variables: largest variable count the solver is meant for, None for no limit
        """
        self.name = name
        self.exact_vertices = exact_vertices
        self.max_variables = max_variables

    def solve(self, problem, feas_tol, opt_tol):
        """
        Solves `problem`.

        :param problem: LpProblem, already checked for well-formedness
        :param feas_tol: allowed primal constraint violation
        :param opt_tol: allowed objective deviation from the optimum
        :return: LpSolution
        """
        raise NotImplementedError(self.__class__)

    def __repr__(self):
        return self.name


def solve(problem, feas_tol=FEAS_TOL, opt_tol=OPT_TOL, solver=None):
    """
    Solves a linear program.

    If `status` is 'optimal', the primal point satisfies every constraint within `feas_tol`.
    If `solver` is None, a solver is chosen based on the problem size.

    :param problem: LpProblem
    :param feas_tol: primal feasibility tolerance
    :param opt_tol: optimality tolerance
    :param solver: LpSolver or None
    :return: LpSolution
    """
    assert isinstance(problem, LpProblem), problem
    chosen = solver is None
    if chosen:
        solver = _choose_solver(problem)
    solution = solver.solve(problem, feas_tol, opt_tol)
    if chosen and solution.status == OPTIMAL and solution.max_constraint_residual > feas_tol and not isinstance(solver, _simplex_class()):
        logger.warning('%s residual %g exceeds %g on %s, re-solving with the revised simplex' % (solver, solution.max_constraint_residual, feas_tol, problem))
        solver = _simplex_class()()
        solution = solver.solve(problem, feas_tol, opt_tol)
    if solution.status == OPTIMAL and solution.max_constraint_residual > feas_tol:
        raise NumericalBreakdown('%s returned a point with residual %g > %g for %s' % (solver, solution.max_constraint_residual, feas_tol, problem))
    return solution


SMALL_PROBLEM_VARIABLES = 400
SMALL_PROBLEM_ROWS = 400


def _simplex_class():
    from .simplex import RevisedSimplex
    return RevisedSimplex


def _choose_solver(problem):
    if problem.variable_count <= SMALL_PROBLEM_VARIABLES and problem.row_count <= SMALL_PROBLEM_ROWS:
        return _simplex_class()()
    else:
        from .scipy_lp import SciPyHighs
        return SciPyHighs()


def dump(problem, stream):
    """
    Writes `problem` in the line-oriented debug format.

    The header lines hold sense, objective and bounds; every following line is one constraint `<coeffs...> <sense> <rhs>`.

    :param problem: LpProblem
    :param stream: writable text stream
    """
    stream.write('sense %s\n' % problem.sense)
    stream.write('objective %s\n' % _format_row(problem.objective_coeffs))
    stream.write('lower %s\n' % _format_row(problem.lower_bounds))
    stream.write('upper %s\n' % _format_row(problem.upper_bounds))
    for row, rhs in problem.eq_constraints:
        stream.write('%s = %s\n' % (_format_row(row), _format_number(rhs)))
    for row, rhs, sense in problem.ineq_constraints:
        stream.write('%s %s %s\n' % (_format_row(row), sense, _format_number(rhs)))


def load(stream):
    """
    Reads a problem written by `dump()`.

    :param stream: readable text stream
    :return: LpProblem
    """
    header = {}
    eq_constraints, ineq_constraints = [], []
    for line in stream:
        tokens = line.split()
        if not tokens or tokens[0].startswith('#'):
            continue
        if tokens[0] in ('sense', 'objective', 'lower', 'upper'):
            header[tokens[0]] = tokens[1] if tokens[0] == 'sense' else [float(t) for t in tokens[1:]]
        elif tokens[-2] == '=':
            eq_constraints.append(([float(t) for t in tokens[:-2]], float(tokens[-1])))
        elif tokens[-2] in ('<=', '>='):
            ineq_constraints.append(([float(t) for t in tokens[:-2]], float(tokens[-1]), tokens[-2]))
        else:
            raise MalformedProblem('Cannot parse line: %s' % line.strip())
    if 'objective' not in header:
        raise MalformedProblem('Missing objective line')
    return LpProblem(header['objective'], eq_constraints, ineq_constraints, header.get('lower'), header.get('upper'), header.get('sense', MAXIMIZE))


def _format_number(value):
    return '%.17g' % value


def _format_row(row):
    return ' '.join(_format_number(v) for v in row)
