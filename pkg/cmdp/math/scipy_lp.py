import numpy as np
from scipy.optimize import linprog

from .lp import LpSolver, LpSolution, NumericalBreakdown, validate, MAXIMIZE, OPTIMAL, INFEASIBLE, UNBOUNDED


class SciPyHighs(LpSolver):

    def __init__(self, method='highs-ds', time_limit=None):
        """
        Solves linear programs with the HiGHS solvers shipped with SciPy (scipy.optimize.linprog).
        The default dual simplex variant returns vertex solutions like the revised simplex.

        :param method: 'highs-ds', 'highs-ipm' or 'highs'
        :param time_limit: seconds or None
        """
        LpSolver.__init__(self, 'SciPy HiGHS (%s)' % method, exact_vertices=method != 'highs-ipm', max_variables=None)
        assert method in ('highs', 'highs-ds', 'highs-ipm'), 'unsupported method: %s' % method
        self.method = method
        self.time_limit = time_limit

    def solve(self, problem, feas_tol, opt_tol):
        c = -problem.objective_coeffs if problem.sense == MAXIMIZE else problem.objective_coeffs
        signs = np.array([1.0 if s == '<=' else -1.0 for s in problem.ineq_senses])
        A_ub = problem.A_ineq * signs[:, None] if signs.size else None
        b_ub = problem.b_ineq * signs if signs.size else None
        A_eq = problem.A_eq if problem.A_eq.shape[0] else None
        b_eq = problem.b_eq if problem.A_eq.shape[0] else None
        upper = [None if np.isinf(u) else u for u in problem.upper_bounds]
        bounds = list(zip(problem.lower_bounds, upper))
        options = {
            'primal_feasibility_tolerance': float(np.clip(feas_tol * 0.1, 1e-10, 1e-7)),
            'dual_feasibility_tolerance': float(np.clip(opt_tol * 0.1, 1e-10, 1e-7)),
        }
        if self.time_limit is not None:
            options['time_limit'] = self.time_limit
        result = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method=self.method, options=options)
        iterations = int(getattr(result, 'nit', 0) or 0)
        if result.status == 2:
            point = np.clip(np.zeros(problem.variable_count), problem.lower_bounds, problem.upper_bounds)
            return LpSolution(INFEASIBLE, point, float('nan'), validate(problem, point), iterations)
        if result.status == 3:
            point = np.clip(np.zeros(problem.variable_count), problem.lower_bounds, problem.upper_bounds)
            objective = float('inf') if problem.sense == MAXIMIZE else float('-inf')
            return LpSolution(UNBOUNDED, point, objective, validate(problem, point), iterations)
        if result.status != 0 or result.x is None:
            raise NumericalBreakdown('%s failed with status %d: %s' % (self.name, result.status, result.message))
        point = np.clip(result.x, problem.lower_bounds, problem.upper_bounds)
        return LpSolution(OPTIMAL, point, problem.objective(point), validate(problem, point), iterations)
