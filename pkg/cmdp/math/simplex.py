import logging

import numpy as np
import scipy.linalg

from .lp import LpSolver, LpSolution, NumericalBreakdown, validate, PIVOT_TOL, MAXIMIZE, OPTIMAL, INFEASIBLE, UNBOUNDED


logger = logging.getLogger(__name__)


class RevisedSimplex(LpSolver):

    def __init__(self, pivot_tol=PIVOT_TOL, max_iterations=None, refactor_interval=50):
        """
        Dense two-phase revised simplex method.

        The basis inverse is kept explicitly and updated by elementary row operations after every pivot.
        It is recomputed from scratch every `refactor_interval` pivots and before the solution is reported.
        Entering columns are chosen by most negative reduced cost (Dantzig).
        After a degenerate pivot, the solver switches to Bland's lowest-index rule until the objective moves again,
        which rules out cycling.

        :param pivot_tol: smallest admissible pivot element
        :param max_iterations: total pivot limit over both phases, None for 50 * (rows + columns) + 1000
        :param refactor_interval: pivots between fresh inversions of the basis matrix
        """
        LpSolver.__init__(self, 'Revised simplex', exact_vertices=True, max_variables=None)
        assert pivot_tol > 0, 'invalid pivot_tol: %s' % pivot_tol
        assert refactor_interval >= 1, 'invalid refactor_interval: %s' % refactor_interval
        self.pivot_tol = pivot_tol
        self.max_iterations = max_iterations
        self.refactor_interval = refactor_interval

    def solve(self, problem, feas_tol, opt_tol):
        A, b, c = _standard_form(problem)
        m, n = A.shape
        limit = self.max_iterations if self.max_iterations is not None else 50 * (m + n) + 1000
        # --- Phase 1: minimize the sum of artificial variables ---
        A1 = np.hstack([A, np.eye(m)])
        c1 = np.concatenate([np.zeros(n), np.ones(m)])
        basis = n + np.arange(m)
        B_inv = np.eye(m)
        x_B = b.copy()
        status, B_inv, x_B, iterations = self._iterate(A1, b, c1, basis, B_inv, x_B, opt_tol, feas_tol, 0, limit)
        assert status == OPTIMAL, 'phase 1 cannot be unbounded'
        artificial_sum = float(np.sum(x_B[basis >= n]))
        if artificial_sum > feas_tol:
            logger.debug('Phase 1 ended with artificial sum %g after %d pivots' % (artificial_sum, iterations))
            point = _point(problem, n, basis, x_B)
            return LpSolution(INFEASIBLE, point, float('nan'), validate(problem, point), iterations)
        A, b, basis, B_inv, x_B = self._drive_out_artificials(A, b, basis, B_inv, x_B)
        # --- Phase 2: original objective over the feasible basis ---
        status, B_inv, x_B, iterations = self._iterate(A, b, c, basis, B_inv, x_B, opt_tol, feas_tol, iterations, limit)
        point = _point(problem, n, basis, x_B)
        if status == UNBOUNDED:
            objective = float('inf') if problem.sense == MAXIMIZE else float('-inf')
            return LpSolution(UNBOUNDED, point, objective, validate(problem, point), iterations)
        return LpSolution(OPTIMAL, point, problem.objective(point), validate(problem, point), iterations)

    def _iterate(self, A, b, c, basis, B_inv, x_B, opt_tol, feas_tol, iterations, limit):
        m = A.shape[0]
        bland = False
        since_refactor = 0
        while True:
            y = c[basis].dot(B_inv)
            reduced = c - y.dot(A)
            reduced[basis] = 0
            candidates = np.flatnonzero(reduced < -opt_tol)
            if candidates.size == 0:
                B_inv, x_B = self._refactor(A, b, basis)
                return OPTIMAL, B_inv, x_B, iterations
            if iterations >= limit:
                raise NumericalBreakdown('Revised simplex exceeded %d pivots' % limit)
            entering = candidates[0] if bland else candidates[np.argmin(reduced[candidates])]
            u = B_inv.dot(A[:, entering])
            eligible = u > self.pivot_tol
            if not np.any(eligible):
                if np.any(u > 0):
                    raise NumericalBreakdown('Column %d has only pivots below %g' % (entering, self.pivot_tol))
                return UNBOUNDED, B_inv, x_B, iterations
            ratios = np.full(m, np.inf)
            ratios[eligible] = np.maximum(x_B[eligible], 0) / u[eligible]
            theta = ratios.min()
            ties = np.flatnonzero(ratios <= theta + 1e-12)
            if bland:
                leave = ties[np.argmin(basis[ties])]
            else:
                leave = ties[np.argmax(u[ties])]
            bland = theta <= feas_tol
            x_B = x_B - theta * u
            x_B[leave] = theta
            pivot_row = B_inv[leave] / u[leave]
            B_inv = B_inv - np.outer(u, pivot_row)
            B_inv[leave] = pivot_row
            basis[leave] = entering
            iterations += 1
            since_refactor += 1
            if since_refactor >= self.refactor_interval:
                B_inv, x_B = self._refactor(A, b, basis)
                since_refactor = 0

    def _refactor(self, A, b, basis):
        if basis.size == 0:
            return np.zeros((0, 0)), np.zeros(0)
        try:
            B_inv = scipy.linalg.inv(A[:, basis])
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise NumericalBreakdown('Basis matrix became singular: %s' % exc)
        if not np.all(np.isfinite(B_inv)):
            raise NumericalBreakdown('Basis inverse contains non-finite entries')
        return B_inv, B_inv.dot(b)

    def _drive_out_artificials(self, A, b, basis, B_inv, x_B):
        n = A.shape[1]
        redundant = []
        for r in np.flatnonzero(basis >= n):
            row = B_inv[r].dot(A)
            row[basis[basis < n]] = 0
            candidates = np.flatnonzero(np.abs(row) > self.pivot_tol)
            if candidates.size == 0:
                redundant.append(r)
                continue
            entering = candidates[np.argmax(np.abs(row[candidates]))]
            u = B_inv.dot(A[:, entering])
            theta = x_B[r] / u[r]
            x_B = x_B - theta * u
            x_B[r] = theta
            pivot_row = B_inv[r] / u[r]
            B_inv = B_inv - np.outer(u, pivot_row)
            B_inv[r] = pivot_row
            basis[r] = entering
        if redundant:
            logger.debug('Dropping %d redundant rows' % len(redundant))
            # position r holds the artificial of constraint row basis[r] - n
            rows = np.setdiff1d(np.arange(A.shape[0]), basis[redundant] - n)
            positions = np.setdiff1d(np.arange(basis.size), redundant)
            A, b, basis = A[rows], b[rows], basis[positions]
        B_inv, x_B = self._refactor(A, b, basis)
        return A, b, basis, B_inv, x_B


def _standard_form(problem):
    """
Rewrites `problem` as `min c·y, A y = b, y >= 0, b >= 0` over the shifted variables `y = x - lower` followed by slacks.
    """
    n = problem.variable_count
    lower = problem.lower_bounds
    finite_upper = np.flatnonzero(np.isfinite(problem.upper_bounds))
    upper_rows = np.zeros((finite_upper.size, n))
    upper_rows[np.arange(finite_upper.size), finite_upper] = 1
    rows = np.vstack([problem.A_eq, problem.A_ineq, upper_rows])
    rhs = np.concatenate([problem.b_eq - problem.A_eq.dot(lower),
                          problem.b_ineq - problem.A_ineq.dot(lower),
                          problem.upper_bounds[finite_upper] - lower[finite_upper]])
    slack_signs = np.concatenate([[1.0 if s == '<=' else -1.0 for s in problem.ineq_senses], np.ones(finite_upper.size)])
    m_eq = problem.A_eq.shape[0]
    k = slack_signs.size
    A = np.zeros((rows.shape[0], n + k))
    A[:, :n] = rows
    A[m_eq + np.arange(k), n + np.arange(k)] = slack_signs
    flip = rhs < 0
    A[flip] *= -1
    rhs[flip] *= -1
    c = np.zeros(n + k)
    c[:n] = -problem.objective_coeffs if problem.sense == MAXIMIZE else problem.objective_coeffs
    return A, rhs, c


def _point(problem, n, basis, x_B):
    y = np.zeros(max(n, int(basis.max()) + 1 if basis.size else n))
    y[basis] = np.maximum(x_B, 0)
    return problem.lower_bounds + y[:problem.variable_count]
