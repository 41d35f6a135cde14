import itertools
from unittest import TestCase

import numpy as np
from six import StringIO

from cmdp.math.lp import LpProblem, solve, validate, dump, load, MalformedProblem, NumericalBreakdown, OPTIMAL, INFEASIBLE, UNBOUNDED, MINIMIZE
from cmdp.math.simplex import RevisedSimplex
from cmdp.math.scipy_lp import SciPyHighs


SOLVERS = (RevisedSimplex(), SciPyHighs())


def _random_problem(rng, n, m):
    A = rng.uniform(0.1, 2.0, size=(m, n))
    b = rng.uniform(1.0, 5.0, size=m)
    c = rng.uniform(-1.0, 2.0, size=n)
    return A, b, c


def _enumerate_vertices(A, b, c):
    """
Best objective over all basic feasible solutions of max c·x, A x <= b, x >= 0.
    """
    m, n = A.shape
    standard = np.hstack([A, np.eye(m)])
    costs = np.concatenate([c, np.zeros(m)])
    best = -np.inf
    for basis in itertools.combinations(range(n + m), m):
        B = standard[:, basis]
        if abs(np.linalg.det(B)) < 1e-12:
            continue
        x_B = np.linalg.solve(B, b)
        if np.any(x_B < -1e-12):
            continue
        best = max(best, costs[list(basis)].dot(x_B))
    return best


class TestLp(TestCase):

    def test_vertex_forced(self):
        problem = LpProblem([1, 0], eq_constraints=[([1, 1], 1)])
        for solver in SOLVERS:
            solution = solve(problem, solver=solver)
            self.assertEqual(solution.status, OPTIMAL)
            np.testing.assert_allclose(solution.primal, [1, 0], atol=1e-9)
            self.assertAlmostEqual(solution.objective_value, 1, delta=1e-8)

    def test_two_active_constraints(self):
        problem = LpProblem([3, 2], ineq_constraints=[([1, 1], 4, '<='), ([1, 0], 2, '<=')])
        for solver in SOLVERS:
            solution = solve(problem, solver=solver)
            self.assertEqual(solution.status, OPTIMAL)
            np.testing.assert_allclose(solution.primal, [2, 2], atol=1e-9)
            self.assertAlmostEqual(solution.objective_value, 10, delta=1e-8)

    def test_infeasible(self):
        problem = LpProblem([1], ineq_constraints=[([1], -1, '<=')])
        for solver in SOLVERS:
            self.assertEqual(solve(problem, solver=solver).status, INFEASIBLE)

    def test_unbounded(self):
        problem = LpProblem([1, 1], ineq_constraints=[([1, -1], 1, '<=')])
        for solver in SOLVERS:
            self.assertEqual(solve(problem, solver=solver).status, UNBOUNDED)

    def test_minimize_with_bounds(self):
        problem = LpProblem([1, 2], ineq_constraints=[([1, 1], 3, '>=')], lower_bounds=[0, 0.5], upper_bounds=[2, 10], sense=MINIMIZE)
        for solver in SOLVERS:
            solution = solve(problem, solver=solver)
            self.assertEqual(solution.status, OPTIMAL)
            np.testing.assert_allclose(solution.primal, [2, 1], atol=1e-9)
            self.assertAlmostEqual(solution.objective_value, 4, delta=1e-8)

    def test_redundant_equalities(self):
        problem = LpProblem([1, 1, 0], eq_constraints=[([1, 1, 1], 1), ([2, 2, 2], 2)], ineq_constraints=[([0, 1, 0], 0.25, '<=')])
        solution = solve(problem, solver=RevisedSimplex())
        self.assertEqual(solution.status, OPTIMAL)
        self.assertAlmostEqual(solution.objective_value, 1, delta=1e-9)
        self.assertLessEqual(validate(problem, solution.primal), 1e-9)

    def test_redundant_row_off_its_position(self):
        # row 2 is the sum of rows 0 and 1; its artificial sits at basis position 0
        A = np.array([[1., 1, 0], [0, 1, 1], [1, 2, 1]])
        b = np.array([1., 1, 2])
        basis = np.array([5, 0, 1])
        B_inv = np.linalg.inv(np.hstack([A, np.eye(3)])[:, basis])
        x_B = B_inv.dot(b)
        np.testing.assert_allclose(x_B, [0, 0, 1], atol=1e-12)
        A, b, basis, B_inv, x_B = RevisedSimplex()._drive_out_artificials(A, b, basis, B_inv, x_B)
        np.testing.assert_array_equal(A, [[1, 1, 0], [0, 1, 1]])
        np.testing.assert_array_equal(b, [1, 1])
        np.testing.assert_array_equal(basis, [0, 1])
        np.testing.assert_allclose(x_B, [0, 1], atol=1e-12)

    def test_redundant_rows_agree_with_highs(self):
        # the last equality row is the sum of the first two
        rng = np.random.default_rng(7)
        for _ in range(20):
            c = rng.uniform(-1, 1, size=6)
            A = rng.uniform(0, 1, size=(3, 6))
            A[2] = A[0] + A[1]
            b = A.dot(rng.uniform(0, 1, size=6))
            problem = LpProblem.from_arrays(c, A_eq=A, b_eq=b, A_ineq=np.eye(6), b_ineq=np.ones(6))
            simplex = solve(problem, solver=RevisedSimplex())
            highs = solve(problem, solver=SciPyHighs())
            self.assertEqual(simplex.status, OPTIMAL)
            self.assertAlmostEqual(simplex.objective_value, highs.objective_value, delta=1e-8)
            self.assertLessEqual(validate(problem, simplex.primal), 1e-9)

    def test_brute_force_oracle(self):
        rng = np.random.default_rng(1234)
        for _ in range(200):
            n, m = rng.integers(2, 9), rng.integers(1, 6)
            A, b, c = _random_problem(rng, n, m)
            problem = LpProblem.from_arrays(c, A_ineq=A, b_ineq=b)
            expected = _enumerate_vertices(A, b, c)
            solution = solve(problem, solver=RevisedSimplex())
            self.assertEqual(solution.status, OPTIMAL)
            self.assertAlmostEqual(solution.objective_value, expected, delta=1e-8)
            self.assertLessEqual(validate(problem, solution.primal), 1e-9)

    def test_degenerate_cycling_example(self):
        # Beale's example cycles under the plain largest-coefficient rule
        c = [0.75, -150, 0.02, -6]
        A = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
        problem = LpProblem.from_arrays(c, A_ineq=A, b_ineq=[0, 0, 1])
        solution = solve(problem, solver=RevisedSimplex())
        self.assertEqual(solution.status, OPTIMAL)
        self.assertAlmostEqual(solution.objective_value, 0.05, delta=1e-8)

    def test_validate(self):
        problem = LpProblem([1, 0], eq_constraints=[([1, 1], 1)])
        self.assertEqual(validate(problem, [0.5, 0.5]), 0)
        self.assertAlmostEqual(validate(problem, [1, 1]), 1)
        self.assertAlmostEqual(validate(problem, [1.5, -0.5]), 0.5)
        self.assertRaises(MalformedProblem, validate, problem, [1, 1, 1])

    def test_malformed(self):
        self.assertRaises(MalformedProblem, LpProblem, [1, 2], [([1], 1)])
        self.assertRaises(MalformedProblem, LpProblem, [1, np.nan])
        self.assertRaises(MalformedProblem, LpProblem, [1], lower_bounds=[2], upper_bounds=[1])
        self.assertRaises(MalformedProblem, LpProblem, [1], ineq_constraints=[([1], 1, '<')])
        self.assertRaises(MalformedProblem, LpProblem, [1], sense='max')

    def test_problem_is_immutable(self):
        objective = np.array([1.0, 2.0])
        problem = LpProblem(objective)
        objective[0] = 5
        self.assertEqual(problem.objective_coeffs[0], 1)
        self.assertFalse(problem.objective_coeffs.flags.writeable)

    def test_scaling_keeps_argmax(self):
        rng = np.random.default_rng(7)
        A, b, c = _random_problem(rng, 6, 4)
        problem = LpProblem.from_arrays(c, A_ineq=A, b_ineq=b)
        base = solve(problem, solver=RevisedSimplex())
        scaled = solve(problem.scaled(37.5), solver=RevisedSimplex())
        np.testing.assert_allclose(scaled.primal, base.primal, atol=1e-9)
        self.assertAlmostEqual(scaled.objective_value, 37.5 * base.objective_value, delta=1e-6)

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        A, b, c = _random_problem(rng, 8, 5)
        problem = LpProblem.from_arrays(c, A_ineq=A, b_ineq=b)
        first = solve(problem, solver=RevisedSimplex())
        second = solve(LpProblem.from_arrays(c, A_ineq=A, b_ineq=b), solver=RevisedSimplex())
        np.testing.assert_array_equal(first.primal, second.primal)
        self.assertEqual(first.iterations, second.iterations)

    def test_solvers_agree(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            A, b, c = _random_problem(rng, 7, 4)
            problem = LpProblem.from_arrays(c, A_ineq=A, b_ineq=b)
            objectives = [solve(problem, solver=solver).objective_value for solver in SOLVERS]
            self.assertAlmostEqual(objectives[0], objectives[1], delta=1e-7)

    def test_iteration_limit(self):
        problem = LpProblem([3, 2], ineq_constraints=[([1, 1], 4, '<='), ([1, 0], 2, '<=')])
        self.assertRaises(NumericalBreakdown, solve, problem, solver=RevisedSimplex(max_iterations=1))

    def test_dump_load(self):
        problem = LpProblem([1.0 / 3, -2], eq_constraints=[([1, 1], 1)], ineq_constraints=[([0.1, 0], 0.7, '>=')], upper_bounds=[np.inf, 4])
        stream = StringIO()
        dump(problem, stream)
        self.assertIn('>= 0.69999999999999996', stream.getvalue())
        loaded = load(StringIO(stream.getvalue()))
        np.testing.assert_array_equal(loaded.objective_coeffs, problem.objective_coeffs)
        np.testing.assert_array_equal(loaded.A_eq, problem.A_eq)
        np.testing.assert_array_equal(loaded.A_ineq, problem.A_ineq)
        np.testing.assert_array_equal(loaded.upper_bounds, problem.upper_bounds)
        self.assertEqual(loaded.ineq_senses, problem.ineq_senses)
        self.assertEqual(loaded.sense, problem.sense)
