"""
Module FemSolution: discrete solutions, the linear solve and H1-seminorm errors
"""

from dataclasses import dataclass, field
import numpy as np
from circumradiusfem.Fem import Assembly
from circumradiusfem.Fem.Assembly import LagrangeSpace, SparseSystem
from circumradiusfem.Fem.ConjugateGradient import DEFAULT_TOLERANCE, conjugate_gradient
from circumradiusfem.Fem.Poisson import PoissonProblemBase
from circumradiusfem.Mesh.AnisoMesh import TriMesh
from circumradiusfem.Quadrature.QuadratureRule import rule_for_degree
import logging.config
# Load logging configuration from file
logger = logging.getLogger(__name__)

ERROR_QUADRATURE_DEGREE = 8


@dataclass(frozen=True, eq=False)
class FemSolution:
    space: LagrangeSpace
    coefficients: np.ndarray = field(repr=False)  # Values at the global Lagrange nodes
    iterations: int = 0
    residual: float = 0.0

    @property
    def order(self) -> int:
        return self.space.order

    @property
    def mesh(self) -> TriMesh:
        return self.space.mesh

    def __call__(self, element: int, points: np.ndarray) -> np.ndarray:
        """Values on one element at reference points of shape (n, 2)"""
        basis = Assembly.reference_basis(self.order, points)
        return basis @ self.coefficients[self.space.element_dofs[element]]


def solve(system: SparseSystem, tol: float = DEFAULT_TOLERANCE, max_iterations: int | None = None) -> FemSolution:
    """
    Solve the reduced system with Jacobi-preconditioned CG
    :param system: Assembled system
    :param tol: Relative residual target of CG
    :param max_iterations: Iteration cap, if None, use 10 times the number of free nodes
    :raises ConvergenceError: If CG hits the iteration cap
    """
    matrix, rhs = system.reduced()
    logger.info(f"Solving reduced system with {rhs.shape[0]} unknowns ...")
    result = conjugate_gradient(matrix, rhs, tol=tol, max_iterations=max_iterations)
    coefficients = system.values.copy()
    coefficients[~system.constrained] = result.solution
    return FemSolution(
        space=system.space,
        coefficients=coefficients,
        iterations=result.iterations,
        residual=result.residual,
    )


def interpolate_exact(space: LagrangeSpace, problem: PoissonProblemBase) -> FemSolution:
    """Nodal interpolant I_h u of the exact solution"""
    return FemSolution(space=space, coefficients=problem.exact(space.nodes[:, 0], space.nodes[:, 1]))


def _element_blocks(n_elements: int):
    for start in range(0, n_elements, Assembly.CHUNK_SIZE):
        yield np.arange(start, min(start + Assembly.CHUNK_SIZE, n_elements))


def _gradient_products(
        solution: FemSolution,
        problem: PoissonProblemBase,
        test_coefficients: np.ndarray | None,
        degree: int,
) -> float:
    """Sum over elements of int_K grad(u - u_h) . w with w = grad(u - u_h), or grad(v_h) for given test coefficients"""
    space = solution.space
    rule = rule_for_degree(degree)
    ref_gradients = Assembly.reference_gradients(space.order, rule.points)
    total = 0.0
    for elements in _element_blocks(space.mesh.n_elements):
        vertices = space.mesh.vertices[space.mesh.triangles[elements]]
        geometry = Assembly.element_geometry(vertices)
        grads = geometry.gradients(ref_gradients)  # (m, n, nb, 2)
        dofs = space.element_dofs[elements]
        discrete = np.einsum('enbi,eb->eni', grads, solution.coefficients[dofs])
        points = geometry.map_points(rule.points)
        ux, uy = problem.gradient(points[..., 0], points[..., 1])
        difference = np.stack([ux, uy], axis=-1) - discrete
        other = difference if test_coefficients is None else np.einsum('enbi,eb->eni', grads, test_coefficients[dofs])
        weights = 0.5 * np.abs(geometry.determinants)[:, None] * rule.weights[None, :]
        total += float(np.einsum('en,eni,eni->', weights, difference, other))
    return total


def h1_error(solution: FemSolution, problem: PoissonProblemBase, degree: int = ERROR_QUADRATURE_DEGREE) -> float:
    """
    |u - u_h|_{1,2,Omega} with the exact gradient of the problem
    :param degree: Quadrature degree per element, at least 8
    """
    if degree < ERROR_QUADRATURE_DEGREE:
        raise ValueError(f"Error quadrature degree must be at least {ERROR_QUADRATURE_DEGREE}, got '{degree}'")
    return float(np.sqrt(max(_gradient_products(solution, problem, None, degree), 0.0)))


def galerkin_orthogonality_residual(
        solution: FemSolution,
        problem: PoissonProblemBase,
        test_coefficients: np.ndarray,
        degree: int = ERROR_QUADRATURE_DEGREE,
) -> float:
    """
    (grad(u - u_h), grad(v_h)) for a discrete v_h vanishing on the boundary
    :param test_coefficients: Nodal values of v_h, zero on boundary nodes
    """
    test_coefficients = np.asarray(test_coefficients, dtype=float)
    if test_coefficients.shape != (solution.space.n_dofs,):
        raise ValueError(f"Expected {solution.space.n_dofs} test coefficients, got shape {test_coefficients.shape}")
    if np.any(test_coefficients[solution.space.boundary] != 0.0):
        raise ValueError("Test function must vanish on the boundary")
    return _gradient_products(solution, problem, test_coefficients, degree)


def h1_seminorm(space: LagrangeSpace, coefficients: np.ndarray) -> float:
    """|v_h|_{1,2,Omega} of a discrete function, exact through the stiffness matrices"""
    vertices = space.mesh.vertices[space.mesh.triangles]
    stiffness = Assembly.element_stiffness(vertices, space.order)
    local = np.asarray(coefficients, dtype=float)[space.element_dofs]
    return float(np.sqrt(max(np.einsum('ea,eab,eb->', local, stiffness, local), 0.0)))
