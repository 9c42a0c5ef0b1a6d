import numpy as np
import pytest
import scipy.sparse as sp

from circumradiusfem.Base.Errors import ConvergenceError
from circumradiusfem.Fem.Assembly import (
    assemble,
    element_stiffness,
    lagrange_space,
    reference_basis,
    reference_gradients,
)
from circumradiusfem.Fem.ConjugateGradient import conjugate_gradient
from circumradiusfem.Fem.FemSolution import (
    galerkin_orthogonality_residual,
    h1_error,
    h1_seminorm,
    interpolate_exact,
    solve,
)
from circumradiusfem.Fem.Poisson import CylinderProblem, PolynomialProblem, consistency_check
from circumradiusfem.Mesh.AnisoMesh import PATTERNS, build_aniso_mesh
from circumradiusfem.Quadrature.Polynomial import BivariatePolynomial

X = BivariatePolynomial.x()
Y = BivariatePolynomial.y()
REFERENCE = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
P2_NODES = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.5, 0.0], [0.5, 0.5], [0.0, 0.5]])


# {{{ problems

def test_cylinder_consistency():
    result = consistency_check(CylinderProblem(), samples=100)
    assert result['pde_residual'] <= 1e-10
    assert result['boundary_residual'] <= 1e-10
    assert result['gradient_residual'] <= 1e-5
    assert result['laplacian_residual'] <= 1e-4


def test_cylinder_values():
    problem = CylinderProblem()
    assert problem.exact(0.0, 0.3) == pytest.approx(1.1)
    assert problem.source(0.0, -0.2) == pytest.approx(1.0 / 1.1)
    gx, gy = problem.gradient(np.array([0.5]), np.array([0.5]))
    assert gx[0] == pytest.approx(-0.5 / np.sqrt(1.21 - 0.25))
    assert gy[0] == 0.0


def test_cylinder_radius_validation():
    with pytest.raises(ValueError):
        CylinderProblem(a=1.0)


def test_polynomial_consistency():
    problem = PolynomialProblem(X ** 3 * Y - 2.0 * Y ** 2 + X)
    result = consistency_check(problem)
    assert result['pde_residual'] <= 1e-12
    assert result['gradient_residual'] <= 1e-6
    assert result['laplacian_residual'] <= 1e-5
    assert problem.source(0.5, 0.25) == pytest.approx(-(6.0 * 0.5 * 0.25 - 4.0))

# }}}


# {{{ reference elements

@pytest.mark.parametrize("order", [1, 2])
def test_reference_basis_is_nodal(order):
    nodes = P2_NODES[:3 if order == 1 else 6]
    assert np.allclose(reference_basis(order, nodes), np.eye(nodes.shape[0]), atol=1e-15)


@pytest.mark.parametrize("order", [1, 2])
def test_reference_gradients_match_differences(order, rng):
    points = rng.uniform(0.1, 0.4, size=(5, 2))
    step = 1e-6
    fd_x = (reference_basis(order, points + [step, 0.0]) - reference_basis(order, points - [step, 0.0])) / (2 * step)
    fd_y = (reference_basis(order, points + [0.0, step]) - reference_basis(order, points - [0.0, step])) / (2 * step)
    grads = reference_gradients(order, points)
    assert np.allclose(grads[..., 0], fd_x, atol=1e-8)
    assert np.allclose(grads[..., 1], fd_y, atol=1e-8)


def test_p1_reference_stiffness():
    expected = 0.5 * np.array([[2.0, -1.0, -1.0], [-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]])
    assert np.allclose(element_stiffness(REFERENCE, 1), expected, atol=1e-15)


def test_p2_reference_stiffness():
    matrix = element_stiffness(REFERENCE, 2)
    assert np.allclose(matrix, matrix.T, atol=1e-15)
    assert np.allclose(matrix.sum(axis=1), 0.0, atol=1e-14)
    eigenvalues = np.linalg.eigvalsh(matrix)
    assert abs(eigenvalues[0]) <= 1e-13
    assert eigenvalues[1] > 1e-3
    # x^2 interpolated exactly, int |grad x^2|^2 over the reference triangle is 1/3
    c = P2_NODES[:, 0] ** 2
    assert c @ matrix @ c == pytest.approx(1.0 / 3.0, rel=1e-13)


@pytest.mark.parametrize("order", [1, 2])
def test_stiffness_rigid_motion_invariance(order):
    triangle = np.array([[0.0, 0.0], [0.9, 0.1], [0.3, 0.02]])
    angle = 0.7
    rotation = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    moved = triangle @ rotation.T + [3.0, -2.0]
    assert np.allclose(element_stiffness(moved, order), element_stiffness(triangle, order), rtol=1e-10, atol=1e-10)

# }}}


# {{{ global system

@pytest.mark.parametrize("order", [1, 2])
def test_space_sizes(order):
    mesh = build_aniso_mesh(4, 1.4)
    space = lagrange_space(mesh, order)
    if order == 1:
        assert space.n_dofs == mesh.n_vertices
        assert space.boundary.sum() == mesh.boundary.sum()
    else:
        assert space.n_dofs == 2 * mesh.n_vertices + mesh.n_elements - 1
        assert space.boundary.sum() == 2 * mesh.boundary.sum()
        assert np.allclose(space.nodes[space.element_dofs[:, 3]],
                           0.5 * (mesh.vertices[mesh.triangles[:, 0]] + mesh.vertices[mesh.triangles[:, 1]]))


@pytest.mark.parametrize("order", [1, 2])
def test_system_properties(order, rng):
    system = assemble(build_aniso_mesh(6, 1.6), order, CylinderProblem())
    assert system.is_symmetric()
    row_sums = np.asarray(system.matrix.sum(axis=1)).ravel()
    assert np.max(np.abs(row_sums)) <= 1e-10 * np.max(np.abs(system.matrix.diagonal()))
    matrix, rhs = system.reduced()
    assert matrix.shape == (rhs.shape[0], rhs.shape[0])
    for _ in range(5):
        v = rng.standard_normal(rhs.shape[0])
        assert v @ (matrix @ v) > 0.0


def test_threaded_assembly_matches(monkeypatch):
    import circumradiusfem.Fem.Assembly as assembly
    mesh = build_aniso_mesh(6, 1.3)
    serial = assemble(mesh, 2, CylinderProblem(), max_workers=1)
    monkeypatch.setattr(assembly, 'CHUNK_SIZE', 50)
    threaded = assemble(mesh, 2, CylinderProblem(), max_workers=3)
    assert abs(serial.matrix - threaded.matrix).max() <= 1e-12
    assert np.allclose(serial.rhs, threaded.rhs, rtol=1e-13, atol=1e-15)

# }}}


# {{{ conjugate gradients

def test_cg_single_unknown():
    result = conjugate_gradient(np.array([[4.0]]), np.array([2.0]))
    assert result.solution[0] == pytest.approx(0.5)
    assert result.converged


def test_cg_matches_direct_solve(rng):
    q = rng.standard_normal((30, 30))
    matrix = q @ q.T + 30.0 * np.eye(30)
    rhs = rng.standard_normal(30)
    result = conjugate_gradient(sp.csr_matrix(matrix), rhs)
    assert result.residual <= 1e-10
    assert np.allclose(result.solution, np.linalg.solve(matrix, rhs), rtol=1e-8, atol=1e-10)


def test_cg_zero_rhs():
    result = conjugate_gradient(sp.identity(5, format='csr'), np.zeros(5))
    assert result.iterations == 0
    assert np.all(result.solution == 0.0)


def test_cg_iteration_cap(rng):
    q = rng.standard_normal((40, 40))
    matrix = q @ q.T + np.eye(40)
    rhs = rng.standard_normal(40)
    with pytest.raises(ConvergenceError) as info:
        conjugate_gradient(matrix, rhs, max_iterations=2)
    assert info.value.iterations == 2
    assert info.value.residual > 1e-10
    result = conjugate_gradient(matrix, rhs, max_iterations=2, raise_on_failure=False)
    assert not result.converged


def test_cg_validation():
    with pytest.raises(ValueError):
        conjugate_gradient(np.eye(3), np.ones(2))
    with pytest.raises(ValueError):
        conjugate_gradient(np.eye(2), np.ones(2), tol=0.0)

# }}}


# {{{ solutions

def test_linear_patch_coarsest_mesh():
    problem = PolynomialProblem.linear(0.3, -1.2, 2.5)
    mesh = build_aniso_mesh(2, 1.0)
    solution = solve(assemble(mesh, 1, problem))
    exact = problem.exact(mesh.vertices[:, 0], mesh.vertices[:, 1])
    assert np.allclose(solution.coefficients, exact, atol=1e-12)
    assert h1_error(solution, problem) <= 1e-12


@pytest.mark.parametrize("pattern", PATTERNS)
@pytest.mark.parametrize(("order", "u"), [(1, 0.3 - 1.2 * X + 2.5 * Y), (2, X ** 2 + X * Y - 0.5 * Y)])
def test_patch_test(order, u, pattern):
    problem = PolynomialProblem(u)
    solution = solve(assemble(build_aniso_mesh(4, 1.4, pattern), order, problem))
    nodes = solution.space.nodes
    assert np.allclose(solution.coefficients, problem.exact(nodes[:, 0], nodes[:, 1]), atol=1e-7)
    assert h1_error(solution, problem) <= 1e-6


def test_boundary_nodes_carry_data():
    problem = CylinderProblem()
    solution = solve(assemble(build_aniso_mesh(4, 1.2), 2, problem))
    nodes = solution.space.nodes[solution.space.boundary]
    assert np.array_equal(solution.coefficients[solution.space.boundary], problem.boundary(nodes[:, 0], nodes[:, 1]))


def test_galerkin_orthogonality(rng):
    problem = PolynomialProblem(X ** 3 - 3.0 * X * Y ** 2 + X ** 2 * Y)
    solution = solve(assemble(build_aniso_mesh(6, 1.3), 1, problem))
    space = solution.space
    for _ in range(20):
        v = np.zeros(space.n_dofs)
        v[space.free] = rng.standard_normal(space.free.shape[0])
        residual = galerkin_orthogonality_residual(solution, problem, v)
        assert abs(residual) <= 1e-7 * h1_seminorm(space, v)


def test_galerkin_orthogonality_requires_zero_trace():
    problem = PolynomialProblem(X * Y)
    solution = solve(assemble(build_aniso_mesh(2, 1.0), 1, problem))
    with pytest.raises(ValueError):
        galerkin_orthogonality_residual(solution, problem, np.ones(solution.space.n_dofs))


@pytest.mark.parametrize("order", [1, 2])
@pytest.mark.parametrize("alpha", [1.0, 1.6])
def test_energy_optimality(order, alpha):
    problem = CylinderProblem()
    system = assemble(build_aniso_mesh(8, alpha), order, problem)
    solution = solve(system)
    assert solution.residual <= 1e-10
    error = h1_error(solution, problem)
    assert 0.0 < error <= h1_error(interpolate_exact(system.space, problem), problem) * (1.0 + 1e-6)


def test_h1_error_quadrature_floor():
    problem = CylinderProblem()
    solution = interpolate_exact(lagrange_space(build_aniso_mesh(2, 1.0), 1), problem)
    with pytest.raises(ValueError):
        h1_error(solution, problem, degree=4)

# }}}
