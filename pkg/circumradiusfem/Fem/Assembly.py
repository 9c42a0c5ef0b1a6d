"""
Module Assembly: conforming P1/P2 Lagrange spaces on a TriMesh and the Poisson stiffness system

Global numbering puts the mesh vertices first, followed by the edge midpoints for k = 2. Local numbering on an element
is v1, v2, v3 and, for k = 2, the midpoints of (v1, v2), (v2, v3), (v3, v1).
"""

from dataclasses import dataclass, field
import numpy as np
import scipy.sparse as sp
from circumradiusfem.Base import Auxiliary
from circumradiusfem.Fem.Poisson import PoissonProblemBase
from circumradiusfem.Mesh.AnisoMesh import TriMesh, edge_structure
from circumradiusfem.Quadrature.QuadratureRule import rule_for_degree
import logging.config
# Load logging configuration from file
logger = logging.getLogger(__name__)

ORDERS = (1, 2)

# Elements per work item of the threaded assembly
CHUNK_SIZE = 20_000


def _check_order(order: int):
    if order not in ORDERS:
        raise ValueError(f"Unsupported element order '{order}', expected one of {ORDERS}")


def basis_size(order: int) -> int:
    _check_order(order)
    return (order + 1) * (order + 2) // 2


def reference_basis(order: int, points: np.ndarray) -> np.ndarray:
    """
    Lagrange basis on the reference triangle (0,0), (1,0), (0,1)
    :param points: Evaluation points, shape (n, 2)
    :return: Values, shape (n, nb)
    """
    _check_order(order)
    points = np.atleast_2d(points)
    l1 = 1.0 - points[:, 0] - points[:, 1]
    l2, l3 = points[:, 0], points[:, 1]
    if order == 1:
        return np.column_stack([l1, l2, l3])
    return np.column_stack([
        l1 * (2.0 * l1 - 1.0), l2 * (2.0 * l2 - 1.0), l3 * (2.0 * l3 - 1.0),
        4.0 * l1 * l2, 4.0 * l2 * l3, 4.0 * l3 * l1,
    ])


def reference_gradients(order: int, points: np.ndarray) -> np.ndarray:
    """
    Gradients of the reference basis
    :param points: Evaluation points, shape (n, 2)
    :return: Gradients, shape (n, nb, 2)
    """
    _check_order(order)
    points = np.atleast_2d(points)
    n = points.shape[0]
    # Gradients of the barycentric coordinates
    d1, d2, d3 = np.array([-1.0, -1.0]), np.array([1.0, 0.0]), np.array([0.0, 1.0])
    if order == 1:
        return np.broadcast_to(np.stack([d1, d2, d3]), (n, 3, 2)).copy()
    l1 = (1.0 - points[:, 0] - points[:, 1])[:, None]
    l2, l3 = points[:, [0]], points[:, [1]]
    return np.stack([
        (4.0 * l1 - 1.0) * d1, (4.0 * l2 - 1.0) * d2, (4.0 * l3 - 1.0) * d3,
        4.0 * (l1 * d2 + l2 * d1), 4.0 * (l2 * d3 + l3 * d2), 4.0 * (l3 * d1 + l1 * d3),
    ], axis=1)


@dataclass(frozen=True, eq=False)
class ElementGeometry:
    offsets: np.ndarray = field(repr=False)  # Shape (m, 2), first vertex
    jacobians: np.ndarray = field(repr=False)  # Shape (m, 2, 2), columns v2 - v1, v3 - v1
    determinants: np.ndarray = field(repr=False)  # Shape (m,), positive for counterclockwise elements
    inverse_transposes: np.ndarray = field(repr=False)  # Shape (m, 2, 2)

    def map_points(self, points: np.ndarray) -> np.ndarray:
        """Reference points of shape (n, 2) mapped onto every element, shape (m, n, 2)"""
        return self.offsets[:, None, :] + np.einsum('eij,nj->eni', self.jacobians, points)

    def gradients(self, ref_gradients: np.ndarray) -> np.ndarray:
        """Reference gradients of shape (n, nb, 2) pushed forward, shape (m, n, nb, 2)"""
        return np.einsum('eij,nbj->enbi', self.inverse_transposes, ref_gradients)


def element_geometry(vertices: np.ndarray) -> ElementGeometry:
    """Affine maps x = v1 + J xi of elements given by vertices of shape (m, 3, 2)"""
    vertices = np.asarray(vertices, dtype=float)
    jacobians = np.stack([vertices[:, 1] - vertices[:, 0], vertices[:, 2] - vertices[:, 0]], axis=2)
    determinants = jacobians[:, 0, 0] * jacobians[:, 1, 1] - jacobians[:, 0, 1] * jacobians[:, 1, 0]
    inverse_transposes = np.stack([
        np.stack([jacobians[:, 1, 1], -jacobians[:, 1, 0]], axis=1),
        np.stack([-jacobians[:, 0, 1], jacobians[:, 0, 0]], axis=1),
    ], axis=1) / determinants[:, None, None]
    return ElementGeometry(
        offsets=vertices[:, 0].copy(),
        jacobians=jacobians,
        determinants=determinants,
        inverse_transposes=inverse_transposes,
    )


def element_stiffness(vertices: np.ndarray, order: int) -> np.ndarray:
    """
    Element stiffness matrices int_K grad(phi_a) . grad(phi_b)
    :param vertices: Element vertices, shape (m, 3, 2) or (3, 2)
    :return: Matrices of shape (m, nb, nb), or (nb, nb) for a single element
    """
    vertices = np.asarray(vertices, dtype=float)
    single = vertices.ndim == 2
    geometry = element_geometry(vertices[None] if single else vertices)
    rule = rule_for_degree(max(2 * order - 2, 1))
    grads = geometry.gradients(reference_gradients(order, rule.points))
    weights = 0.5 * np.abs(geometry.determinants)[:, None] * rule.weights[None, :]
    matrices = np.einsum('en,enai,enbi->eab', weights, grads, grads)
    return matrices[0] if single else matrices


@dataclass(frozen=True, eq=False)
class LagrangeSpace:
    mesh: TriMesh
    order: int
    nodes: np.ndarray = field(repr=False)  # Shape (n_dofs, 2)
    element_dofs: np.ndarray = field(repr=False)  # Shape (m, nb)
    boundary: np.ndarray = field(repr=False)  # Shape (n_dofs,)

    @property
    def n_dofs(self) -> int:
        return self.nodes.shape[0]

    @property
    def free(self) -> np.ndarray:
        return np.flatnonzero(~self.boundary)


def lagrange_space(mesh: TriMesh, order: int) -> LagrangeSpace:
    """Continuous piecewise polynomials of degree order on mesh"""
    _check_order(order)
    if order == 1:
        return LagrangeSpace(
            mesh=mesh,
            order=1,
            nodes=mesh.vertices,
            element_dofs=mesh.triangles,
            boundary=mesh.boundary,
        )
    structure = edge_structure(mesh)
    midpoints = mesh.vertices[structure.edges].mean(axis=1)
    return LagrangeSpace(
        mesh=mesh,
        order=2,
        nodes=np.vstack([mesh.vertices, midpoints]),
        element_dofs=np.hstack([mesh.triangles, mesh.n_vertices + structure.element_edges]),
        boundary=np.concatenate([mesh.boundary, structure.counts == 1]),
    )


@dataclass(frozen=True, eq=False)
class SparseSystem:
    space: LagrangeSpace
    matrix: sp.csr_matrix = field(repr=False)  # Unconstrained stiffness matrix
    rhs: np.ndarray = field(repr=False)  # Unconstrained load vector
    constrained: np.ndarray = field(repr=False)  # Boolean mask of Dirichlet nodes
    values: np.ndarray = field(repr=False)  # Prescribed values, zero on free nodes

    def is_symmetric(self) -> bool:
        return (self.matrix != self.matrix.T).nnz == 0

    def reduced(self) -> tuple[sp.csr_matrix, np.ndarray]:
        """Free-node block A_ff and right-hand side b_f - A_fc g_c after elimination of the Dirichlet nodes"""
        free = np.flatnonzero(~self.constrained)
        rows = self.matrix[free]
        return rows[:, free].tocsr(), self.rhs[free] - rows @ self.values


def _assemble_chunk(
        space: LagrangeSpace,
        problem: PoissonProblemBase,
        load_degree: int,
        elements: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    dofs = space.element_dofs[elements]
    vertices = space.mesh.vertices[space.mesh.triangles[elements]]
    stiffness = element_stiffness(vertices, space.order)
    geometry = element_geometry(vertices)
    rule = rule_for_degree(load_degree)
    points = geometry.map_points(rule.points)
    f = problem.source(points[..., 0], points[..., 1])
    basis = reference_basis(space.order, rule.points)
    load = 0.5 * np.abs(geometry.determinants)[:, None] * np.einsum('n,en,na->ea', rule.weights, f, basis)
    nb = dofs.shape[1]
    rows = np.repeat(dofs, nb, axis=1).ravel()
    cols = np.tile(dofs, (1, nb)).ravel()
    logger.debug(f"Assembled {elements.shape[0]} elements")
    return rows, cols, stiffness.ravel(), load.ravel()


def assemble(
        mesh: TriMesh,
        order: int,
        problem: PoissonProblemBase,
        load_degree: int | None = None,
        max_workers: int | None = None,
) -> SparseSystem:
    """
    Assemble stiffness matrix and load vector of the Poisson problem
    :param mesh: Conforming mesh
    :param order: Element order k, 1 or 2
    :param problem: Problem providing f and g
    :param load_degree: Quadrature degree of the load integrals, if None, use 2k + 4
    :param max_workers: Number of worker threads over element chunks, if None, use Auxiliary.worker_count()
    """
    space = lagrange_space(mesh, order)
    load_degree = 2 * order + 4 if load_degree is None else load_degree
    logger.info(f"Assembling P{order} system with {space.n_dofs} nodes on {mesh.n_elements} elements ...")
    chunks = [np.arange(s, min(s + CHUNK_SIZE, mesh.n_elements)) for s in range(0, mesh.n_elements, CHUNK_SIZE)]
    parts = Auxiliary.parallel_map(lambda e: _assemble_chunk(space, problem, load_degree, e), chunks, max_workers)
    rows = np.concatenate([p[0] for p in parts])
    cols = np.concatenate([p[1] for p in parts])
    n = space.n_dofs
    matrix = sp.coo_matrix((np.concatenate([p[2] for p in parts]), (rows, cols)), shape=(n, n)).tocsr()
    # Mirror the upper triangle for exact symmetry
    matrix = (sp.triu(matrix, format='csr') + sp.triu(matrix, k=1, format='csr').T).tocsr()
    matrix.sort_indices()
    rhs = np.bincount(space.element_dofs.ravel(), weights=np.concatenate([p[3] for p in parts]), minlength=n)

    values = np.zeros(n)
    boundary_nodes = space.nodes[space.boundary]
    values[space.boundary] = problem.boundary(boundary_nodes[:, 0], boundary_nodes[:, 1])
    return SparseSystem(space=space, matrix=matrix, rhs=rhs, constrained=space.boundary.copy(), values=values)
