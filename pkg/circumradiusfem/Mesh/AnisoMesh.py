"""
Module AnisoMesh: structured anisotropic triangulations of the square (-1, 1)^2

The square is cut into N columns of width h = 2/N and M = floor(2/h^alpha) rows of height v = 2/M. Two patterns fill
the rows:

- 'alternating': every element is the isosceles triangle with base h and height v. Inside a row the triangles
  alternate between base-down and base-up, and two right triangles with legs h/2 and v close the row at x = -1 and
  x = 1. Horizontal lines alternate between N + 1 vertices at x = -1 + ih and N + 2 vertices at the shifted positions
  -1 + (i + 1/2)h plus both ends.
- 'center-split': every h x v cell receives its center as an extra vertex and splits into four triangles, one per cell
  edge. The bottom and top ones are isosceles with base h and height v/2, the lateral ones with base v and height h/2.

For alpha = 1 the comparison mesh with row height h/2 is built, i.e. M = 2N.
"""

from dataclasses import dataclass, field
from typing import TextIO
import math
import numpy as np
from circumradiusfem.Base import Auxiliary
from circumradiusfem.Base.Errors import MeshParameterError
import logging.config
# Load logging configuration from file
logger = logging.getLogger(__name__)

# Cell patterns of build_aniso_mesh
PATTERNS = ('alternating', 'center-split')
DEFAULT_PATTERN = 'alternating'


def row_count(n_columns: int, alpha: float) -> int:
    """M = floor(2 / h^alpha) with h = 2/N, M = 2N for alpha = 1"""
    if alpha == 1.0:
        return 2 * n_columns
    h = 2.0 / n_columns
    return math.floor(2.0 / h ** alpha)


def _check_pattern(pattern: str):
    if pattern not in PATTERNS:
        raise MeshParameterError(f"Unknown mesh pattern '{pattern}', expected one of {PATTERNS}")


def node_count(n_columns: int, n_rows: int, pattern: str = DEFAULT_PATTERN) -> int:
    """
    Number of mesh vertices
    :return: (N + 1)(M + 1) grid vertices plus one extra on each of the floor((M + 1)/2) shifted lines for
        'alternating', plus the N M cell centers for 'center-split'
    """
    _check_pattern(pattern)
    if pattern == 'center-split':
        return (n_columns + 1) * (n_rows + 1) + n_columns * n_rows
    return (n_columns + 1) * (n_rows + 1) + (n_rows + 1) // 2


def element_count(n_columns: int, n_rows: int, pattern: str = DEFAULT_PATTERN) -> int:
    _check_pattern(pattern)
    if pattern == 'center-split':
        return 4 * n_columns * n_rows
    return n_rows * (2 * n_columns + 1)


def isosceles_circumradius(base: float, height: float) -> float:
    """R = v/2 + h^2/(8v) of the isosceles triangle with base h and height v"""
    return height / 2.0 + base ** 2 / (8.0 * height)


@dataclass(frozen=True, eq=False)
class TriMesh:
    vertices: np.ndarray = field(repr=False)  # Shape (n, 2)
    triangles: np.ndarray = field(repr=False)  # Shape (m, 3), counterclockwise
    boundary: np.ndarray = field(repr=False)  # Shape (n,), True on the boundary of the square
    n_columns: int  # N
    n_rows: int  # M
    alpha: float
    pattern: str = DEFAULT_PATTERN

    @property
    def h(self) -> float:
        return 2.0 / self.n_columns

    @property
    def row_height(self) -> float:
        return 2.0 / self.n_rows

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_elements(self) -> int:
        return self.triangles.shape[0]

    def element_vertices(self) -> np.ndarray:
        """Vertex coordinates per element, shape (m, 3, 2)"""
        return self.vertices[self.triangles]

    def signed_areas(self) -> np.ndarray:
        p = self.element_vertices()
        e1, e2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def closed_form_circumradius(self) -> float:
        """Largest circumradius of the elements from the isosceles formula of the pattern"""
        if self.pattern == 'center-split':
            return max(isosceles_circumradius(self.h, self.row_height / 2.0),
                       isosceles_circumradius(self.row_height, self.h / 2.0))
        return isosceles_circumradius(self.h, self.row_height)


def _alternating_rows(n: int, n_rows: int) -> tuple[np.ndarray, np.ndarray]:
    xs = np.linspace(-1.0, 1.0, n + 1)
    shifted = np.concatenate([[-1.0], 0.5 * (xs[:-1] + xs[1:]), [1.0]])
    ys = np.linspace(-1.0, 1.0, n_rows + 1)
    lines, starts, start = [], [], 0
    for j, y in enumerate(ys):
        line_xs = shifted if j % 2 else xs
        lines.append(np.column_stack([line_xs, np.full(line_xs.shape[0], y)]))
        starts.append(start)
        start += line_xs.shape[0]
    vertices = np.vstack(lines)

    i_up = np.arange(n)  # N triangles with their base on the unshifted line
    i_down = np.arange(n - 1)  # N - 1 triangles with their base on the shifted line
    rows = []
    for j in range(n_rows):
        b0, t0 = starts[j], starts[j + 1]
        if j % 2 == 0:
            # Unshifted bottom line b_0..b_N, shifted top line t_0..t_(N+1)
            rows.append(np.column_stack([b0 + i_up, b0 + i_up + 1, t0 + i_up + 1]))
            rows.append(np.column_stack([b0 + i_down + 1, t0 + i_down + 2, t0 + i_down + 1]))
            rows.append([[b0, t0 + 1, t0], [b0 + n, t0 + n + 1, t0 + n]])
        else:
            # Shifted bottom line b_0..b_(N+1), unshifted top line t_0..t_N
            rows.append(np.column_stack([b0 + i_up + 1, t0 + i_up + 1, t0 + i_up]))
            rows.append(np.column_stack([b0 + i_down + 1, b0 + i_down + 2, t0 + i_down + 1]))
            rows.append([[b0, b0 + 1, t0], [b0 + n, b0 + n + 1, t0 + n]])
    triangles = np.vstack([np.asarray(r, dtype=np.int64).reshape(-1, 3) for r in rows])
    return vertices, triangles


def _center_split_cells(n: int, n_rows: int) -> tuple[np.ndarray, np.ndarray]:
    xs = np.linspace(-1.0, 1.0, n + 1)
    ys = np.linspace(-1.0, 1.0, n_rows + 1)
    gx, gy = np.meshgrid(xs, ys)  # Grid vertex (i, j) at index j (N + 1) + i
    cx, cy = np.meshgrid(0.5 * (xs[:-1] + xs[1:]), 0.5 * (ys[:-1] + ys[1:]))  # Center of cell (i, j) at G + j N + i
    vertices = np.vstack([np.column_stack([gx.ravel(), gy.ravel()]), np.column_stack([cx.ravel(), cy.ravel()])])

    i, j = np.meshgrid(np.arange(n), np.arange(n_rows))
    i, j = i.ravel(), j.ravel()
    sw, se = j * (n + 1) + i, j * (n + 1) + i + 1
    nw, ne = sw + n + 1, se + n + 1
    center = (n + 1) * (n_rows + 1) + j * n + i
    # Cell boundary walked counterclockwise, each edge closed by the center
    triangles = np.stack([
        np.column_stack([sw, se, center]),
        np.column_stack([se, ne, center]),
        np.column_stack([ne, nw, center]),
        np.column_stack([nw, sw, center]),
    ], axis=1).reshape(-1, 3).astype(np.int64)
    return vertices, triangles


def build_aniso_mesh(n_columns: int, alpha: float, pattern: str = DEFAULT_PATTERN) -> TriMesh:
    """
    Anisotropic mesh of (-1, 1)^2
    :param n_columns: Number of columns N, N >= 2
    :param alpha: Anisotropy exponent, alpha >= 1
    :param pattern: Cell pattern, one of PATTERNS
    :raises MeshParameterError: If N < 2, alpha < 1, the pattern is unknown or floor(2/h^alpha) = 0
    """
    _check_pattern(pattern)
    if n_columns < 2:
        raise MeshParameterError(f"Number of columns must be at least 2, got '{n_columns}'")
    if alpha < 1.0:
        raise MeshParameterError(f"Anisotropy exponent must satisfy alpha >= 1, got '{alpha}'")
    n_rows = row_count(n_columns, alpha)
    if n_rows < 1:
        raise MeshParameterError(f"floor(2/h^alpha) is zero for N '{n_columns}', alpha '{alpha}'")
    logger.info(f"Building {pattern} anisotropic mesh N={n_columns}, alpha={alpha}: M={n_rows}, "
                f"{element_count(n_columns, n_rows, pattern)} triangles")

    if pattern == 'center-split':
        vertices, triangles = _center_split_cells(n_columns, n_rows)
    else:
        vertices, triangles = _alternating_rows(n_columns, n_rows)

    boundary = np.isclose(np.abs(vertices[:, 0]), 1.0) | np.isclose(np.abs(vertices[:, 1]), 1.0)
    return TriMesh(
        vertices=vertices,
        triangles=triangles,
        boundary=boundary,
        n_columns=n_columns,
        n_rows=n_rows,
        alpha=alpha,
        pattern=pattern,
    )


@dataclass(frozen=True, eq=False)
class EdgeStructure:
    edges: np.ndarray  # Shape (E, 2), sorted vertex pairs
    counts: np.ndarray  # Shape (E,), number of adjacent elements
    element_edges: np.ndarray  # Shape (m, 3), edge of local vertices (j, j + 1 mod 3)


def edge_structure(mesh: TriMesh) -> EdgeStructure:
    """Unique edges, their element counts, and the element-to-edge map"""
    t = mesh.triangles
    local = np.stack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]], axis=1).reshape(-1, 2)
    local = np.sort(local, axis=1)
    edges, inverse, counts = np.unique(local, axis=0, return_inverse=True, return_counts=True)
    return EdgeStructure(edges=edges, counts=counts, element_edges=inverse.reshape(-1, 3))


def boundary_edges(mesh: TriMesh) -> np.ndarray:
    """Edges adjacent to exactly one element, shape (b, 2)"""
    structure = edge_structure(mesh)
    return structure.edges[structure.counts == 1]


def conformity_report(mesh: TriMesh) -> dict:
    """
    Checks of the triangulation
    :return: Dict with 'conforming' (every edge shared by one or two elements, exactly one on the boundary of the
        square), 'area' (sum of the element areas), 'tiles' (area equals 4), 'positive' (all elements counterclockwise
        with positive area) and 'node_count' (vertex count matches the construction)
    """
    structure = edge_structure(mesh)
    ends = mesh.vertices[structure.edges]
    midpoints = ends.mean(axis=1)
    on_square = np.isclose(np.abs(midpoints[:, 0]), 1.0) | np.isclose(np.abs(midpoints[:, 1]), 1.0)
    conforming = bool(np.all(structure.counts[on_square] == 1) and np.all(structure.counts[~on_square] == 2))
    areas = mesh.signed_areas()
    area = float(np.sum(areas))
    return {
        'conforming': conforming,
        'area': area,
        'tiles': abs(area - 4.0) <= 1e-10,
        'positive': bool(np.all(areas > 0.0)),
        'node_count': mesh.n_vertices == node_count(mesh.n_columns, mesh.n_rows, mesh.pattern),
    }


def element_metrics(points: np.ndarray) -> dict:
    """
    Vectorized triangle metrics
    :param points: Vertices, shape (m, 3, 2)
    :return: Dict of arrays 'diameter', 'circumradius', 'inradius', 'min_angle', 'max_angle'
    """
    angles = np.empty(points.shape[:2])
    edges = np.empty(points.shape[:2])
    crosses = np.empty(points.shape[:2])
    for i in range(3):
        apex, p, q = points[:, i], points[:, (i + 1) % 3], points[:, (i + 2) % 3]
        u, w = p - apex, q - apex
        crosses[:, i] = np.abs(u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0])
        angles[:, i] = np.arctan2(crosses[:, i], np.einsum('ij,ij->i', u, w))
        edges[:, i] = np.linalg.norm(q - p, axis=1)  # Opposite to the apex
    # Area from the cross product at the largest angle
    area = 0.5 * np.take_along_axis(crosses, np.argmax(angles, axis=1)[:, None], axis=1)[:, 0]
    return {
        'diameter': edges.max(axis=1),
        'circumradius': edges.prod(axis=1) / (4.0 * area),
        'inradius': 2.0 * area / edges.sum(axis=1),
        'min_angle': angles.min(axis=1),
        'max_angle': angles.max(axis=1),
    }


@dataclass(frozen=True)
class MeshStats:
    n_columns: int
    n_rows: int
    alpha: float
    h: float
    element_count: int
    max_diameter: float
    max_circumradius: float
    max_chunkiness: float  # max h_K / rho_K
    min_angle: float
    max_angle: float

    def as_dict(self) -> dict:
        return {
            'N': self.n_columns,
            'M': self.n_rows,
            'alpha': self.alpha,
            'h': self.h,
            'elements': self.element_count,
            'max_h_K': self.max_diameter,
            'max_R_K': self.max_circumradius,
            'max_chunkiness': self.max_chunkiness,
            'min_angle': self.min_angle,
            'max_angle': self.max_angle,
        }


def mesh_stats(mesh: TriMesh) -> MeshStats:
    metrics = element_metrics(mesh.element_vertices())
    return MeshStats(
        n_columns=mesh.n_columns,
        n_rows=mesh.n_rows,
        alpha=mesh.alpha,
        h=mesh.h,
        element_count=mesh.n_elements,
        max_diameter=float(metrics['diameter'].max()),
        max_circumradius=float(metrics['circumradius'].max()),
        max_chunkiness=float((metrics['diameter'] / metrics['inradius']).max()),
        min_angle=float(metrics['min_angle'].min()),
        max_angle=float(metrics['max_angle'].max()),
    )


def log_log_slope(xs, ys) -> float:
    """Least-squares slope of log(ys) against log(xs)"""
    xs, ys = np.log(np.asarray(xs, dtype=float)), np.log(np.asarray(ys, dtype=float))
    if xs.shape[0] < 2:
        raise ValueError("At least two points are required for a slope")
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)


def dump_off(mesh: TriMesh, stream: TextIO):
    """Write the mesh in OFF format, z = 0"""
    stream.write("OFF\n")
    stream.write(f"{mesh.n_vertices} {mesh.n_elements} 0\n")
    for x, y in mesh.vertices:
        stream.write(f"{Auxiliary.format_value(float(x))} {Auxiliary.format_value(float(y))} 0\n")
    for a, b, c in mesh.triangles:
        stream.write(f"3 {a} {b} {c}\n")


if __name__ == '__main__':
    _mesh = build_aniso_mesh(12, 1.6)
    print(conformity_report(_mesh))
    print(mesh_stats(_mesh))
