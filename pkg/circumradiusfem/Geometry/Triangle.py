"""
Module Triangle: triangle primitives, metric quantities and the standard position

The standard position of a triangle K is the congruent copy with vertices (0,0), (alpha,0), (beta*s, beta*t), where the
maximum angle theta sits at the origin, s = cos(theta), t = sin(theta) and 0 < beta <= alpha <= h_K. Its affine map from
the reference triangle factors as A = A_tilde @ D_ab with A_tilde = [[1, s], [0, t]] and D_ab = diag(alpha, beta).
"""

from dataclasses import dataclass, field
import numpy as np
import math
from circumradiusfem.Base.Errors import DegenerateTriangleError, NumericalConsistencyError
import logging.config
# Load logging configuration from file
logger = logging.getLogger(__name__)

# Relative threshold of the degeneracy test: |signed area| <= DEGENERACY_TOLERANCE * h_K^2 is rejected
DEGENERACY_TOLERANCE = 1e-14

# Relative tolerance under which two angles count as tied for the maximum
ANGLE_TIE_TOLERANCE = 1e-14

Point = tuple[float, float]


def _signed_area(p1: Point, p2: Point, p3: Point) -> float:
    return 0.5 * ((p2[0] - p1[0]) * (p3[1] - p1[1]) - (p3[0] - p1[0]) * (p2[1] - p1[1]))


@dataclass(frozen=True)
class Triangle:
    """Triangle with vertices normalized to counterclockwise order"""
    v1: Point
    v2: Point
    v3: Point

    def __post_init__(self):
        v1, v2, v3 = (tuple(float(c) for c in v) for v in (self.v1, self.v2, self.v3))
        for v in (v1, v2, v3):
            if len(v) != 2 or not all(math.isfinite(c) for c in v):
                raise ValueError(f"Invalid vertex '{v}', expected two finite coordinates")
        h = max(math.dist(v1, v2), math.dist(v2, v3), math.dist(v1, v3))
        area = _signed_area(v1, v2, v3)
        if h == 0.0 or abs(area) <= DEGENERACY_TOLERANCE * h * h:
            raise DegenerateTriangleError(f"Degenerate triangle with vertices {v1}, {v2}, {v3}")
        if area < 0.0:
            v2, v3 = v3, v2  # Normalize to positive orientation
        object.__setattr__(self, 'v1', v1)
        object.__setattr__(self, 'v2', v2)
        object.__setattr__(self, 'v3', v3)

    @classmethod
    def from_array(cls, vertices) -> 'Triangle':
        """Triangle from an array-like of shape (3, 2)"""
        vertices = np.asarray(vertices, dtype=float)
        if vertices.shape != (3, 2):
            raise ValueError(f"Expected vertices of shape (3, 2), got {vertices.shape}")
        return cls(tuple(vertices[0]), tuple(vertices[1]), tuple(vertices[2]))

    @classmethod
    def from_coordinates(cls, *coordinates: float) -> 'Triangle':
        """Triangle from six numbers x1 y1 x2 y2 x3 y3"""
        if len(coordinates) != 6:
            raise ValueError(f"Expected six coordinates, got {len(coordinates)}")
        return cls.from_array(np.reshape(coordinates, (3, 2)))

    @property
    def vertices(self) -> np.ndarray:
        return np.array([self.v1, self.v2, self.v3])

    def edge_lengths(self) -> tuple[float, float, float]:
        """Lengths of the edges opposite v1, v2 and v3"""
        return math.dist(self.v2, self.v3), math.dist(self.v1, self.v3), math.dist(self.v1, self.v2)

    def affine_map(self) -> tuple[np.ndarray, np.ndarray]:
        """
        Affine map x = b + A @ xi from the reference triangle (0,0), (1,0), (0,1)
        :return: Matrix A (columns v2 - v1 and v3 - v1) and offset b = v1
        """
        b = np.array(self.v1)
        matrix = np.column_stack((np.subtract(self.v2, self.v1), np.subtract(self.v3, self.v1)))
        return matrix, b

    def to_physical(self, points_ref: np.ndarray) -> np.ndarray:
        """Map points of shape (n, 2) from the reference triangle onto this triangle"""
        matrix, b = self.affine_map()
        return np.asarray(points_ref, dtype=float) @ matrix.T + b

    def rotated(self, angle: float, center: Point | None = None) -> 'Triangle':
        """Copy rotated counterclockwise by angle (radians) around center, default the origin"""
        c, s = math.cos(angle), math.sin(angle)
        rotation = np.array([[c, -s], [s, c]])
        center = np.zeros(2) if center is None else np.asarray(center, dtype=float)
        return Triangle.from_array((self.vertices - center) @ rotation.T + center)

    def translated(self, offset: Point) -> 'Triangle':
        return Triangle.from_array(self.vertices + np.asarray(offset, dtype=float))

    def scaled(self, factor: float) -> 'Triangle':
        return Triangle.from_array(self.vertices * factor)


# Reference triangle with vertices (0,0), (1,0), (0,1)
REFERENCE_TRIANGLE = Triangle((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))


def squeezed_triangle(alpha: float, beta: float) -> Triangle:
    """Image of the reference triangle under the squeezing map (x, y) -> (alpha x, beta y)"""
    if alpha <= 0.0 or beta <= 0.0:
        raise ValueError(f"Squeezing factors must be positive, got alpha '{alpha}', beta '{beta}'")
    return Triangle((0.0, 0.0), (alpha, 0.0), (0.0, beta))


@dataclass(frozen=True)
class TriangleMetrics:
    edges: tuple[float, float, float]  # Opposite v1, v2, v3
    area: float
    diameter: float  # h_K
    inradius: float  # rho_K
    circumradius: float  # R_K
    angles: tuple[float, float, float]  # At v1, v2, v3, radians
    chunkiness: float  # h_K / rho_K
    semiregularity: float  # R_K / h_K

    @property
    def max_angle(self) -> float:
        return max(self.angles)

    @property
    def min_angle(self) -> float:
        return min(self.angles)

    def as_dict(self) -> dict:
        return {
            'A': self.edges[0], 'B': self.edges[1], 'C': self.edges[2],
            'area': self.area,
            'h_K': self.diameter,
            'rho_K': self.inradius,
            'R_K': self.circumradius,
            'theta1': self.angles[0], 'theta2': self.angles[1], 'theta3': self.angles[2],
            'chunkiness': self.chunkiness,
            'semiregularity': self.semiregularity,
        }


def _cross_dot(apex: Point, p: Point, q: Point) -> tuple[float, float]:
    ux, uy = p[0] - apex[0], p[1] - apex[1]
    wx, wy = q[0] - apex[0], q[1] - apex[1]
    return abs(ux * wy - uy * wx), ux * wx + uy * wy


def triangle_metrics(tri: Triangle) -> TriangleMetrics:
    """
    Edge lengths, area, diameter, inradius, circumradius and angles of a triangle

    Angles come from atan2(|cross|, dot) of the edge vectors at each vertex. The area is half the cross product at
    the vertex of the maximum angle, the same quantity its angle is computed from, so that R_K / h_K = 1 / (2 sin theta)
    holds to rounding even for needles. Formulas on rounded edge lengths lose accuracy like 1/sin(theta)^2 there.
    """
    a, b, c = tri.edge_lengths()
    cross_dot = (
        _cross_dot(tri.v1, tri.v2, tri.v3),
        _cross_dot(tri.v2, tri.v3, tri.v1),
        _cross_dot(tri.v3, tri.v1, tri.v2),
    )
    angles = tuple(math.atan2(cross, dot) for cross, dot in cross_dot)
    o = max(range(3), key=lambda i: angles[i])
    area = 0.5 * cross_dot[o][0]
    if area <= 0.0:
        raise DegenerateTriangleError(f"Vanishing area of {tri}")
    diameter = max(a, b, c)
    inradius = 2.0 * area / (a + b + c)
    circumradius = a * b * c / (4.0 * area)
    return TriangleMetrics(
        edges=(a, b, c),
        area=area,
        diameter=diameter,
        inradius=inradius,
        circumradius=circumradius,
        angles=angles,
        chunkiness=diameter / inradius,
        semiregularity=circumradius / diameter,
    )


def kobayashi_constant(tri: Triangle) -> float:
    """
    Closed-form constant C(K) of the sharp estimate |v - I^1 v|_{1,2,K} <= C(K) |v|_{2,2,K}

    C(K)^2 = A^2 B^2 C^2 / (16 S^2) - (A^2 + B^2 + C^2) / 30 - (S^2 / 5) (1/A^2 + 1/B^2 + 1/C^2)
    """
    metrics = triangle_metrics(tri)
    a, b, c = metrics.edges
    s = metrics.area
    radicand = (
        metrics.circumradius ** 2
        - (a * a + b * b + c * c) / 30.0
        - (s * s / 5.0) * (1.0 / (a * a) + 1.0 / (b * b) + 1.0 / (c * c))
    )
    if not radicand > 0.0:
        raise NumericalConsistencyError(f"Non-positive radicand {radicand} in the Kobayashi constant of {tri}")
    return math.sqrt(radicand)


@dataclass(frozen=True)
class StandardPosition:
    alpha: float
    beta: float
    s: float  # cos(theta)
    t: float  # sin(theta)
    theta: float  # Maximum angle, placed at the origin
    diameter: float  # h_K
    origin_index: int  # Index (0..2) of the input vertex mapped to the origin
    # Rigid motion y = Q @ (x - translation); Q is a rotation, followed by a reflection y -> (y0, -y1) if reflected
    rotation: tuple[tuple[float, float], tuple[float, float]]
    reflected: bool
    translation: Point

    @property
    def orthogonal_matrix(self) -> np.ndarray:
        """Q = diag(1, +-1) @ rotation"""
        q = np.array(self.rotation)
        if self.reflected:
            q = np.diag([1.0, -1.0]) @ q
        return q

    def apply(self, points) -> np.ndarray:
        """Apply the rigid motion to points of shape (n, 2)"""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return (points - np.asarray(self.translation)) @ self.orthogonal_matrix.T

    @property
    def canonical_vertices(self) -> np.ndarray:
        return np.array([
            [0.0, 0.0],
            [self.alpha, 0.0],
            [self.beta * self.s, self.beta * self.t],
        ])

    def canonical_triangle(self) -> Triangle:
        return Triangle.from_array(self.canonical_vertices)


def standard_position(tri: Triangle) -> StandardPosition:
    """Rigid motion (rotation, optional mirror, translation) of a triangle into its standard position"""
    metrics = triangle_metrics(tri)
    vertices = tri.vertices
    max_angle = metrics.max_angle
    # Lowest index among the (numerically) tied maximum angles
    o = next(i for i, angle in enumerate(metrics.angles) if angle >= max_angle * (1.0 - ANGLE_TIE_TOLERANCE))
    others = [j for j in range(3) if j != o]
    lengths = {j: float(np.linalg.norm(vertices[j] - vertices[o])) for j in others}
    # Longer adjacent edge goes to the x-axis, ties keep the lower index there
    i_alpha = others[0] if lengths[others[0]] >= lengths[others[1]] else others[1]
    i_beta = others[1] if i_alpha == others[0] else others[0]
    alpha, beta = lengths[i_alpha], lengths[i_beta]

    direction = (vertices[i_alpha] - vertices[o]) / alpha
    rotation = np.array([[direction[0], direction[1]], [-direction[1], direction[0]]])
    image = rotation @ (vertices[i_beta] - vertices[o])
    reflected = bool(image[1] < 0.0)
    theta = metrics.angles[o]
    sp = StandardPosition(
        alpha=alpha,
        beta=beta,
        s=math.cos(theta),
        t=math.sin(theta),
        theta=theta,
        diameter=metrics.diameter,
        origin_index=o,
        rotation=tuple(tuple(float(x) for x in row) for row in rotation),
        reflected=reflected,
        translation=tuple(float(x) for x in vertices[o]),
    )
    logger.debug(f"Standard position of {tri}: {sp}")
    return sp


@dataclass(frozen=True, eq=False)
class DecomposedMap:
    matrix: np.ndarray = field(repr=False)  # A = [[alpha, beta s], [0, beta t]]
    shear: np.ndarray = field(repr=False)  # A_tilde = [[1, s], [0, t]]
    diagonal: np.ndarray = field(repr=False)  # D_ab = diag(alpha, beta)
    norm_shear: float  # ||A_tilde|| = (1 + |s|)^(1/2)
    norm_shear_inverse: float  # ||A_tilde^-1|| = (1 - |s|)^(-1/2)
    det_shear: float  # t
    singular_values_shear: tuple[float, float]  # Computed, descending
    singular_values_shear_inverse: tuple[float, float]  # Computed, descending


def decompose(sp: StandardPosition) -> DecomposedMap:
    """Factor the standard-position map as A = A_tilde @ D_ab"""
    s, t = sp.s, sp.t
    shear = np.array([[1.0, s], [0.0, t]])
    diagonal = np.diag([sp.alpha, sp.beta])
    matrix = np.array([[sp.alpha, sp.beta * s], [0.0, sp.beta * t]])
    sv = np.linalg.svd(shear, compute_uv=False)
    sv_inv = np.linalg.svd(np.linalg.inv(shear), compute_uv=False)
    abs_s = abs(s)
    return DecomposedMap(
        matrix=matrix,
        shear=shear,
        diagonal=diagonal,
        norm_shear=math.sqrt(1.0 + abs_s),
        # (1 - |s|)^(-1/2) = (1 + |s|)^(1/2) / t avoids cancellation for theta near pi
        norm_shear_inverse=math.sqrt(1.0 + abs_s) / t,
        det_shear=t,
        singular_values_shear=(float(sv[0]), float(sv[1])),
        singular_values_shear_inverse=(float(sv_inv[0]), float(sv_inv[1])),
    )


def circumradius_shear_bound(tri: Triangle) -> tuple[float, float]:
    """
    Both sides of ||A_tilde^-1|| <= 2^(3/2) R_K / h_K
    :return: Tuple (||A_tilde^-1||, 2^(3/2) R_K / h_K)
    """
    metrics = triangle_metrics(tri)
    dm = decompose(standard_position(tri))
    return dm.norm_shear_inverse, 2.0 ** 1.5 * metrics.semiregularity


def inscribed_ball_check(tri: Triangle) -> dict:
    """
    Classical bounds ||A|| <= h_K / rho_ref and ||A^-1|| <= h_ref / rho_K for the map from the reference triangle,
    rho denoting diameters of inscribed circles (twice the inradius)
    """
    matrix, _ = tri.affine_map()
    metrics = triangle_metrics(tri)
    ref = triangle_metrics(REFERENCE_TRIANGLE)
    norm_a = float(np.linalg.norm(matrix, 2))
    norm_a_inv = float(np.linalg.norm(np.linalg.inv(matrix), 2))
    bound_a = metrics.diameter / (2.0 * ref.inradius)
    bound_a_inv = ref.diameter / (2.0 * metrics.inradius)
    return {
        'norm_A': norm_a,
        'bound_A': bound_a,
        'norm_A_inv': norm_a_inv,
        'bound_A_inv': bound_a_inv,
        'holds': norm_a <= bound_a * (1.0 + 1e-12) and norm_a_inv <= bound_a_inv * (1.0 + 1e-12),
    }


def jamet_factor(tri: Triangle) -> float:
    """1 / cos(theta_max / 2), the angle factor of the comparison estimate based on the maximum angle"""
    return 1.0 / math.cos(triangle_metrics(tri).max_angle / 2.0)


if __name__ == '__main__':
    for _tri in (REFERENCE_TRIANGLE, Triangle((0, 0), (1, 0), (0.5, math.sqrt(3) / 2))):
        print(triangle_metrics(_tri))
        print(f"C(K) = {kobayashi_constant(_tri)}")
        print(decompose(standard_position(_tri)))
