"""
Module QuadratureRule: positive-weight quadrature on the reference triangle

Rules are given in barycentric coordinates (lambda1, lambda2, lambda3) with weights summing to one; the integral over a
triangle is the weighted mean times the area. Degrees 1 and 2 use the classical centroid and three-point rules, higher
degrees the collapsed Gauss-Jacobi product rule, exact up to 2n - 1 with n points per direction.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable
import math
import numpy as np
from scipy.special import roots_jacobi
from circumradiusfem.Base.Errors import QuadratureDegreeError
from circumradiusfem.Geometry.Triangle import Triangle
from circumradiusfem.Quadrature.Polynomial import BivariatePolynomial
import logging.config
# Load logging configuration from file
logger = logging.getLogger(__name__)

MIN_DEGREE = 1
MAX_DEGREE = 25


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    degree: int
    barycentric: np.ndarray = field(repr=False)  # Shape (n, 3)
    weights: np.ndarray = field(repr=False)  # Shape (n,), sum 1

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    @property
    def points(self) -> np.ndarray:
        """Nodes on the reference triangle (0,0), (1,0), (0,1), shape (n, 2)"""
        return self.barycentric[:, 1:]

    def physical_points(self, tri: Triangle) -> np.ndarray:
        """Nodes mapped onto a triangle, shape (n, 2)"""
        return self.barycentric @ tri.vertices


def _freeze(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array, dtype=float)
    array.setflags(write=False)
    return array


def _collapsed_gauss_jacobi(degree: int) -> QuadratureRule:
    n = math.ceil((degree + 1) / 2)
    a, wa = roots_jacobi(n, 0.0, 0.0)  # Gauss-Legendre in the collapsed direction
    b, wb = roots_jacobi(n, 1.0, 0.0)  # Weight (1 - b) absorbs the Duffy Jacobian
    aa, bb = np.meshgrid(a, b, indexing='ij')
    xi = 0.25 * (1.0 + aa) * (1.0 - bb)
    eta = 0.5 * (1.0 + bb)
    # Integral over the reference triangle is sum(wa * wb) / 8, normalized by the area 1/2
    weights = np.outer(wa, wb).ravel() / 4.0
    xi, eta = xi.ravel(), eta.ravel()
    barycentric = np.column_stack((1.0 - xi - eta, xi, eta))
    return QuadratureRule(degree=degree, barycentric=_freeze(barycentric), weights=_freeze(weights))


@lru_cache(maxsize=None)
def rule_for_degree(q: int) -> QuadratureRule:
    """
    Quadrature rule on the reference triangle, exact for all polynomials of total degree <= q
    :param q: Exactness degree, 1 <= q <= 25
    :return: Immutable rule, shared between callers
    """
    if not isinstance(q, int | np.integer) or not MIN_DEGREE <= q <= MAX_DEGREE:
        raise QuadratureDegreeError(f"Unsupported quadrature degree '{q}', expected {MIN_DEGREE} <= q <= {MAX_DEGREE}")
    q = int(q)
    if q == 1:
        rule = QuadratureRule(
            degree=1,
            barycentric=_freeze(np.array([[1.0, 1.0, 1.0]]) / 3.0),
            weights=_freeze(np.array([1.0])),
        )
    elif q == 2:
        rule = QuadratureRule(
            degree=2,
            barycentric=_freeze(np.array([
                [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
                [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
                [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
            ])),
            weights=_freeze(np.full(3, 1.0 / 3.0)),
        )
    else:
        rule = _collapsed_gauss_jacobi(q)
    logger.debug(f"Built quadrature rule of degree {q} with {rule.size} nodes")
    return rule


def triangle_area(tri: Triangle) -> float:
    """Area as |det A| / 2 of the map from the reference triangle"""
    matrix, _ = tri.affine_map()
    return 0.5 * abs(float(np.linalg.det(matrix)))


def integrate(f: BivariatePolynomial, tri: Triangle, q: int) -> float:
    """
    Integral of a polynomial over a triangle
    :param f: Integrand
    :param tri: Domain of integration
    :param q: Exactness degree of the rule, at least the degree of f
    """
    if q < f.degree:
        raise QuadratureDegreeError(f"Quadrature degree {q} below the polynomial degree {f.degree}")
    # Pull back to the reference triangle, avoids evaluating monomials far from the origin
    matrix, offset = tri.affine_map()
    u = f.compose_affine(matrix, offset)
    rule = rule_for_degree(max(q, MIN_DEGREE))
    values = u(rule.points[:, 0], rule.points[:, 1])
    return triangle_area(tri) * float(rule.weights @ values)


def integrate_function(func: Callable[[np.ndarray, np.ndarray], np.ndarray], tri: Triangle, q: int) -> float:
    """Approximate integral of a vectorized field func(x, y) over a triangle with the degree q rule"""
    rule = rule_for_degree(q)
    points = rule.physical_points(tri)
    values = np.asarray(func(points[:, 0], points[:, 1]), dtype=float)
    return triangle_area(tri) * float(rule.weights @ values)


@lru_cache(maxsize=None)
def barycentric_lattice(level: int) -> np.ndarray:
    """Points (i/level, j/level) with i + j <= level on the reference triangle, shape (n, 2)"""
    if level < 1:
        raise ValueError(f"Lattice level must be positive, got '{level}'")
    points = np.array([(i / level, j / level) for i in range(level + 1) for j in range(level + 1 - i)])
    return _freeze(points)
