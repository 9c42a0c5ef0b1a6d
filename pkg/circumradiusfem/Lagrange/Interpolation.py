"""
Module Interpolation: k-th order Lagrange interpolation on triangles

The interpolation nodes of order k are the points with barycentric coordinates gamma/k, |gamma| = k. The interpolant is
computed on the reference triangle in the Bernstein basis, whose nodal matrix depends on k only, and converted to
monomials afterwards. Error seminorms are evaluated from the residual in reference coordinates.
"""

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable
import math
import numpy as np
from scipy.linalg import lu_factor, lu_solve
from scipy.special import comb
from circumradiusfem.Base.Errors import ZeroSeminormError
from circumradiusfem.Geometry.Triangle import Triangle, triangle_metrics
from circumradiusfem.Quadrature.Polynomial import BivariatePolynomial, dimension
from circumradiusfem.Quadrature.Seminorm import (
    SeminormSpec,
    SeminormValue,
    evaluate_seminorm,
    physical_derivatives,
    reference_seminorm,
)
import logging.config
# Load logging configuration from file
logger = logging.getLogger(__name__)

Field = BivariatePolynomial | Callable[[np.ndarray, np.ndarray], np.ndarray]


def stencil_indices(k: int) -> tuple[tuple[int, int, int], ...]:
    """Barycentric multi-indices gamma, |gamma| = k, ordered by the exponent of lambda3, then of lambda2"""
    if k < 1:
        raise ValueError(f"Interpolation order must be at least 1, got '{k}'")
    return tuple((k - i - j, i, j) for j in range(k + 1) for i in range(k + 1 - j))


@dataclass(frozen=True, eq=False)
class Stencil:
    order: int
    indices: tuple[tuple[int, int, int], ...]
    points: np.ndarray = field(repr=False)  # Shape (n, 2), physical coordinates

    @property
    def size(self) -> int:
        return len(self.indices)

    @property
    def barycentric(self) -> np.ndarray:
        return np.array(self.indices, dtype=float) / self.order

    @property
    def reference_points(self) -> np.ndarray:
        """Nodes on the reference triangle, (lambda2, lambda3)"""
        return self.barycentric[:, 1:]


def stencil(k: int, tri: Triangle) -> Stencil:
    """
    Interpolation nodes of order k on a triangle
    :param k: Order, k >= 1
    :param tri: Triangle
    :return: Stencil with (k+1)(k+2)/2 nodes, the vertices v1, v2, v3 included
    """
    indices = stencil_indices(k)
    barycentric = np.array(indices, dtype=float) / k
    return Stencil(order=k, indices=indices, points=barycentric @ tri.vertices)


def _bernstein(gamma: tuple[int, int, int]) -> BivariatePolynomial:
    lambda1 = BivariatePolynomial([[1.0, -1.0], [-1.0, 0.0]])
    k = sum(gamma)
    coefficient = float(comb(k, gamma[0], exact=True) * comb(k - gamma[0], gamma[1], exact=True))
    return (lambda1 ** gamma[0]) * BivariatePolynomial.monomial(gamma[1], gamma[2], coefficient)


@lru_cache(maxsize=None)
def _bernstein_system(k: int) -> tuple[tuple, np.ndarray]:
    """LU factors of the nodal Bernstein matrix and the Bernstein-to-monomial conversion matrix"""
    indices = stencil_indices(k)
    basis = [_bernstein(gamma) for gamma in indices]
    nodes = np.array(indices, dtype=float)[:, 1:] / k
    nodal = np.column_stack([b(nodes[:, 0], nodes[:, 1]) for b in basis])
    conversion = np.column_stack([b.to_vector(k) for b in basis])
    logger.debug(f"Built Bernstein system of order {k}, condition number {np.linalg.cond(nodal):.3e}")
    return lu_factor(nodal), conversion


def interpolate_reference(values: np.ndarray, k: int) -> BivariatePolynomial:
    """Interpolant on the reference triangle from the values at the nodes in stencil order"""
    values = np.asarray(values, dtype=float)
    if values.shape != (dimension(k),):
        raise ValueError(f"Expected {dimension(k)} nodal values for order {k}, got shape {values.shape}")
    lu, conversion = _bernstein_system(k)
    return BivariatePolynomial.from_vector(conversion @ lu_solve(lu, values), k)


@dataclass(frozen=True, eq=False)
class InterpolationResult:
    order: int
    triangle: Triangle
    node_values: np.ndarray = field(repr=False)
    interpolant_reference: BivariatePolynomial  # I v in reference coordinates xi
    residual_reference: BivariatePolynomial | None  # v - I v in reference coordinates, polynomial fields only

    def _to_physical(self, u: BivariatePolynomial) -> BivariatePolynomial:
        matrix, offset = self.triangle.affine_map()
        inverse = np.linalg.inv(matrix)
        return u.compose_affine(inverse, -inverse @ offset)

    @cached_property
    def interpolant(self) -> BivariatePolynomial:
        """I v in physical coordinates"""
        return self._to_physical(self.interpolant_reference)

    @cached_property
    def residual(self) -> BivariatePolynomial | None:
        """v - I v in physical coordinates"""
        return None if self.residual_reference is None else self._to_physical(self.residual_reference)


def interpolate(v: Field, k: int, tri: Triangle) -> InterpolationResult:
    """
    Lagrange interpolation of order k
    :param v: BivariatePolynomial or vectorized field v(x, y)
    :param k: Order, k >= 1
    :param tri: Triangle
    """
    nodes = stencil(k, tri)
    if isinstance(v, BivariatePolynomial):
        matrix, offset = tri.affine_map()
        u = v.compose_affine(matrix, offset)
        values = u(nodes.reference_points[:, 0], nodes.reference_points[:, 1])
        interpolant = interpolate_reference(values, k)
        residual = u - interpolant
    else:
        values = np.asarray(v(nodes.points[:, 0], nodes.points[:, 1]), dtype=float)
        interpolant = interpolate_reference(values, k)
        residual = None
    return InterpolationResult(
        order=k,
        triangle=tri,
        node_values=values,
        interpolant_reference=interpolant,
        residual_reference=residual,
    )


def interp_error_value(v: BivariatePolynomial, k: int, m: int, p: float, tri: Triangle) -> SeminormValue:
    """|v - I^k v|_{m,p,K} with the exactness flag of the seminorm"""
    if not 0 <= m <= k:
        raise ValueError(f"Seminorm order must satisfy 0 <= m <= k, got m '{m}', k '{k}'")
    result = interpolate(v, k, tri)
    matrix, _ = tri.affine_map()
    derivatives = physical_derivatives(result.residual_reference, np.linalg.inv(matrix), m)
    return reference_seminorm(derivatives, SeminormSpec(order=m, p=p), abs(float(np.linalg.det(matrix))))


def interp_error(v: BivariatePolynomial, k: int, m: int, p: float, tri: Triangle) -> float:
    """
    Interpolation error seminorm |v - I^k v|_{m,p,K}
    :param v: Polynomial field
    :param k: Interpolation order
    :param m: Seminorm order, 0 <= m <= k
    :param p: Exponent, 1 <= p <= inf
    :param tri: Triangle K
    """
    return interp_error_value(v, k, m, p, tri).value


def circumradius_factor(k: int, m: int, tri: Triangle) -> float:
    """(R_K / h_K)^m h_K^(k+1-m)"""
    metrics = triangle_metrics(tri)
    return metrics.semiregularity ** m * metrics.diameter ** (k + 1 - m)


def classical_factor(k: int, m: int, tri: Triangle) -> float:
    """h_K^(k+1) / rho_K^m of the shape-regular estimate"""
    metrics = triangle_metrics(tri)
    return metrics.diameter ** (k + 1) / metrics.inradius ** m


def jamet_factor_bound(k: int, m: int, tri: Triangle) -> float:
    """(1 / cos(theta_max / 2))^m h_K^(k+1-m) of the maximum-angle estimate"""
    metrics = triangle_metrics(tri)
    return (1.0 / math.cos(metrics.max_angle / 2.0)) ** m * metrics.diameter ** (k + 1 - m)


def bound_ratio(v: BivariatePolynomial, k: int, m: int, p: float, tri: Triangle) -> float:
    """
    |v - I^k v|_{m,p,K} / ((R_K/h_K)^m h_K^(k+1-m) |v|_{k+1,p,K})
    :raises ZeroSeminormError: If |v|_{k+1,p,K} vanishes, e.g. for v in P_k
    """
    top = evaluate_seminorm(v, SeminormSpec(order=k + 1, p=p), tri).value
    if top == 0.0:
        raise ZeroSeminormError(f"|v|_({k + 1},{p}) vanishes, the bound ratio is undefined")
    return interp_error(v, k, m, p, tri) / (circumradius_factor(k, m, tri) * top)


def measure_interp_error(v: BivariatePolynomial, k: int, m: int, p: float, tri: Triangle) -> dict:
    """
    Error and predicted bounds on one triangle
    :return: Dict with keys 'h_K', 'R_K', 'rho_K', 'error', 'circumradius_bound', 'classical_bound',
        'jamet_bound', 'ratio', 'classical_ratio', 'approximate'
    """
    metrics = triangle_metrics(tri)
    error = interp_error_value(v, k, m, p, tri)
    top = evaluate_seminorm(v, SeminormSpec(order=k + 1, p=p), tri).value
    circumradius_bound = circumradius_factor(k, m, tri) * top
    classical_bound = classical_factor(k, m, tri) * top
    return {
        'h_K': metrics.diameter,
        'R_K': metrics.circumradius,
        'rho_K': metrics.inradius,
        'error': error.value,
        'circumradius_bound': circumradius_bound,
        'classical_bound': classical_bound,
        'jamet_bound': jamet_factor_bound(k, m, tri) * top,
        'ratio': error.value / circumradius_bound if circumradius_bound > 0.0 else None,
        'classical_ratio': error.value / classical_bound if classical_bound > 0.0 else None,
        'approximate': error.approximate,
    }
