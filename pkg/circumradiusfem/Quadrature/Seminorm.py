"""
Module Seminorm: Sobolev seminorms |v|_{m,p,K} of polynomial fields

The seminorm is weighted with the multinomial multiplicities m!/delta!, so that

    |v|_{m,p,K}^p = integral over K of sum_{|delta| = m} (m! / delta!) |d^delta v|^p

which equals the sum over all ordered m-tuples of coordinate directions. All evaluations pull v back to the reference
triangle through x = x1 + A xi and apply the physical derivatives as constant-coefficient operators in xi. For p = inf
the maximum of |d^delta v| over a barycentric lattice is taken.
"""

from dataclasses import dataclass
from math import factorial
import math
import numpy as np
from circumradiusfem.Geometry.Triangle import REFERENCE_TRIANGLE, Triangle, squeezed_triangle
from circumradiusfem.Quadrature.Polynomial import BivariatePolynomial
from circumradiusfem.Quadrature.QuadratureRule import rule_for_degree, barycentric_lattice, MAX_DEGREE
import logging.config
# Load logging configuration from file
logger = logging.getLogger(__name__)

# Lattice level of the p = inf evaluation, (level + 1)(level + 2)/2 sample points
INF_LATTICE_LEVEL = 40


@dataclass(frozen=True)
class SeminormSpec:
    order: int  # m
    p: float  # 1 <= p <= inf
    multinomial: bool = True  # Multiplicity weights m!/delta!, fixed on

    def __post_init__(self):
        if not isinstance(self.order, int | np.integer) or self.order < 0:
            raise ValueError(f"Seminorm order must be a non-negative integer, got '{self.order}'")
        if not self.p >= 1.0:
            raise ValueError(f"Seminorm exponent must satisfy p >= 1, got '{self.p}'")
        if not self.multinomial:
            raise ValueError("Only the multinomial-weighted seminorm is supported")

    @property
    def is_inf(self) -> bool:
        return math.isinf(self.p)

    @property
    def is_even_integer(self) -> bool:
        return not self.is_inf and float(self.p).is_integer() and int(self.p) % 2 == 0


@dataclass(frozen=True)
class SeminormValue:
    value: float
    approximate: bool  # True when the integrand is not a polynomial or the maximum is sampled


def multinomial_weight(delta: tuple[int, int]) -> int:
    """m! / (delta_1! delta_2!) with m = |delta|"""
    return factorial(delta[0] + delta[1]) // (factorial(delta[0]) * factorial(delta[1]))


def multi_indices(order: int) -> list[tuple[int, int]]:
    """All delta = (a, b) with a + b = order, a descending"""
    return [(order - b, b) for b in range(order + 1)]


def pullback(v: BivariatePolynomial, tri: Triangle) -> tuple[BivariatePolynomial, np.ndarray, float]:
    """
    Pull a polynomial back to the reference triangle
    :return: Tuple (u = v(x1 + A xi), inverse matrix B = A^-1, |det A|)
    """
    matrix, offset = tri.affine_map()
    return v.compose_affine(matrix, offset), np.linalg.inv(matrix), abs(float(np.linalg.det(matrix)))


def physical_derivatives(u: BivariatePolynomial, inverse: np.ndarray, order: int) -> dict:
    """
    Derivatives d^delta v, |delta| = order, of v = u(B (x - x1)) expressed as polynomials in xi
    :param u: Pulled back polynomial
    :param inverse: B = A^-1 of the affine map
    :param order: Derivative order m
    :return: Mapping {delta: polynomial in xi}
    """
    def d_x(w: BivariatePolynomial) -> BivariatePolynomial:
        return w.diff(1, 0) * float(inverse[0, 0]) + w.diff(0, 1) * float(inverse[1, 0])

    def d_y(w: BivariatePolynomial) -> BivariatePolynomial:
        return w.diff(1, 0) * float(inverse[0, 1]) + w.diff(0, 1) * float(inverse[1, 1])

    derivatives = {}
    w = u
    for b in range(order + 1):
        # d_y^b then d_x^(order - b); the operators commute
        current = w
        for _ in range(order - b):
            current = d_x(current)
        derivatives[(order - b, b)] = current
        w = d_y(w)
    return derivatives


def _quadrature_degree(spec: SeminormSpec, degree: int) -> tuple[int, bool]:
    if spec.is_even_integer:
        required, approximate = int(spec.p) * degree, False
    else:
        required, approximate = 2 * math.ceil(spec.p / 2.0) * degree + 4, True
    if required > MAX_DEGREE:
        logger.debug(f"Quadrature degree {required} clamped to {MAX_DEGREE}")
        return MAX_DEGREE, True
    return max(required, 1), approximate


def reference_seminorm(derivatives: dict, spec: SeminormSpec, jacobian: float) -> SeminormValue:
    """
    Seminorm from derivative polynomials on the reference triangle
    :param derivatives: Mapping {delta: polynomial in xi} with |delta| = spec.order
    :param spec: Order and exponent
    :param jacobian: |det A| of the map onto the physical triangle
    """
    degree = max(d.degree for d in derivatives.values())
    if all(d.is_zero() for d in derivatives.values()):
        return SeminormValue(0.0, False)
    if spec.is_inf:
        if degree <= 1:
            # Linear fields attain their maximum at vertices, which belong to the lattice
            points = barycentric_lattice(1)
        else:
            points = barycentric_lattice(INF_LATTICE_LEVEL)
        value = max(float(np.max(np.abs(d(points[:, 0], points[:, 1])))) for d in derivatives.values())
        return SeminormValue(value, degree > 1)
    q, approximate = _quadrature_degree(spec, degree)
    rule = rule_for_degree(q)
    xi, eta = rule.points[:, 0], rule.points[:, 1]
    integrand = np.zeros(rule.size)
    for delta, d in derivatives.items():
        integrand += multinomial_weight(delta) * np.abs(d(xi, eta)) ** spec.p
    integral = 0.5 * jacobian * float(rule.weights @ integrand)
    return SeminormValue(integral ** (1.0 / spec.p), approximate)


def evaluate_seminorm(v: BivariatePolynomial, spec: SeminormSpec, tri: Triangle) -> SeminormValue:
    """Seminorm |v|_{m,p,K} together with its exactness flag"""
    if spec.order > v.degree:
        return SeminormValue(0.0, False)
    u, inverse, jacobian = pullback(v, tri)
    result = reference_seminorm(physical_derivatives(u, inverse, spec.order), spec, jacobian)
    if result.approximate:
        logger.debug(f"Approximate seminorm |v|_({spec.order},{spec.p}) = {result.value}")
    return result


def seminorm(v: BivariatePolynomial, spec: SeminormSpec, tri: Triangle) -> float:
    """
    Multinomial-weighted Sobolev seminorm |v|_{m,p,K}
    :param v: Polynomial field in physical coordinates
    :param spec: Order m and exponent p
    :param tri: Triangle K
    :return: Seminorm value, exactly 0.0 when m exceeds the degree of v
    """
    return evaluate_seminorm(v, spec, tri).value


def transform_constant(k: int, p: float, n: int = 2) -> float:
    """n^(k mu(p)) with mu(p) = |1/p - 1/2|"""
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    return float(n) ** (k * abs(inv_p - 0.5))


def transform_bounds(v: BivariatePolynomial, k: int, p: float, tri: Triangle) -> tuple[float, float, float]:
    """
    Both sides of the affine transform inequality for u = v(x1 + A xi) on the reference triangle:

        c^-1 |det A|^(1/p) ||A||^-k |u|_{k,p} <= |v|_{k,p,K} <= c |det A|^(1/p) ||A^-1||^k |u|_{k,p}

    with c = 2^(k mu(p))
    :return: Tuple (lower bound, |v|_{k,p,K}, upper bound)
    """
    spec = SeminormSpec(order=k, p=p)
    matrix, offset = tri.affine_map()
    u = v.compose_affine(matrix, offset)
    value = seminorm(v, spec, tri)
    value_ref = seminorm(u, spec, REFERENCE_TRIANGLE)
    det_factor = abs(float(np.linalg.det(matrix))) ** (0.0 if math.isinf(p) else 1.0 / p)
    c = transform_constant(k, p)
    lower = value_ref * det_factor / (c * np.linalg.norm(matrix, 2) ** k)
    upper = value_ref * det_factor * c * np.linalg.norm(np.linalg.inv(matrix), 2) ** k
    return float(lower), value, float(upper)


def squeezing_ratio(
        u: BivariatePolynomial,
        order_numerator: int,
        order_denominator: int,
        p: float,
        alpha: float,
        beta: float,
) -> tuple[float, float]:
    """
    Seminorm ratio |v|_{m0,p}^p / |v|_{m1,p}^p on the squeezed triangle K_ab for v(x, y) = u(x/alpha, y/beta),
    computed twice: directly on K_ab, and on the reference triangle from the derivatives of u,

        |v|_{m,p}^p = alpha beta sum_{|delta| = m} (m!/delta!) alpha^(-p delta_1) beta^(-p delta_2) |d^delta u|_{0,p}^p

    :return: Tuple (direct ratio, ratio through the reference triangle)
    """
    if math.isinf(p):
        raise ValueError("Squeezing ratios are defined for finite p")
    k_ab = squeezed_triangle(alpha, beta)
    v = u.compose_affine(np.diag([1.0 / alpha, 1.0 / beta]))

    def direct(order: int) -> float:
        return seminorm(v, SeminormSpec(order=order, p=p), k_ab) ** p

    def reference(order: int) -> float:
        total = 0.0
        for delta in multi_indices(order):
            u_delta = u.diff(*delta)
            l_p = seminorm(u_delta, SeminormSpec(order=0, p=p), REFERENCE_TRIANGLE) ** p
            total += multinomial_weight(delta) * alpha ** (-p * delta[0]) * beta ** (-p * delta[1]) * l_p
        return alpha * beta * total

    return (
        direct(order_numerator) / direct(order_denominator),
        reference(order_numerator) / reference(order_denominator),
    )
