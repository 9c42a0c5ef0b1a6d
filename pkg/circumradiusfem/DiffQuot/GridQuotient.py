"""
Module GridQuotient: two-variable difference quotients on the reference stencil and box integrals

For nodes x_gamma = gamma/k of the reference triangle and a step delta = (t, s) the difference quotient is

    f^|delta|[x_gamma, x_(gamma+delta)]
        = k^|delta| sum_{eta <= delta} (-1)^(|delta|-|eta|) / (eta! (delta-eta)!) f(x_(gamma+eta))

and equals the integral of d^delta f over the box spanned by x_gamma and x_(gamma+delta), parameterized by iterated
simplex integrals in each direction. A box belongs to the reference triangle when all its corners are stencil nodes.
"""

from dataclasses import dataclass, field
from math import factorial
from typing import Callable
import numpy as np
from scipy.linalg import svdvals
from circumradiusfem.Base import Auxiliary
from circumradiusfem.Base.Errors import InfeasibleIndexError
from circumradiusfem.DiffQuot import DividedDifference
from circumradiusfem.Geometry.Triangle import REFERENCE_TRIANGLE
from circumradiusfem.Lagrange import Interpolation
from circumradiusfem.Quadrature.Polynomial import BivariatePolynomial, monomial_indices
import logging.config
# Load logging configuration from file
logger = logging.getLogger(__name__)

Index = tuple[int, int]

# Largest order of the exhaustive unisolvence sweep
MAX_SWEEP_ORDER = 5


def node(gamma: Index, k: int) -> tuple[float, float]:
    """Reference stencil node x_gamma = gamma / k"""
    return gamma[0] / k, gamma[1] / k


def _check_indices(k: int, gamma: Index, delta: Index):
    if k < 1:
        raise InfeasibleIndexError(f"Stencil order must be at least 1, got '{k}'")
    if min(gamma) < 0 or min(delta) < 0:
        raise InfeasibleIndexError(f"Multi-indices must be non-negative, got gamma {gamma}, delta {delta}")
    if sum(gamma) + sum(delta) > k:
        raise InfeasibleIndexError(
            f"Box from x_{gamma} with step {delta} leaves the order-{k} stencil, need |gamma| + |delta| <= {k}")


def lower_indices(delta: Index) -> list[Index]:
    """All eta <= delta componentwise"""
    return [(a, b) for a in range(delta[0] + 1) for b in range(delta[1] + 1)]


@dataclass(frozen=True)
class GridQuotient:
    order: int  # k
    base: Index  # gamma = (l, q)
    step: Index  # delta = (t, s)
    value: float


@dataclass(frozen=True)
class BoxDomain:
    order: int
    base: Index
    step: Index

    def __post_init__(self):
        _check_indices(self.order, self.base, self.step)
        if sum(self.step) < 1:
            raise InfeasibleIndexError(f"Box step must satisfy |delta| >= 1, got {self.step}")

    @property
    def corners(self) -> tuple[tuple[float, float], tuple[float, float]]:
        """Diagonal corners x_gamma and x_(gamma+delta)"""
        far = (self.base[0] + self.step[0], self.base[1] + self.step[1])
        return node(self.base, self.order), node(far, self.order)

    @property
    def is_segment(self) -> bool:
        return self.step[0] == 0 or self.step[1] == 0

    @property
    def corner_nodes(self) -> list[Index]:
        return [(self.base[0] + a, self.base[1] + b) for a, b in lower_indices(self.step)]


def boxes(k: int, delta: Index) -> list[BoxDomain]:
    """All boxes with step delta inside the reference triangle, bases ordered by total degree as the monomials"""
    room = k - sum(delta)
    if room < 0:
        return []
    return [BoxDomain(k, gamma, delta) for d in range(room + 1) for gamma in monomial_indices(d)]


def grid_quotient(f: Callable, k: int, gamma: Index, delta: Index) -> GridQuotient:
    """
    Difference quotient f^|delta|[x_gamma, x_(gamma+delta)] on the order-k reference stencil
    :param f: Field f(x, y), e.g. a BivariatePolynomial
    :param k: Stencil order
    :param gamma: Base multi-index (l, q)
    :param delta: Step multi-index (t, s)
    """
    _check_indices(k, gamma, delta)
    total = 0.0
    for eta in lower_indices(delta):
        sign = (-1) ** (sum(delta) - sum(eta))
        rest = (delta[0] - eta[0], delta[1] - eta[1])
        denominator = factorial(eta[0]) * factorial(eta[1]) * factorial(rest[0]) * factorial(rest[1])
        total += sign / denominator * float(f(*node((gamma[0] + eta[0], gamma[1] + eta[1]), k)))
    return GridQuotient(order=k, base=gamma, step=delta, value=k ** sum(delta) * total)


def recursive_quotient(f: Callable, k: int, gamma: Index, delta: Index) -> float:
    """The same quotient through one-step reductions along the first nonzero direction of delta"""
    _check_indices(k, gamma, delta)
    if sum(delta) == 0:
        return float(f(*node(gamma, k)))
    direction = 0 if delta[0] > 0 else 1
    eta = (1, 0) if direction == 0 else (0, 1)
    reduced = (delta[0] - eta[0], delta[1] - eta[1])
    shifted = (gamma[0] + eta[0], gamma[1] + eta[1])
    difference = recursive_quotient(f, k, shifted, reduced) - recursive_quotient(f, k, gamma, reduced)
    return k / delta[direction] * difference


def _direction_factor(exponent: int, start: float, steps: int, k: int) -> float:
    """Iterated simplex integral of (start + (w_1 + ... + w_steps)/k)^exponent, a point value for steps = 0"""
    if steps == 0:
        return start ** exponent
    # Antiderivative of order `steps` of x^exponent, its divided difference on the nodes start + j/k
    scale = factorial(exponent) / factorial(exponent + steps)
    nodes = [start + j / k for j in range(steps + 1)]
    return scale * DividedDifference.divided_difference(lambda x: x ** (exponent + steps), nodes).top


def box_integral(v: BivariatePolynomial, k: int, gamma: Index, delta: Index) -> float:
    """
    Integral of v over the box with base gamma and step delta, exact through monomial antiderivatives
    :param v: Polynomial field on the reference triangle
    :param k: Stencil order
    :param gamma: Base multi-index (l, q)
    :param delta: Step multi-index (t, s), a segment when t = 0 or s = 0
    """
    box = BoxDomain(k, gamma, delta)
    x0, y0 = box.corners[0]
    coefficients = v.coefficients
    total = 0.0
    for i, j in zip(*np.nonzero(coefficients)):
        x_factor = _direction_factor(int(i), x0, delta[0], k)
        y_factor = _direction_factor(int(j), y0, delta[1], k)
        total += float(coefficients[i, j]) * x_factor * y_factor
    return total


def box_integral_quadrature(v: Callable, k: int, gamma: Index, delta: Index, degree: int = 12) -> float:
    """Integral of a field over the box by tensorized ordered-simplex quadrature"""
    box = BoxDomain(k, gamma, delta)
    x0, y0 = box.corners[0]

    def direction(start: float, steps: int) -> tuple[np.ndarray, np.ndarray]:
        if steps == 0:
            return np.array([start]), np.array([1.0])
        points, weights = DividedDifference.ordered_simplex_rule(steps, degree)
        return start + points.sum(axis=1) / k, weights

    xs, wx = direction(x0, delta[0])
    ys, wy = direction(y0, delta[1])
    xx, yy = np.meshgrid(xs, ys, indexing='ij')
    values = np.asarray(v(xx, yy), dtype=float) * np.ones_like(xx)
    return float(wx @ values @ wy)


def quotient_box_residual(f: BivariatePolynomial, k: int, gamma: Index, delta: Index) -> float:
    """|f^|delta|[x_gamma, x_(gamma+delta)] - integral of d^delta f over the box|"""
    return abs(grid_quotient(f, k, gamma, delta).value - box_integral(f.diff(*delta), k, gamma, delta))


def feasible_pairs(k: int) -> list[tuple[Index, Index]]:
    """All (gamma, delta) with |delta| >= 1 and |gamma| + |delta| <= k"""
    return [
        (gamma, delta)
        for total in range(1, k + 1) for delta in monomial_indices(total)
        for d in range(k - total + 1) for gamma in monomial_indices(d)
    ]


def residual_vanishing(v: BivariatePolynomial, k: int) -> float:
    """
    Largest |quotient| and |box integral of d^delta u| of the residual u = v - I^k v over all boxes in the reference
    triangle; both vanish identically
    """
    u = Interpolation.interpolate(v, k, REFERENCE_TRIANGLE).residual_reference
    largest = 0.0
    for gamma, delta in feasible_pairs(k):
        quotient = grid_quotient(u, k, gamma, delta).value
        integral = box_integral(u.diff(*delta), k, gamma, delta)
        largest = max(largest, abs(quotient), abs(integral))
    return largest


@dataclass(frozen=True, eq=False)
class UnisolvenceSystem:
    order: int
    step: Index
    boxes: tuple[Index, ...]  # Base indices of the rows
    columns: tuple[Index, ...]  # Monomial exponents of P_(k - |step|)
    matrix: np.ndarray = field(repr=False)
    singular_values: np.ndarray = field(repr=False)

    @property
    def is_square(self) -> bool:
        return self.matrix.shape[0] == self.matrix.shape[1]

    @property
    def nonsingular(self) -> bool:
        return self.is_square and bool(self.singular_values[-1] > 1e-10 * self.singular_values[0])


def unisolvence_matrix(k: int, gamma: Index) -> UnisolvenceSystem:
    """
    Box-integral functionals with step gamma applied to the monomials of P_(k - |gamma|); for |gamma| = 0 the
    functionals are the point evaluations at the stencil nodes
    :param k: Stencil order
    :param gamma: Step multi-index with |gamma| <= k
    """
    if min(gamma) < 0 or sum(gamma) > k:
        raise InfeasibleIndexError(f"Expected a non-negative multi-index with |gamma| <= {k}, got {gamma}")
    degree = k - sum(gamma)
    columns = [e for d in range(degree + 1) for e in monomial_indices(d)]
    bases = [b for d in range(degree + 1) for b in monomial_indices(d)]
    monomials = [BivariatePolynomial.monomial(*e) for e in columns]
    if sum(gamma) == 0:
        matrix = np.array([[float(q(*node(b, k))) for q in monomials] for b in bases])
    else:
        matrix = np.array([[box_integral(q, k, b, gamma) for q in monomials] for b in bases])
    return UnisolvenceSystem(
        order=k,
        step=gamma,
        boxes=tuple(bases),
        columns=tuple(columns),
        matrix=matrix,
        singular_values=svdvals(matrix),
    )


def _check(name: str, detail: str, error: float, tolerance: float) -> dict:
    return {
        'check': name,
        'detail': detail,
        'max_error': error,
        'tolerance': tolerance,
        'passed': bool(error <= tolerance),
    }


def run_identity_suite(seed: int = Auxiliary.DEFAULT_SEED, max_order: int = MAX_SWEEP_ORDER,
                       max_workers: int | None = None) -> list[dict]:
    """
    Divided difference and box integral identities, one row per check with keys 'check', 'detail', 'max_error' and
    'passed'
    """
    x = BivariatePolynomial.x()
    y = BivariatePolynomial.y()
    rows = []

    # One-variable divided differences
    for f, nodes in ((x ** 2, [0.0, 1.0, 2.0]), (x ** 3, [0.0, 1.0, 2.0, 3.0]), (x ** 4, [0.0, 1.0, 2.0, 3.0, 4.0])):
        result = DividedDifference.integral_representation_check(f, nodes)
        error = max(abs(result['divided_difference'] - 1.0), result['residual'])
        rows.append(_check('integral-representation', f"x^{f.degree} on {len(nodes)} nodes", error, 1e-10))

    # Quotient / box duality and recursion on random polynomials
    generators = Auxiliary.spawn_generators(seed, max_order)

    def duality(k: int) -> list[dict]:
        f = BivariatePolynomial.random(k + 2, generators[k - 1])
        scale = f.max_abs_coefficient() * k ** k
        pairs = feasible_pairs(k)
        duality_error = max(quotient_box_residual(f, k, g, d) for g, d in pairs)
        recursion_error = max(abs(grid_quotient(f, k, g, d).value - recursive_quotient(f, k, g, d)) for g, d in pairs)
        quadrature_error = max(abs(box_integral(f, k, g, d) - box_integral_quadrature(f, k, g, d)) for g, d in pairs)
        return [
            _check('quotient-box-duality', f"k={k}", duality_error / scale, 1e-10),
            _check('recursion', f"k={k}", recursion_error / scale, 1e-10),
            _check('box-quadrature', f"k={k}", quadrature_error / f.max_abs_coefficient(), 1e-10),
        ]

    for result in Auxiliary.parallel_map(duality, range(1, max_order + 1), max_workers):
        rows.extend(result)

    # Residuals of interpolation
    for v, k in ((x ** 3, 2), (x ** 2 * y ** 2, 3), (x + 2.0 * y, 1)):
        rows.append(_check('residual-vanishing', f"{v} k={k}", residual_vanishing(v, k) / v.max_abs_coefficient(),
                           1e-10))

    # Unisolvence of the box functionals
    def unisolvence(k: int) -> list[dict]:
        return [
            _check('unisolvence', f"k={k} gamma={gamma}", 0.0 if unisolvence_matrix(k, gamma).nonsingular else 1.0, 0.0)
            for d in range(k + 1) for gamma in monomial_indices(d)
        ]

    for result in Auxiliary.parallel_map(unisolvence, range(1, max_order + 1), max_workers):
        rows.extend(result)

    failed = [r for r in rows if not r['passed']]
    logger.info(f"Identity suite: {len(rows) - len(failed)} of {len(rows)} check(s) passed")
    for r in failed:
        logger.warning(f"Identity check failed: {r['check']} ({r['detail']}), error {r['max_error']}")
    return rows
