"""
Module BabuskaAziz: Babuska-Aziz type constants

B_p^{m,k}(K) = sup |v|_{m,p,K} / |v|_{k+1,p,K} over v vanishing at the order-k interpolation nodes of K. The supremum is
approximated from below over polynomials of degree <= N: for p = 2 by a generalized symmetric eigenproblem on seminorm
Gram matrices, otherwise by multi-start ascent of the quotient. Only lower bounds are produced.
"""

from dataclasses import dataclass, field
from functools import cached_property
import math
import numpy as np
from scipy.linalg import eigh, qr
from scipy.optimize import bisect
from circumradiusfem.Base import Auxiliary
from circumradiusfem.Base.Errors import EmptySubspaceError
from circumradiusfem.Geometry.Triangle import (
    REFERENCE_TRIANGLE,
    Triangle,
    kobayashi_constant,
    squeezed_triangle,
    triangle_metrics,
)
from circumradiusfem.Lagrange import Interpolation
from circumradiusfem.Quadrature.Polynomial import BivariatePolynomial, monomial_indices
from circumradiusfem.Quadrature.QuadratureRule import MAX_DEGREE, barycentric_lattice, rule_for_degree
from circumradiusfem.Quadrature.Seminorm import SeminormSpec, multinomial_weight, physical_derivatives, seminorm
import logging.config
# Load logging configuration from file
logger = logging.getLogger(__name__)

KINDS = ('exact-root', 'rayleigh-lower-bound', 'sampled-lower-bound')

# Relative threshold below which eigenvalues of the denominator Gram matrix are deflated
DEFLATION_TOLERANCE = 1e-12

# Multi-start ascent for p != 2
ASCENT_STARTS = 32
ASCENT_ITERATIONS = 500

# Lattice level of the p = inf quotient
INF_LATTICE_LEVEL = 20

# Largest trial degree N, the p = 2 Gram matrices integrate products of degree 2N exactly
MAX_BASIS_DEGREE = MAX_DEGREE // 2


def babuska_aziz_A2() -> float:
    """
    Largest x > 0 solving 1/x + tan(1/x) = 0, i.e. 1/t* for the smallest root t* of t + tan(t) = 0 in (pi/2, pi)
    :return: A_2 = 0.49291...
    """
    t_star = bisect(lambda t: t + math.tan(t), math.pi / 2.0 + 1e-9, math.pi - 1e-9, xtol=1e-14, rtol=1e-15)
    logger.debug(f"Root of t + tan(t): {t_star}")
    return 1.0 / t_star


@dataclass(frozen=True, eq=False)
class ConstantEstimate:
    value: float
    kind: str  # One of KINDS
    basis_degree: int | None
    k: int
    m: int
    p: float
    triangle: Triangle | None
    converged: bool = True
    maximizer_reference: BivariatePolynomial | None = field(default=None, repr=False)  # In reference coordinates

    @cached_property
    def maximizer(self) -> BivariatePolynomial | None:
        """Maximizing polynomial in physical coordinates"""
        if self.maximizer_reference is None or self.triangle is None:
            return None
        matrix, offset = self.triangle.affine_map()
        inverse = np.linalg.inv(matrix)
        return self.maximizer_reference.compose_affine(inverse, -inverse @ offset)

    def as_dict(self) -> dict:
        return {
            'k': self.k,
            'm': self.m,
            'p': self.p,
            'basis_degree': self.basis_degree,
            'value': self.value,
            'kind': self.kind,
            'converged': self.converged,
        }


def babuska_aziz_A2_estimate() -> ConstantEstimate:
    """A_2 = B_2^{1,1} of the reference triangle as a ConstantEstimate of kind 'exact-root'"""
    return ConstantEstimate(
        value=babuska_aziz_A2(),
        kind='exact-root',
        basis_degree=None,
        k=1,
        m=1,
        p=2.0,
        triangle=REFERENCE_TRIANGLE,
    )


def _reference_basis(degree: int) -> list[BivariatePolynomial]:
    """Monomials xi^i eta^j, i + j <= degree"""
    return [BivariatePolynomial.monomial(i, j) for d in range(degree + 1) for i, j in monomial_indices(d)]


def _constraint_null_space(k: int, basis: list[BivariatePolynomial]) -> np.ndarray:
    """Orthonormal coefficient vectors of the basis combinations vanishing at the order-k nodes"""
    nodes = Interpolation.stencil(k, REFERENCE_TRIANGLE).reference_points
    evaluation = np.column_stack([b(nodes[:, 0], nodes[:, 1]) for b in basis])
    q, r, _ = qr(evaluation.T, pivoting=True)
    diagonal = np.abs(np.diag(r))
    rank = int(np.sum(diagonal > 1e-12 * diagonal[0]))
    return q[:, rank:]


def _derivative_matrices(basis: list[BivariatePolynomial], inverse: np.ndarray, order: int, points: np.ndarray) -> dict:
    """{delta: matrix of d^delta of every basis function at the points}, shape (points, basis)"""
    columns = [physical_derivatives(b, inverse, order) for b in basis]
    return {
        delta: np.column_stack([c[delta](points[:, 0], points[:, 1]) for c in columns])
        for delta in columns[0].keys()
    }


def _gram(derivatives: dict, weights: np.ndarray, jacobian: float) -> np.ndarray:
    gram = sum(multinomial_weight(delta) * (d.T * weights) @ d for delta, d in derivatives.items())
    return 0.5 * jacobian * gram


def _validate(k: int, m: int, basis_degree: int):
    if k < 1:
        raise ValueError(f"Interpolation order must be at least 1, got '{k}'")
    if not 0 <= m <= k:
        raise ValueError(f"Seminorm order must satisfy 0 <= m <= k, got m '{m}', k '{k}'")
    if basis_degree > MAX_BASIS_DEGREE:
        raise ValueError(f"Basis degree must be at most {MAX_BASIS_DEGREE}, got '{basis_degree}'")
    if basis_degree <= k:
        raise EmptySubspaceError(
            f"Polynomials of degree {basis_degree} vanishing at the order-{k} nodes are all zero, need N >= {k + 1}")


def _rayleigh_estimate(k: int, m: int, tri: Triangle, basis_degree: int) -> ConstantEstimate:
    basis = _reference_basis(basis_degree)
    null_space = _constraint_null_space(k, basis)
    matrix, _ = tri.affine_map()
    inverse = np.linalg.inv(matrix)
    jacobian = abs(float(np.linalg.det(matrix)))
    rule = rule_for_degree(2 * basis_degree)
    numerator_gram = _gram(_derivative_matrices(basis, inverse, m, rule.points), rule.weights, jacobian)
    denominator_gram = _gram(_derivative_matrices(basis, inverse, k + 1, rule.points), rule.weights, jacobian)
    numerator = null_space.T @ numerator_gram @ null_space
    denominator = null_space.T @ denominator_gram @ null_space

    # Deflate near-null directions of the denominator, then solve the standard eigenproblem in its eigenbasis
    eigenvalues, eigenvectors = eigh(denominator)
    keep = eigenvalues > DEFLATION_TOLERANCE * np.sum(np.abs(eigenvalues))
    if np.count_nonzero(~keep):
        logger.debug(f"Deflated {np.count_nonzero(~keep)} direction(s) of the denominator Gram matrix")
    whitening = eigenvectors[:, keep] / np.sqrt(eigenvalues[keep])
    reduced = whitening.T @ numerator @ whitening
    values, vectors = eigh(0.5 * (reduced + reduced.T))
    coefficients = null_space @ (whitening @ vectors[:, -1])
    maximizer = BivariatePolynomial.zero()
    for c, b in zip(coefficients, basis):
        maximizer = maximizer + b * float(c)
    return ConstantEstimate(
        value=math.sqrt(max(float(values[-1]), 0.0)),
        kind='rayleigh-lower-bound',
        basis_degree=basis_degree,
        k=k,
        m=m,
        p=2.0,
        triangle=tri,
        maximizer_reference=maximizer,
    )


class _DiscreteQuotient:
    """|v|_{m,p} / |v|_{k+1,p} on the constrained subspace, sampled on quadrature points or a lattice for p = inf"""
    def __init__(self, k: int, m: int, p: float, tri: Triangle, basis_degree: int):
        basis = _reference_basis(basis_degree)
        null_space = _constraint_null_space(k, basis)
        matrix, _ = tri.affine_map()
        inverse = np.linalg.inv(matrix)
        self.p = p
        self.jacobian = abs(float(np.linalg.det(matrix)))
        if math.isinf(p):
            points = barycentric_lattice(INF_LATTICE_LEVEL)
            self.weights = None
        else:
            rule = rule_for_degree(min(MAX_DEGREE, math.ceil(p) * basis_degree + 4))
            points, self.weights = rule.points, rule.weights
        self.numerator = self._restricted(basis, null_space, inverse, m, points)
        self.denominator = self._restricted(basis, null_space, inverse, k + 1, points)
        self.basis = basis
        self.null_space = null_space

    @staticmethod
    def _restricted(basis, null_space, inverse, order, points) -> list[tuple[int, np.ndarray]]:
        return [(multinomial_weight(delta), d @ null_space)
                for delta, d in _derivative_matrices(basis, inverse, order, points).items()]

    @property
    def dimension(self) -> int:
        return self.null_space.shape[1]

    def _power_and_gradient(self, operators, z: np.ndarray) -> tuple[float, np.ndarray]:
        """(|v|^p, gradient of |v|^p) for finite p, (|v|, subgradient) for p = inf"""
        if math.isinf(self.p):
            best, gradient = -1.0, np.zeros_like(z)
            for _, d in operators:
                values = d @ z
                i = int(np.argmax(np.abs(values)))
                if abs(values[i]) > best:
                    best, gradient = abs(values[i]), np.sign(values[i]) * d[i]
            return best, gradient
        total, gradient = 0.0, np.zeros_like(z)
        for weight, d in operators:
            values = d @ z
            magnitude = np.abs(values)
            total += weight * float(self.weights @ magnitude ** self.p)
            gradient += weight * self.p * d.T @ (self.weights * magnitude ** (self.p - 1.0) * np.sign(values))
        scale = 0.5 * self.jacobian
        return scale * total, scale * gradient

    def log_quotient(self, z: np.ndarray) -> tuple[float, np.ndarray]:
        """log of the quotient and its gradient in the subspace coordinates"""
        exponent = 1.0 if math.isinf(self.p) else self.p
        top, top_gradient = self._power_and_gradient(self.numerator, z)
        bottom, bottom_gradient = self._power_and_gradient(self.denominator, z)
        if top <= 0.0:
            return -math.inf, bottom_gradient * 0.0
        value = (math.log(top) - math.log(bottom)) / exponent
        return value, (top_gradient / top - bottom_gradient / bottom) / exponent

    def polynomial(self, z: np.ndarray) -> BivariatePolynomial:
        result = BivariatePolynomial.zero()
        for c, b in zip(self.null_space @ z, self.basis):
            result = result + b * float(c)
        return result


def _ascend(quotient: _DiscreteQuotient, z: np.ndarray, iterations: int) -> tuple[float, np.ndarray, bool]:
    """Normalized gradient ascent on the unit sphere with step doubling and halving"""
    z = z / np.linalg.norm(z)
    value, gradient = quotient.log_quotient(z)
    step = 0.5
    for _ in range(iterations):
        gradient = gradient - (gradient @ z) * z
        norm = np.linalg.norm(gradient)
        if norm < 1e-12 or step < 1e-10:
            return value, z, True
        candidate = z + step * gradient / norm
        candidate /= np.linalg.norm(candidate)
        candidate_value, candidate_gradient = quotient.log_quotient(candidate)
        if candidate_value > value:
            z, value, gradient = candidate, candidate_value, candidate_gradient
            step *= 1.5
        else:
            step *= 0.5
    return value, z, False


def _ascent_estimate(
        k: int,
        m: int,
        p: float,
        tri: Triangle,
        basis_degree: int,
        starts: int,
        iterations: int,
        seed: int,
) -> ConstantEstimate:
    quotient = _DiscreteQuotient(k, m, p, tri, basis_degree)
    best_value, best_z, converged = -math.inf, None, True
    for rng in Auxiliary.spawn_generators(seed, starts):
        value, z, start_converged = _ascend(quotient, rng.standard_normal(quotient.dimension), iterations)
        if value > best_value:
            best_value, best_z, converged = value, z, start_converged
    if not converged:
        logger.warning(f"Ascent for B_{p}^({m},{k}) did not converge within {iterations} iterations, "
                       f"keeping the best value found")
    return ConstantEstimate(
        value=math.exp(best_value),
        kind='sampled-lower-bound',
        basis_degree=basis_degree,
        k=k,
        m=m,
        p=p,
        triangle=tri,
        converged=converged,
        maximizer_reference=quotient.polynomial(best_z),
    )


def estimate_B(
        k: int,
        m: int,
        p: float,
        tri: Triangle,
        basis_degree: int,
        starts: int = ASCENT_STARTS,
        iterations: int = ASCENT_ITERATIONS,
        seed: int = Auxiliary.DEFAULT_SEED,
) -> ConstantEstimate:
    """
    Lower bound of B_p^{m,k}(K) over polynomials of degree <= N vanishing at the order-k interpolation nodes
    :param k: Interpolation order
    :param m: Numerator seminorm order, 0 <= m <= k
    :param p: Exponent, 1 <= p <= inf
    :param tri: Triangle K
    :param basis_degree: Polynomial degree N, N >= k + 1
    :param starts: Number of random starts of the ascent (p != 2)
    :param iterations: Iteration cap per start (p != 2)
    :param seed: Master seed of the starting points (p != 2)
    """
    _validate(k, m, basis_degree)
    if p == 2.0:
        estimate = _rayleigh_estimate(k, m, tri, basis_degree)
    else:
        estimate = _ascent_estimate(k, m, p, tri, basis_degree, starts, iterations, seed)
    logger.debug(f"B_{p}^({m},{k}) >= {estimate.value} with N = {basis_degree}")
    return estimate


def A_tilde_2(basis_degree: int = 8) -> ConstantEstimate:
    """Lower bound of B_2^{0,1} on the reference triangle, |v|_0 <= A_tilde_2 |v|_2 for v vanishing at the vertices"""
    return estimate_B(1, 0, 2.0, REFERENCE_TRIANGLE, basis_degree)


def squeeze_scaling_check(
        k: int,
        m: int,
        p: float,
        pairs: list[tuple[float, float]],
        basis_degree: int,
        max_workers: int | None = None,
) -> list[dict]:
    """
    Estimates on squeezed triangles K_ab normalized by max(alpha, beta)^(k+1-m)
    :param pairs: (alpha, beta) with max(alpha, beta) <= 1
    :return: One dict per pair with 'alpha', 'beta', 'estimate', 'normalized', 'reference' (value at (1, 1)),
        'below_reference' and 'within_factor' (normalized values agree within a factor 1.5)
    """
    for alpha, beta in pairs:
        if max(alpha, beta) > 1.0:
            raise ValueError(f"Squeezing factors must satisfy max(alpha, beta) <= 1, got ({alpha}, {beta})")
    reference = estimate_B(k, m, p, REFERENCE_TRIANGLE, basis_degree).value

    def row(pair: tuple[float, float]) -> dict:
        alpha, beta = pair
        estimate = estimate_B(k, m, p, squeezed_triangle(alpha, beta), basis_degree)
        normalized = estimate.value / max(alpha, beta) ** (k + 1 - m)
        return {
            'alpha': alpha,
            'beta': beta,
            'estimate': estimate.value,
            'normalized': normalized,
            'reference': reference,
            'below_reference': normalized <= reference * (1.0 + 1e-6),
        }

    rows = Auxiliary.parallel_map(row, pairs, max_workers)
    normalized = [r['normalized'] for r in rows]
    within_factor = min(normalized) > 0.0 and max(normalized) <= 1.5 * min(normalized)
    for r in rows:
        r['within_factor'] = within_factor
    logger.info(f"Squeezing check k={k}, m={m}, p={p}: normalized values in "
                f"[{min(normalized):.6g}, {max(normalized):.6g}], reference {reference:.6g}")
    return rows


def corollary_error_check(
        k: int,
        m: int,
        p: float,
        alpha: float,
        beta: float,
        trials: int,
        basis_degree: int = 6,
        margin: float = 0.5,
        seed: int = Auxiliary.DEFAULT_SEED,
        constant: float | None = None,
) -> dict:
    """
    Interpolation errors of random polynomials on K_ab against max(alpha, beta)^(k+1-m) C |v|_{k+1,p}
    :param constant: Reference constant C, if None, A_2 for (k, m, p) = (1, 1, 2), otherwise the estimate on the
        reference triangle enlarged by the margin
    :return: Dict with 'trials', 'violations', 'constant' and 'max_ratio' (largest error over bound)
    """
    tri = squeezed_triangle(alpha, beta)
    scale = max(alpha, beta) ** (k + 1 - m)
    if constant is not None:
        if constant <= 0.0:
            raise ValueError(f"Reference constant must be positive, got '{constant}'")
    elif (k, m, p) == (1, 1, 2.0):
        constant = babuska_aziz_A2_estimate().value
    else:
        constant = (1.0 + margin) * estimate_B(k, m, p, REFERENCE_TRIANGLE, basis_degree).value
    violations, max_ratio = 0, 0.0
    for rng in Auxiliary.spawn_generators(seed, trials):
        v = BivariatePolynomial.random(min(basis_degree, k + 2), rng)
        top = seminorm(v, SeminormSpec(order=k + 1, p=p), tri)
        if top == 0.0:
            continue
        ratio = Interpolation.interp_error(v, k, m, p, tri) / (scale * constant * top)
        max_ratio = max(max_ratio, ratio)
        if ratio > 1.0 + 1e-10:
            violations += 1
    logger.info(f"Corollary check k={k}, m={m}, p={p}, ({alpha}, {beta}): {violations} violation(s) in {trials} "
                f"trial(s), max ratio {max_ratio:.6f}")
    return {'trials': trials, 'violations': violations, 'constant': constant, 'max_ratio': max_ratio}


def kobayashi_comparison(tri: Triangle, basis_degree: int = 8) -> dict:
    """Kobayashi constant C(K), circumradius R_K and the lower bound of B_2^{1,1}(K) side by side"""
    c_k = kobayashi_constant(tri)
    r_k = triangle_metrics(tri).circumradius
    b_estimate = estimate_B(1, 1, 2.0, tri, basis_degree).value
    return {
        'C_K': c_k,
        'R_K': r_k,
        'B_estimate': b_estimate,
        'holds': b_estimate <= c_k * (1.0 + 1e-6) and c_k < r_k,
    }


if __name__ == '__main__':
    print(f"A_2 = {babuska_aziz_A2()}")
    for _n in (4, 6, 8):
        print(estimate_B(1, 1, 2.0, REFERENCE_TRIANGLE, _n))
