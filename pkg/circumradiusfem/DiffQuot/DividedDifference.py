"""
Module DividedDifference: one-variable divided differences and their representation as iterated simplex integrals

    f[x_0, ..., x_n] = integral over 1 >= t_1 >= ... >= t_n >= 0 of f^(n)(x_0 + sum_i t_i (x_i - x_(i-1)))
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable
import numpy as np
from scipy.special import roots_jacobi
from circumradiusfem.Quadrature.Polynomial import BivariatePolynomial
import logging.config
# Load logging configuration from file
logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DividedDifferenceTable:
    nodes: np.ndarray = field(repr=False)
    table: np.ndarray = field(repr=False)  # table[i, j] = f[x_i, ..., x_j] for i <= j, nan below the diagonal

    @property
    def order(self) -> int:
        return self.nodes.shape[0] - 1

    @property
    def top(self) -> float:
        """f[x_0, ..., x_n]"""
        return float(self.table[0, -1])

    def quotient(self, i: int, j: int) -> float:
        if not 0 <= i <= j <= self.order:
            raise ValueError(f"Expected 0 <= i <= j <= {self.order}, got i '{i}', j '{j}'")
        return float(self.table[i, j])

    def is_consistent(self, rtol: float = 1e-12) -> bool:
        """Every entry reproduces the recursion from its two neighbours"""
        for width in range(1, self.order + 1):
            for i in range(self.order + 1 - width):
                j = i + width
                expected = (self.table[i + 1, j] - self.table[i, j - 1]) / (self.nodes[j] - self.nodes[i])
                scale = max(abs(expected), abs(self.table[i + 1, j]), abs(self.table[i, j - 1]), 1e-300)
                if abs(self.table[i, j] - expected) > rtol * scale:
                    return False
        return True


def divided_difference(f: Callable, nodes) -> DividedDifferenceTable:
    """
    Triangular table of divided differences
    :param f: Function of one variable, vectorized over numpy arrays
    :param nodes: Pairwise distinct nodes x_0, ..., x_n
    """
    nodes = np.array(nodes, dtype=float)
    if nodes.ndim != 1 or nodes.shape[0] == 0:
        raise ValueError(f"Expected a non-empty list of nodes, got shape {nodes.shape}")
    if np.unique(nodes).shape[0] != nodes.shape[0]:
        raise ValueError(f"Nodes must be pairwise distinct, got {nodes.tolist()}")
    n = nodes.shape[0]
    table = np.full((n, n), np.nan)
    table[np.arange(n), np.arange(n)] = np.asarray(f(nodes), dtype=float)
    for width in range(1, n):
        for i in range(n - width):
            j = i + width
            table[i, j] = (table[i + 1, j] - table[i, j - 1]) / (nodes[j] - nodes[i])
    nodes.setflags(write=False)
    table.setflags(write=False)
    return DividedDifferenceTable(nodes=nodes, table=table)


@lru_cache(maxsize=None)
def ordered_simplex_rule(dim: int, degree: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Product Gauss-Jacobi rule on the ordered simplex 1 >= t_1 >= ... >= t_dim >= 0 through t_i = u_1 ... u_i
    :param dim: Dimension, >= 1
    :param degree: Exactness degree in t
    :return: Tuple (points of shape (n, dim), weights summing to 1/dim!)
    """
    if dim < 1:
        raise ValueError(f"Simplex dimension must be positive, got '{dim}'")
    n = degree // 2 + 1
    factors = []
    for j in range(dim):
        # Jacobian factor u_j^(dim - 1 - j) is absorbed into the Jacobi weight (1 + x)^a
        a = dim - 1 - j
        x, w = roots_jacobi(n, 0.0, float(a))
        factors.append((0.5 * (1.0 + x), w / 2.0 ** (a + 1)))
    grids = np.meshgrid(*[u for u, _ in factors], indexing='ij')
    weight_grids = np.meshgrid(*[w for _, w in factors], indexing='ij')
    u = np.column_stack([g.ravel() for g in grids])
    weights = np.prod(np.column_stack([g.ravel() for g in weight_grids]), axis=1)
    points = np.cumprod(u, axis=1)
    points.setflags(write=False)
    weights.setflags(write=False)
    return points, weights


def _univariate(f: BivariatePolynomial) -> BivariatePolynomial:
    if not f.diff(0, 1).is_zero():
        raise ValueError(f"Expected a polynomial in x only, got {f}")
    return f


def simplex_integral(f: BivariatePolynomial, nodes) -> float:
    """Iterated simplex integral of f^(n) along the nodes x_0, ..., x_n, n >= 1"""
    f = _univariate(f)
    nodes = np.asarray(nodes, dtype=float)
    n = nodes.shape[0] - 1
    if n < 1:
        raise ValueError("At least two nodes are required")
    derivative = f.diff(n, 0)
    points, weights = ordered_simplex_rule(n, max(derivative.degree, 1))
    arguments = nodes[0] + points @ np.diff(nodes)
    return float(weights @ derivative(arguments, np.zeros_like(arguments)))


def integral_representation_check(f: BivariatePolynomial, nodes) -> dict:
    """
    Both sides of the integral representation of the divided difference of a polynomial
    :return: Dict with 'divided_difference', 'integral' and 'residual'
    """
    f = _univariate(f)
    top = divided_difference(lambda x: f(x, np.zeros_like(x)), nodes).top
    integral = simplex_integral(f, nodes)
    return {'divided_difference': top, 'integral': integral, 'residual': abs(top - integral)}
