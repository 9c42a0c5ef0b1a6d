"""
Module Polynomial: dense bivariate polynomials

A polynomial of total degree d is stored as a coefficient array c of shape (d+1, d+1), c[i, j] multiplying x^i y^j.
Entries with i + j > d are zero. Arithmetic and differentiation act on the coefficients only and are exact up to the
rounding of the coefficient operations themselves.
"""

from typing import Iterable
import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.signal import convolve2d
import logging.config
# Load logging configuration from file
logger = logging.getLogger(__name__)


def monomial_indices(degree: int) -> list[tuple[int, int]]:
    """Exponents (i, j) with i + j <= degree, graded by total degree, x-power descending within a degree"""
    if degree < 0:
        return []
    return [(n - j, j) for n in range(degree + 1) for j in range(n + 1)]


def dimension(degree: int) -> int:
    """Dimension of P_degree in two variables"""
    return 0 if degree < 0 else (degree + 1) * (degree + 2) // 2


class BivariatePolynomial:
    __slots__ = ('_coefficients',)

    def __init__(self, coefficients):
        """
        Polynomial from a square coefficient array
        :param coefficients: Array-like of shape (n, n), entry [i, j] is the coefficient of x^i y^j
        """
        c = np.atleast_2d(np.asarray(coefficients, dtype=float))
        if c.ndim != 2:
            raise ValueError(f"Coefficient array must be two-dimensional, got shape {c.shape}")
        n = max(c.shape)
        padded = np.zeros((n, n))
        padded[:c.shape[0], :c.shape[1]] = c
        if not np.all(np.isfinite(padded)):
            raise ValueError("Coefficient array contains non-finite values")
        # Total degree of the nonzero part
        i, j = np.nonzero(padded)
        degree = int(np.max(i + j)) if i.size else 0
        trimmed = np.zeros((degree + 1, degree + 1))
        keep = (i + j) <= degree
        trimmed[i[keep], j[keep]] = padded[i[keep], j[keep]]
        trimmed.setflags(write=False)
        self._coefficients = trimmed

    # -- constructors -------------------------------------------------------------------------------------------------
    @classmethod
    def zero(cls) -> 'BivariatePolynomial':
        return cls([[0.0]])

    @classmethod
    def constant(cls, value: float) -> 'BivariatePolynomial':
        return cls([[value]])

    @classmethod
    def monomial(cls, i: int, j: int, coefficient: float = 1.0) -> 'BivariatePolynomial':
        """coefficient * x^i y^j"""
        if i < 0 or j < 0:
            raise ValueError(f"Exponents must be non-negative, got ({i}, {j})")
        c = np.zeros((i + j + 1, i + j + 1))
        c[i, j] = coefficient
        return cls(c)

    @classmethod
    def from_terms(cls, terms: dict[tuple[int, int], float]) -> 'BivariatePolynomial':
        """Polynomial from a mapping {(i, j): coefficient}"""
        if not terms:
            return cls.zero()
        degree = max(i + j for i, j in terms)
        c = np.zeros((degree + 1, degree + 1))
        for (i, j), value in terms.items():
            c[i, j] += value
        return cls(c)

    @classmethod
    def from_vector(cls, vector: Iterable[float], degree: int) -> 'BivariatePolynomial':
        """Polynomial from coefficients in the order of monomial_indices(degree)"""
        vector = np.asarray(list(vector), dtype=float)
        indices = monomial_indices(degree)
        if vector.shape != (len(indices),):
            raise ValueError(f"Expected {len(indices)} coefficients for degree {degree}, got {vector.shape}")
        c = np.zeros((degree + 1, degree + 1))
        for (i, j), value in zip(indices, vector):
            c[i, j] = value
        return cls(c)

    @classmethod
    def random(cls, degree: int, rng: np.random.Generator) -> 'BivariatePolynomial':
        """Polynomial with standard normal coefficients on all monomials of total degree <= degree"""
        return cls.from_vector(rng.standard_normal(dimension(degree)), degree)

    @classmethod
    def x(cls) -> 'BivariatePolynomial':
        return cls.monomial(1, 0)

    @classmethod
    def y(cls) -> 'BivariatePolynomial':
        return cls.monomial(0, 1)

    # -- properties ---------------------------------------------------------------------------------------------------
    @property
    def coefficients(self) -> np.ndarray:
        return self._coefficients

    @property
    def degree(self) -> int:
        """Total degree, 0 for constants including the zero polynomial"""
        return self._coefficients.shape[0] - 1

    def is_zero(self) -> bool:
        return not np.any(self._coefficients)

    def to_vector(self, degree: int | None = None) -> np.ndarray:
        """Coefficients in the order of monomial_indices(degree), degree defaults to the own degree"""
        degree = self.degree if degree is None else degree
        if degree < self.degree and np.any(self._truncation_rest(degree)):
            raise ValueError(f"Polynomial of degree {self.degree} does not fit into degree {degree}")
        n = self._coefficients.shape[0]
        return np.array([self._coefficients[i, j] if i < n and j < n else 0.0 for i, j in monomial_indices(degree)])

    def _truncation_rest(self, degree: int) -> np.ndarray:
        i, j = np.indices(self._coefficients.shape)
        return self._coefficients[(i + j) > degree]

    def max_abs_coefficient(self) -> float:
        return float(np.max(np.abs(self._coefficients)))

    # -- arithmetic ---------------------------------------------------------------------------------------------------
    def _padded(self, size: int) -> np.ndarray:
        c = np.zeros((size, size))
        n = self._coefficients.shape[0]
        c[:n, :n] = self._coefficients
        return c

    def __add__(self, other) -> 'BivariatePolynomial':
        if isinstance(other, int | float | np.floating):
            other = BivariatePolynomial.constant(float(other))
        if not isinstance(other, BivariatePolynomial):
            return NotImplemented
        size = max(self._coefficients.shape[0], other._coefficients.shape[0])
        return BivariatePolynomial(self._padded(size) + other._padded(size))

    __radd__ = __add__

    def __neg__(self) -> 'BivariatePolynomial':
        return BivariatePolynomial(-self._coefficients)

    def __sub__(self, other) -> 'BivariatePolynomial':
        return self + (-other)

    def __rsub__(self, other) -> 'BivariatePolynomial':
        return (-self) + other

    def __mul__(self, other) -> 'BivariatePolynomial':
        if isinstance(other, int | float | np.floating):
            return BivariatePolynomial(self._coefficients * float(other))
        if not isinstance(other, BivariatePolynomial):
            return NotImplemented
        return BivariatePolynomial(convolve2d(self._coefficients, other._coefficients))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> 'BivariatePolynomial':
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError(f"Exponent must be a non-negative integer, got '{exponent}'")
        result = BivariatePolynomial.constant(1.0)
        for _ in range(exponent):
            result = result * self
        return result

    # -- calculus -----------------------------------------------------------------------------------------------------
    def diff(self, dx: int = 0, dy: int = 0) -> 'BivariatePolynomial':
        """Partial derivative d^(dx+dy) / dx^dx dy^dy"""
        if dx < 0 or dy < 0:
            raise ValueError(f"Derivative orders must be non-negative, got ({dx}, {dy})")
        c = np.array(self._coefficients)
        if dx:
            c = npoly.polyder(c, m=dx, axis=0) if dx < c.shape[0] else np.zeros((1, c.shape[1]))
        if dy:
            c = npoly.polyder(c, m=dy, axis=1) if dy < c.shape[1] else np.zeros((c.shape[0], 1))
        return BivariatePolynomial(c)

    def integ(self, dx: int = 0, dy: int = 0) -> 'BivariatePolynomial':
        """Antiderivative of order dx in x and dy in y with zero integration constants at the origin"""
        c = np.array(self._coefficients)
        if dx:
            c = npoly.polyint(c, m=dx, axis=0)
        if dy:
            c = npoly.polyint(c, m=dy, axis=1)
        return BivariatePolynomial(c)

    def __call__(self, x, y):
        """Evaluate at scalar or array arguments"""
        return npoly.polyval2d(x, y, self._coefficients)

    def compose_affine(self, matrix, offset=(0.0, 0.0)) -> 'BivariatePolynomial':
        """
        Pull back under an affine map, the result u satisfies u(xi) = self(offset + matrix @ xi)
        :param matrix: 2x2 matrix of the linear part
        :param offset: Translation of the map
        """
        matrix = np.asarray(matrix, dtype=float)
        b = np.asarray(offset, dtype=float)
        x_map = BivariatePolynomial([[b[0], matrix[0, 1]], [matrix[0, 0], 0.0]])
        y_map = BivariatePolynomial([[b[1], matrix[1, 1]], [matrix[1, 0], 0.0]])
        d = self.degree
        x_powers = [BivariatePolynomial.constant(1.0)]
        y_powers = [BivariatePolynomial.constant(1.0)]
        for _ in range(d):
            x_powers.append(x_powers[-1] * x_map)
            y_powers.append(y_powers[-1] * y_map)
        result = BivariatePolynomial.zero()
        for i, j in zip(*np.nonzero(self._coefficients)):
            result = result + (x_powers[i] * y_powers[j]) * float(self._coefficients[i, j])
        return result

    def allclose(self, other: 'BivariatePolynomial', rtol: float = 1e-10, atol: float = 0.0) -> bool:
        """Coefficient-wise comparison, relative to the larger coefficient magnitude of both"""
        size = max(self._coefficients.shape[0], other._coefficients.shape[0])
        a, b = self._padded(size), other._padded(size)
        scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))))
        return bool(np.max(np.abs(a - b)) <= atol + rtol * scale)

    def __repr__(self) -> str:
        terms = [
            f"{self._coefficients[i, j]:+.6g}*x^{i}*y^{j}"
            for i, j in monomial_indices(self.degree) if self._coefficients[i, j] != 0.0
        ]
        return f"BivariatePolynomial({' '.join(terms) if terms else '0'})"
