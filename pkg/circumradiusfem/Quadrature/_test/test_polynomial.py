import numpy as np
import pytest

from circumradiusfem.Quadrature.Polynomial import BivariatePolynomial, dimension, monomial_indices

X = BivariatePolynomial.x()
Y = BivariatePolynomial.y()


def test_monomial_indices_count():
    for degree in range(8):
        assert len(monomial_indices(degree)) == dimension(degree) == (degree + 1) * (degree + 2) // 2


def test_arithmetic_is_exact():
    square = (X + Y) ** 2
    assert square.allclose(BivariatePolynomial.from_terms({(2, 0): 1.0, (1, 1): 2.0, (0, 2): 1.0}), rtol=0.0)
    assert (square - square).is_zero()
    assert (3.0 * X - X * 3.0).is_zero()
    assert (1 + X).coefficients[0, 0] == 1.0


def test_degree_is_trimmed():
    p = BivariatePolynomial.from_terms({(3, 0): 1.0, (0, 1): 2.0})
    assert p.degree == 3
    assert (p - BivariatePolynomial.monomial(3, 0)).degree == 1
    assert BivariatePolynomial.zero().degree == 0


def test_differentiation():
    p = BivariatePolynomial.monomial(3, 2)
    assert p.diff(1, 0).allclose(BivariatePolynomial.monomial(2, 2, 3.0), rtol=0.0)
    assert p.diff(0, 2).allclose(BivariatePolynomial.monomial(3, 0, 2.0), rtol=0.0)
    assert p.diff(2, 1).allclose(BivariatePolynomial.monomial(1, 1, 12.0), rtol=0.0)
    assert p.diff(4, 0).is_zero()
    assert p.diff(0, 3).is_zero()


def test_antiderivative_inverts_derivative(rng):
    p = BivariatePolynomial.random(4, rng)
    assert p.integ(1, 1).diff(1, 1).allclose(p, rtol=1e-14)
    assert p.integ(2, 0).diff(2, 0).allclose(p, rtol=1e-14)


def test_evaluation_matches_monomial_sum(rng):
    p = BivariatePolynomial.random(6, rng)
    points = rng.uniform(-2.0, 2.0, size=(50, 2))
    expected = np.array([
        sum(p.coefficients[i, j] * x ** i * y ** j for i, j in monomial_indices(6)) for x, y in points
    ])
    scale = np.max(np.abs(expected))
    assert np.max(np.abs(p(points[:, 0], points[:, 1]) - expected)) <= 1e-13 * scale


def test_vector_conversion(rng):
    vector = rng.standard_normal(dimension(3))
    p = BivariatePolynomial.from_vector(vector, 3)
    assert np.array_equal(p.to_vector(3), vector)
    assert p.to_vector(5).shape == (dimension(5),)
    with pytest.raises(ValueError):
        p.to_vector(2)


def test_compose_affine(rng):
    p = BivariatePolynomial.random(4, rng)
    matrix = rng.standard_normal((2, 2))
    offset = rng.standard_normal(2)
    u = p.compose_affine(matrix, offset)
    xi = rng.uniform(0.0, 1.0, size=(30, 2))
    x = xi @ matrix.T + offset
    direct = p(x[:, 0], x[:, 1])
    assert np.allclose(u(xi[:, 0], xi[:, 1]), direct, rtol=1e-11, atol=1e-11 * np.max(np.abs(direct)))


def test_invalid_input():
    with pytest.raises(ValueError):
        BivariatePolynomial([[np.nan]])
    with pytest.raises(ValueError):
        BivariatePolynomial.monomial(-1, 0)
    with pytest.raises(ValueError):
        X ** -1
