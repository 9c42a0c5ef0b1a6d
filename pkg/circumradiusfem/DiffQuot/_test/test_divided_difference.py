import math

import numpy as np
import pytest

from circumradiusfem.DiffQuot.DividedDifference import (
    divided_difference,
    integral_representation_check,
    ordered_simplex_rule,
)
from circumradiusfem.Quadrature.Polynomial import BivariatePolynomial

X = BivariatePolynomial.x()


def test_square_on_three_nodes():
    table = divided_difference(lambda x: x ** 2, [0.0, 1.0, 2.0])
    assert table.top == pytest.approx(1.0, abs=1e-14)
    assert table.quotient(0, 1) == pytest.approx(1.0)
    assert table.quotient(1, 2) == pytest.approx(3.0)
    assert table.is_consistent()


def test_linear_has_vanishing_second_quotient():
    assert divided_difference(lambda x: 3.0 * x - 2.0, [0.3, 1.7, 2.2]).top == pytest.approx(0.0, abs=1e-14)


def test_cube_on_four_nodes():
    assert divided_difference(lambda x: x ** 3, [0.0, 1.0, 2.0, 3.0]).top == pytest.approx(1.0, abs=1e-13)


def test_leading_coefficient_property(rng):
    for n in range(1, 6):
        nodes = np.sort(rng.uniform(-1.0, 1.0, size=n + 1))
        assert divided_difference(lambda x: x ** n, nodes).top == pytest.approx(1.0, rel=1e-9)


def test_duplicate_nodes_rejected():
    with pytest.raises(ValueError):
        divided_difference(lambda x: x, [0.0, 1.0, 0.0])
    with pytest.raises(ValueError):
        divided_difference(lambda x: x, [])


def test_input_nodes_stay_writable():
    nodes = np.array([0.0, 0.5, 1.0])
    divided_difference(np.exp, nodes)
    nodes[0] = -1.0


@pytest.mark.parametrize("dim", [1, 2, 3, 4])
def test_ordered_simplex_rule(dim):
    points, weights = ordered_simplex_rule(dim, 6)
    assert weights.sum() == pytest.approx(1.0 / math.factorial(dim), rel=1e-14)
    assert np.all(np.diff(points, axis=1) <= 0.0)
    assert np.all((points >= 0.0) & (points <= 1.0))


@pytest.mark.parametrize(("f", "nodes"), [
    (X ** 2, [0.0, 1.0, 2.0]),
    (X, [0.25, 0.75]),
    (X ** 4, [0.0, 1.0, 2.0, 3.0, 4.0]),
])
def test_integral_representation_examples(f, nodes):
    result = integral_representation_check(f, nodes)
    assert result['divided_difference'] == pytest.approx(1.0, abs=1e-12)
    assert result['residual'] <= 1e-10


def test_integral_representation_random(rng):
    for _ in range(20):
        f = BivariatePolynomial.from_terms({(i, 0): c for i, c in enumerate(rng.standard_normal(7))})
        nodes = np.cumsum(rng.uniform(0.2, 0.6, size=rng.integers(2, 6)))
        assert integral_representation_check(f, nodes)['residual'] <= 1e-8


def test_integral_representation_requires_univariate():
    with pytest.raises(ValueError):
        integral_representation_check(X * BivariatePolynomial.y(), [0.0, 1.0])
