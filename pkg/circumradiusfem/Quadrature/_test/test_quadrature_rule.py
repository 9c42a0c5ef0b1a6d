from math import factorial

import numpy as np
import pytest

from circumradiusfem.Base.Errors import QuadratureDegreeError
from circumradiusfem.Geometry.Triangle import REFERENCE_TRIANGLE, Triangle
from circumradiusfem.Quadrature.Polynomial import BivariatePolynomial
from circumradiusfem.Quadrature.QuadratureRule import (
    barycentric_lattice,
    integrate,
    integrate_function,
    rule_for_degree,
)


def _reference_monomial_integral(i, j):
    return factorial(i) * factorial(j) / factorial(i + j + 2)


def test_centroid_rule():
    rule = rule_for_degree(1)
    assert rule.size == 1
    assert rule.weights[0] == 1.0
    assert np.allclose(rule.barycentric, 1.0 / 3.0)


@pytest.mark.parametrize("q", range(1, 26))
def test_rule_exactness(q):
    rule = rule_for_degree(q)
    assert rule.degree == q
    assert np.all(rule.weights > 0.0)
    assert np.sum(rule.weights) == pytest.approx(1.0, rel=1e-14)
    assert np.all(rule.barycentric > 0.0)
    assert np.allclose(np.sum(rule.barycentric, axis=1), 1.0, rtol=1e-15)
    xi, eta = rule.points[:, 0], rule.points[:, 1]
    for n in range(q + 1):
        for j in range(n + 1):
            i = n - j
            value = 0.5 * float(rule.weights @ (xi ** i * eta ** j))
            assert value == pytest.approx(_reference_monomial_integral(i, j), rel=1e-12)


@pytest.mark.parametrize("q", [0, 26, -3])
def test_unsupported_degree(q):
    with pytest.raises(QuadratureDegreeError):
        rule_for_degree(q)


def test_rules_are_shared():
    assert rule_for_degree(7) is rule_for_degree(7)


def test_integrate_examples():
    x = BivariatePolynomial.x()
    y = BivariatePolynomial.y()
    for q in (1, 2, 5):
        assert integrate(x, REFERENCE_TRIANGLE, q) == pytest.approx(1.0 / 6.0, rel=1e-14)
    assert integrate(x ** 2 * y ** 2, REFERENCE_TRIANGLE, 4) == pytest.approx(1.0 / 180.0, rel=1e-13)
    tri = Triangle((0.0, 0.0), (2.0, 0.0), (0.0, 2.0))
    assert integrate(x, tri, 1) == pytest.approx(4.0 / 3.0, rel=1e-14)


def test_integrate_constant_gives_area():
    tri = Triangle((0.3, -1.0), (2.5, 0.4), (-0.7, 1.9))
    matrix, _ = tri.affine_map()
    area = 0.5 * abs(np.linalg.det(matrix))
    assert integrate(BivariatePolynomial.constant(1.0), tri, 1) == pytest.approx(area, rel=1e-14)


def test_integrate_rejects_low_degree():
    with pytest.raises(QuadratureDegreeError):
        integrate(BivariatePolynomial.monomial(2, 1), REFERENCE_TRIANGLE, 2)


def test_integrate_function_matches_polynomial(rng):
    p = BivariatePolynomial.random(5, rng)
    tri = Triangle((1.0, 1.0), (3.0, 1.5), (1.2, 2.0))
    assert integrate_function(p, tri, 5) == pytest.approx(integrate(p, tri, 5), rel=1e-11)


def test_barycentric_lattice():
    points = barycentric_lattice(40)
    assert points.shape == (861, 2)
    assert np.all(points >= 0.0)
    assert np.all(points.sum(axis=1) <= 1.0 + 1e-15)
