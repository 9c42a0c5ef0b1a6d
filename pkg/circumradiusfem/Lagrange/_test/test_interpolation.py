import math

import numpy as np
import pytest

from circumradiusfem.Base.Errors import ZeroSeminormError
from circumradiusfem.Geometry.Triangle import REFERENCE_TRIANGLE, Triangle, kobayashi_constant, triangle_metrics
from circumradiusfem.Lagrange.Interpolation import (
    bound_ratio,
    circumradius_factor,
    classical_factor,
    interp_error,
    interp_error_value,
    interpolate,
    measure_interp_error,
    stencil,
)
from circumradiusfem.Lagrange.RandomTriangles import random_triangle
from circumradiusfem.Quadrature.Polynomial import BivariatePolynomial
from circumradiusfem.Quadrature.Seminorm import SeminormSpec, seminorm

X = BivariatePolynomial.x()
Y = BivariatePolynomial.y()
EQUILATERAL = Triangle((0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3.0) / 2.0))


def _well_shaped_triangle(rng):
    while True:
        tri = Triangle.from_array(rng.uniform(-1.0, 1.0, size=(3, 2)))
        metrics = triangle_metrics(tri)
        if metrics.min_angle > 0.2 and metrics.max_angle < math.pi - 0.2:
            return tri


# {{{ stencil

@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_stencil_count_and_containment(k):
    tri = Triangle((0.2, 0.1), (1.5, 0.3), (0.4, 1.2))
    nodes = stencil(k, tri)
    assert nodes.size == (k + 1) * (k + 2) // 2
    assert all(sum(gamma) == k for gamma in nodes.indices)
    assert np.all(nodes.barycentric >= 0.0)
    assert np.allclose(nodes.barycentric @ tri.vertices, nodes.points)


def test_stencil_order_one_is_vertex_set():
    tri = Triangle((0.2, 0.1), (1.5, 0.3), (0.4, 1.2))
    assert np.array_equal(stencil(1, tri).points, tri.vertices)


def test_stencil_order_two_has_midpoints():
    points = {tuple(p) for p in stencil(2, REFERENCE_TRIANGLE).points}
    assert points == {(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.5, 0.0), (0.0, 0.5), (0.5, 0.5)}


def test_stencil_order_three_on_reference():
    points = stencil(3, REFERENCE_TRIANGLE).points
    expected = {(i, j) for i in range(4) for j in range(4 - i)}
    assert {(round(3 * x), round(3 * y)) for x, y in points} == expected
    assert np.allclose(3.0 * points, np.round(3.0 * points), atol=1e-14)

# }}}


# {{{ interpolation

def test_linear_interpolant_of_square():
    result = interpolate(X ** 2, 1, REFERENCE_TRIANGLE)
    assert result.interpolant.allclose(X, rtol=0.0, atol=1e-14)


def test_quadratic_interpolant_of_cube_matches_nodes():
    result = interpolate(X ** 3, 2, REFERENCE_TRIANGLE)
    nodes = stencil(2, REFERENCE_TRIANGLE).points
    assert np.allclose(result.interpolant(nodes[:, 0], nodes[:, 1]), nodes[:, 0] ** 3, atol=1e-14)
    assert result.interpolant.degree <= 2


def test_callable_field():
    result = interpolate(lambda x, y: np.exp(x) * np.cos(y), 2, REFERENCE_TRIANGLE)
    nodes = stencil(2, REFERENCE_TRIANGLE).points
    expected = np.exp(nodes[:, 0]) * np.cos(nodes[:, 1])
    assert np.allclose(result.interpolant(nodes[:, 0], nodes[:, 1]), expected, atol=1e-13)
    assert result.residual is None


@pytest.mark.parametrize("k", [1, 2, 3])
def test_unisolvence(rng, k):
    for _ in range(20):
        tri = _well_shaped_triangle(rng)
        w = BivariatePolynomial.random(k, rng)
        assert interpolate(w, k, tri).interpolant.allclose(w, rtol=1e-9)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_residual_vanishes_on_stencil(rng, k):
    for _ in range(50):
        tri = random_triangle(rng)
        v = BivariatePolynomial.random(k + 2, rng)
        result = interpolate(v, k, tri)
        nodes = stencil(k, tri).reference_points
        scale = np.max(np.abs(result.node_values))
        residual = result.residual_reference(nodes[:, 0], nodes[:, 1])
        assert np.max(np.abs(residual)) <= 1e-10 * scale

# }}}


# {{{ interpolation error

def test_error_of_polynomial_in_pk_vanishes(rng):
    tri = _well_shaped_triangle(rng)
    w = BivariatePolynomial.random(2, rng)
    scale = seminorm(w, SeminormSpec(1, 2.0), tri)
    assert interp_error(w, 2, 1, 2.0, tri) <= 1e-12 * scale


def test_l2_error_of_paraboloid():
    # v - I v = x^2 - x + y^2 - y on the reference triangle, its squared integral is 11/180
    assert interp_error(X ** 2 + Y ** 2, 1, 0, 2.0, REFERENCE_TRIANGLE) == pytest.approx(
        math.sqrt(11.0 / 180.0), rel=1e-13)


def test_kobayashi_bound_on_reference():
    v = X ** 2 + 3.0 * X * Y - Y ** 2
    top = seminorm(v, SeminormSpec(2, 2.0), REFERENCE_TRIANGLE)
    assert interp_error(v, 1, 1, 2.0, REFERENCE_TRIANGLE) <= kobayashi_constant(REFERENCE_TRIANGLE) * top


def test_error_order_is_validated():
    with pytest.raises(ValueError):
        interp_error(X ** 3, 1, 2, 2.0, REFERENCE_TRIANGLE)


def test_approximate_flag():
    assert not interp_error_value(X ** 3, 1, 1, 2.0, REFERENCE_TRIANGLE).approximate
    assert interp_error_value(X ** 3, 1, 1, 1.0, REFERENCE_TRIANGLE).approximate

# }}}


# {{{ bound ratio

def test_bound_ratio_rejects_pk():
    with pytest.raises(ZeroSeminormError):
        bound_ratio(X + Y, 1, 1, 2.0, REFERENCE_TRIANGLE)
    with pytest.raises(ZeroDivisionError):
        bound_ratio(X ** 2, 2, 1, 2.0, REFERENCE_TRIANGLE)


def test_bound_ratio_equilateral_cubic():
    ratio = bound_ratio(X ** 3, 2, 1, 2.0, EQUILATERAL)
    assert math.isfinite(ratio)
    assert ratio > 0.0


def test_factors():
    metrics = triangle_metrics(EQUILATERAL)
    assert circumradius_factor(1, 1, EQUILATERAL) == pytest.approx(metrics.circumradius)
    assert classical_factor(1, 1, EQUILATERAL) == pytest.approx(1.0 / metrics.inradius)


def test_measure_interp_error_columns():
    row = measure_interp_error(X ** 2 + Y ** 2, 1, 1, 2.0, REFERENCE_TRIANGLE)
    assert row['ratio'] == pytest.approx(row['error'] / row['circumradius_bound'])
    assert row['error'] <= row['classical_bound']
    assert row['approximate'] is False

# }}}
