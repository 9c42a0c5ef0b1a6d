import numpy as np
import pytest

from circumradiusfem.Base.Errors import InfeasibleIndexError
from circumradiusfem.DiffQuot.GridQuotient import (
    BoxDomain,
    box_integral,
    box_integral_quadrature,
    boxes,
    feasible_pairs,
    grid_quotient,
    quotient_box_residual,
    recursive_quotient,
    residual_vanishing,
    run_identity_suite,
    unisolvence_matrix,
)
from circumradiusfem.Quadrature.Polynomial import BivariatePolynomial

X = BivariatePolynomial.x()
Y = BivariatePolynomial.y()
ONE = BivariatePolynomial.constant(1.0)


def _q(coefficients: dict) -> BivariatePolynomial:
    return BivariatePolynomial.from_terms(coefficients)


# {{{ quotients

def test_mixed_quotient_formula(rng):
    f = BivariatePolynomial.random(4, rng)
    for k in (2, 3, 5):
        expected = k ** 2 * (f(1 / k, 1 / k) - f(1 / k, 0.0) - f(0.0, 1 / k) + f(0.0, 0.0))
        assert grid_quotient(f, k, (0, 0), (1, 1)).value == pytest.approx(expected, rel=1e-12)


def test_constant_quotients_vanish():
    for gamma, delta in feasible_pairs(4):
        assert grid_quotient(ONE * 2.5, 4, gamma, delta).value == pytest.approx(0.0, abs=1e-12)


def test_xy_mixed_quotient():
    assert grid_quotient(X * Y, 2, (0, 0), (1, 1)).value == pytest.approx(1.0, abs=1e-14)


def test_second_quotient_in_x():
    f = X ** 2
    # k^2/2 (f(x_2) - 2 f(x_1) + f(x_0)) of x^2 is 1
    assert grid_quotient(f, 3, (0, 1), (2, 0)).value == pytest.approx(1.0, abs=1e-13)


def test_recursion(rng):
    f = BivariatePolynomial.random(5, rng)
    for gamma, delta in feasible_pairs(4):
        assert recursive_quotient(f, 4, gamma, delta) == pytest.approx(grid_quotient(f, 4, gamma, delta).value,
                                                                       rel=1e-9, abs=1e-9)


def test_infeasible_indices():
    with pytest.raises(InfeasibleIndexError):
        grid_quotient(X, 2, (1, 1), (1, 0))
    with pytest.raises(InfeasibleIndexError):
        grid_quotient(X, 2, (-1, 0), (1, 0))
    with pytest.raises(ValueError):
        BoxDomain(3, (0, 0), (0, 0))

# }}}


# {{{ boxes

def test_box_domain_geometry():
    square = BoxDomain(4, (1, 0), (1, 1))
    assert square.corners == ((0.25, 0.0), (0.5, 0.25))
    assert not square.is_segment
    assert len(square.corner_nodes) == 4
    assert BoxDomain(4, (0, 0), (2, 0)).is_segment


def test_box_counts():
    assert len(boxes(4, (1, 1))) == 6
    assert len(boxes(4, (2, 0))) == 6
    assert boxes(2, (2, 1)) == []


def test_box_integral_order_two():
    a, b, c = 1.3, -0.7, 2.9
    q = _q({(0, 0): a, (1, 0): b, (0, 1): c})
    assert box_integral(q, 2, (0, 0), (1, 0)) == pytest.approx(a + b / 4.0, abs=1e-14)
    assert box_integral(q, 2, (1, 0), (1, 0)) == pytest.approx(a + 3.0 * b / 4.0, abs=1e-14)
    assert box_integral(q, 2, (0, 1), (1, 0)) == pytest.approx(a + b / 4.0 + c / 2.0, abs=1e-14)


def test_box_integral_order_three():
    a, b, c, d, e, f = 0.5, 1.5, -2.0, 3.0, 0.25, -1.25
    q = _q({(0, 0): a, (1, 0): b, (0, 1): c, (2, 0): d, (0, 2): e, (1, 1): f})
    expected = {
        (0, 0): a + b / 6.0 + d / 27.0,
        (1, 0): a + b / 2.0 + 7.0 * d / 27.0,
        (2, 0): a + 5.0 * b / 6.0 + 19.0 * d / 27.0,
        (0, 1): a + b / 6.0 + c / 3.0 + d / 27.0 + e / 9.0 + f / 18.0,
        (1, 1): a + b / 2.0 + c / 3.0 + 7.0 * d / 27.0 + e / 9.0 + f / 6.0,
        (0, 2): a + b / 6.0 + 2.0 * c / 3.0 + d / 27.0 + 4.0 * e / 9.0 + f / 9.0,
    }
    for gamma, value in expected.items():
        assert box_integral(q, 3, gamma, (1, 0)) == pytest.approx(value, abs=1e-14)


def test_box_integral_matches_quadrature(rng):
    f = BivariatePolynomial.random(6, rng)
    for gamma, delta in feasible_pairs(5):
        assert box_integral_quadrature(f, 5, gamma, delta) == pytest.approx(box_integral(f, 5, gamma, delta),
                                                                            rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_quotient_box_duality(rng, k):
    f = BivariatePolynomial.random(k + 2, rng)
    for gamma, delta in feasible_pairs(k):
        assert quotient_box_residual(f, k, gamma, delta) <= 1e-10 * k ** k * f.max_abs_coefficient()


def test_duality_through_antiderivative(rng):
    v = BivariatePolynomial.random(3, rng)
    for gamma, delta in feasible_pairs(4):
        big_f = v.integ(*delta)
        assert grid_quotient(big_f, 4, gamma, delta).value == pytest.approx(box_integral(v, 4, gamma, delta),
                                                                            rel=1e-9, abs=1e-10)

# }}}


# {{{ residuals and unisolvence

@pytest.mark.parametrize(("v", "k"), [(X + Y, 1), (X ** 2 - X * Y, 2), (X ** 3, 2), (X ** 2 * Y ** 2, 3)])
def test_residual_vanishing(v, k):
    assert residual_vanishing(v, k) <= 1e-10 * v.max_abs_coefficient()


def test_unisolvence_order_two():
    system = unisolvence_matrix(2, (1, 0))
    expected = np.array([[1.0, 0.25, 0.0], [1.0, 0.75, 0.0], [1.0, 0.25, 0.5]])
    assert np.allclose(system.matrix, expected, atol=1e-14)
    assert system.nonsingular


def test_unisolvence_six_squares():
    system = unisolvence_matrix(4, (1, 1))
    assert system.matrix.shape == (6, 6)
    assert system.nonsingular


def test_unisolvence_order_three_has_trivial_kernel():
    system = unisolvence_matrix(3, (1, 0))
    assert system.matrix.shape == (6, 6)
    assert system.nonsingular
    assert np.allclose(np.linalg.solve(system.matrix, np.zeros(6)), 0.0)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_unisolvence_sweep(k):
    for d in range(k + 1):
        for i in range(d + 1):
            system = unisolvence_matrix(k, (d - i, i))
            assert system.is_square
            assert system.nonsingular


def test_unisolvence_rejects_large_step():
    with pytest.raises(InfeasibleIndexError):
        unisolvence_matrix(2, (2, 1))


def test_identity_suite_passes():
    rows = run_identity_suite(max_order=4)
    assert rows
    assert all(row['passed'] for row in rows), [row for row in rows if not row['passed']]

# }}}
