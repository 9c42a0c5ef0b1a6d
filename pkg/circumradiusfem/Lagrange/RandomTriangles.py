"""
Module RandomTriangles: seeded random triangles and the degenerate triangle families

Random triangles are drawn in the standard-position parameterization (0,0), (1,0), r (cos theta, sin theta) with the
ratio r = beta/alpha log-uniform and theta uniform, followed by a random rotation, scaling and translation. The families
degenerate as h -> 0 with maximum angle tending to pi. R_K tends to zero on the left and right families, the right-flat
family keeps R_K bounded away from zero while R_K h_K tends to zero.
"""

import math
import numpy as np
from circumradiusfem.Base.Errors import DegenerateTriangleError
from circumradiusfem.Geometry.Triangle import Triangle
import logging.config
# Load logging configuration from file
logger = logging.getLogger(__name__)

# Parameter ranges of the random triangle generator
RATIO_MIN = 1e-4
THETA_MIN = math.pi / 3.0
THETA_MAX = math.pi - 1e-3
SCALE_RANGE = (0.1, 10.0)
TRANSLATION_RANGE = (-1.0, 1.0)

FAMILIES = ('random', 'example1-left', 'example1-right', 'example1-right-flat')

# Default exponents of the families: left (h/2, h^a), right and right-flat (h^a, h^b)
DEFAULT_LEFT_EXPONENT = 1.5
DEFAULT_RIGHT_EXPONENTS = (1.2, 1.9)
DEFAULT_FLAT_EXPONENTS = (1.2, 2.6)


def random_triangle(
        rng: np.random.Generator,
        ratio_min: float = RATIO_MIN,
        theta_max: float = THETA_MAX,
        rigid_motion: bool = True,
) -> Triangle:
    """
    Random triangle stressing degeneracy
    :param rng: Random generator
    :param ratio_min: Lower end of the log-uniform ratio beta/alpha
    :param theta_max: Upper end of the uniform angle at the origin
    :param rigid_motion: If True, apply a random rotation, log-uniform scaling and translation
    """
    if not 0.0 < ratio_min <= 1.0:
        raise ValueError(f"ratio_min must lie in (0, 1], got '{ratio_min}'")
    if not THETA_MIN < theta_max < math.pi:
        raise ValueError(f"theta_max must lie in (pi/3, pi), got '{theta_max}'")
    while True:
        ratio = math.exp(rng.uniform(math.log(ratio_min), 0.0))
        theta = rng.uniform(THETA_MIN, theta_max)
        vertices = np.array([[0.0, 0.0], [1.0, 0.0], [ratio * math.cos(theta), ratio * math.sin(theta)]])
        if rigid_motion:
            angle = rng.uniform(0.0, 2.0 * math.pi)
            rotation = np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])
            scale = math.exp(rng.uniform(math.log(SCALE_RANGE[0]), math.log(SCALE_RANGE[1])))
            vertices = scale * vertices @ rotation.T + rng.uniform(*TRANSLATION_RANGE, size=2)
        try:
            return Triangle.from_array(vertices)
        except DegenerateTriangleError:
            logger.debug(f"Rejected degenerate random triangle {vertices.tolist()}")


def example1_left(h: float, a: float = DEFAULT_LEFT_EXPONENT) -> Triangle:
    """Isosceles triangle (0,0), (h,0), (h/2, h^a), R_K = h^a/2 + h^(2-a)/8"""
    if not 0.0 < h < 1.0:
        raise ValueError(f"h must lie in (0, 1), got '{h}'")
    return Triangle((0.0, 0.0), (h, 0.0), (h / 2.0, h ** a))


def example1_right(h: float, a: float = DEFAULT_RIGHT_EXPONENTS[0], b: float = DEFAULT_RIGHT_EXPONENTS[1]) -> Triangle:
    """Triangle (0,0), (h,0), (h^a, h^b) with 1 < a < b < 1 + a; rho_K = O(h^b) and R_K = O(h^(1+a-b))"""
    if not 0.0 < h < 1.0:
        raise ValueError(f"h must lie in (0, 1), got '{h}'")
    if not 1.0 < a < b < 1.0 + a:
        raise ValueError(f"Exponents must satisfy 1 < a < b < 1 + a, got a '{a}', b '{b}'")
    return Triangle((0.0, 0.0), (h, 0.0), (h ** a, h ** b))


def example1_right_flat(
        h: float,
        a: float = DEFAULT_FLAT_EXPONENTS[0],
        b: float = DEFAULT_FLAT_EXPONENTS[1],
) -> Triangle:
    """
    Triangle (0,0), (h,0), (h^a, h^b) with 1 < a and a + 1 <= b < a + 2
    R_K = O(h^(1+a-b)) no longer tends to zero, R_K h_K = O(h^(2+a-b)) still does
    """
    if not 0.0 < h < 1.0:
        raise ValueError(f"h must lie in (0, 1), got '{h}'")
    if not (1.0 < a and a + 1.0 <= b < a + 2.0):
        raise ValueError(f"Exponents must satisfy 1 < a and a + 1 <= b < a + 2, got a '{a}', b '{b}'")
    return Triangle((0.0, 0.0), (h, 0.0), (h ** a, h ** b))


def log_spaced(h_max: float, h_min: float, samples: int) -> list[float]:
    """Decreasing log-spaced parameter values from h_max down to h_min"""
    if samples < 1:
        raise ValueError(f"samples must be positive, got '{samples}'")
    if not 0.0 < h_min <= h_max:
        raise ValueError(f"Expected 0 < h_min <= h_max, got h_min '{h_min}', h_max '{h_max}'")
    if samples == 1:
        return [h_max]
    return [float(h) for h in np.geomspace(h_max, h_min, samples)]


def family_triangle(family: str, h: float, rng: np.random.Generator | None = None, **exponents) -> Triangle:
    """
    One member of a named family
    :param family: One of FAMILIES
    :param h: Family parameter; for 'random', the diameter the random triangle is scaled to
    :param rng: Generator, required for 'random'
    :param exponents: 'a' (and 'b') exponents of the example families
    """
    if family == 'example1-left':
        return example1_left(h, exponents.get('a', DEFAULT_LEFT_EXPONENT))
    if family == 'example1-right':
        return example1_right(
            h, exponents.get('a', DEFAULT_RIGHT_EXPONENTS[0]), exponents.get('b', DEFAULT_RIGHT_EXPONENTS[1]))
    if family == 'example1-right-flat':
        return example1_right_flat(
            h, exponents.get('a', DEFAULT_FLAT_EXPONENTS[0]), exponents.get('b', DEFAULT_FLAT_EXPONENTS[1]))
    if family == 'random':
        if rng is None:
            raise ValueError("Family 'random' requires a random generator")
        tri = random_triangle(rng, rigid_motion=False)
        diameter = max(tri.edge_lengths())
        return tri.scaled(h / diameter)
    raise ValueError(f"Unknown triangle family '{family}', expected one of {FAMILIES}")
