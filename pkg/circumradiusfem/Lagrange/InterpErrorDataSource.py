"""
Module InterpErrorDataSource: interpolation error sweeps along triangle families as a data source
"""

import math
import numpy as np
from circumradiusfem.Base import Auxiliary
from circumradiusfem.Base.DataSource import ParameterSweepDataSource
from circumradiusfem.Geometry.Triangle import kobayashi_constant, triangle_metrics
from circumradiusfem.Lagrange import Interpolation, RandomTriangles
from circumradiusfem.Quadrature.Polynomial import BivariatePolynomial
from circumradiusfem.Quadrature.Seminorm import SeminormSpec, seminorm
import logging.config
# Load logging configuration from file
logger = logging.getLogger(__name__)

# Number of random fields of the empirical sup in boundedness_sweep
FIELD_SAMPLES = 16


def default_field(k: int) -> BivariatePolynomial:
    """x^(k+1) + y^(k+1), for k = 1 the field x^2 + y^2"""
    return BivariatePolynomial.monomial(k + 1, 0) + BivariatePolynomial.monomial(0, k + 1)


class InterpErrorDataSource(ParameterSweepDataSource):
    VARIABLE_NAMES = (
        'family', 'h', 'k', 'm', 'p', 'h_K', 'R_K', 'rho_K', 'max_angle',
        'error', 'circumradius_bound', 'classical_bound', 'jamet_bound', 'ratio', 'classical_ratio', 'approximate',
    )

    def __init__(
            self,
            k: int,
            m: int,
            p: float,
            family: str = 'example1-right',
            h_max: float = 1e-1,
            h_min: float = 1e-4,
            samples: int = 4,
            seed: int = Auxiliary.DEFAULT_SEED,
            exponents: dict | None = None,
            v: BivariatePolynomial | None = None,
            max_workers: int | None = None,
    ):
        """
        Data source measuring |v - I^k v|_{m,p,K} along a triangle family, one row per family parameter h
        :param k: Interpolation order
        :param m: Seminorm order, 0 <= m <= k
        :param p: Exponent
        :param family: One of FAMILIES
        :param h_max: Largest family parameter
        :param h_min: Smallest family parameter
        :param samples: Number of log-spaced parameters
        :param seed: Master seed; the random family draws triangle and field of row i from the i-th spawned generator
        :param exponents: Exponents 'a', 'b' of the example families, if None, use the family defaults
        :param v: Polynomial field, if None, use x^(k+1) + y^(k+1) (random degree k+1 fields for the random family)
        :param max_workers: Number of worker threads, if None, use Auxiliary.worker_count()
        """
        logger.info("Initializing InterpErrorDataSource ...")
        if family not in RandomTriangles.FAMILIES:
            raise ValueError(f"Unknown triangle family '{family}', expected one of {RandomTriangles.FAMILIES}")
        if not 0 <= m <= k:
            raise ValueError(f"Seminorm order must satisfy 0 <= m <= k, got m '{m}', k '{k}'")
        self.k, self.m, self.p = k, m, p
        self.family = family
        self.exponents = {} if exponents is None else dict(exponents)
        self.v = v
        hs = RandomTriangles.log_spaced(h_max, h_min, samples)
        generators = Auxiliary.spawn_generators(seed, samples)
        parameters = [{'index': i, 'h': h, 'rng': g} for i, (h, g) in enumerate(zip(hs, generators))]
        super().__init__(self.VARIABLE_NAMES, parameters, self._row, max_workers)

    def _row(self, point: dict) -> dict:
        rng = point['rng']
        tri = RandomTriangles.family_triangle(self.family, point['h'], rng=rng, **self.exponents)
        if self.v is not None:
            v = self.v
        elif self.family == 'random':
            v = BivariatePolynomial.random(self.k + 1, rng)
        else:
            v = default_field(self.k)
        row = Interpolation.measure_interp_error(v, self.k, self.m, self.p, tri)
        row.update({
            'family': self.family,
            'h': point['h'],
            'k': self.k,
            'm': self.m,
            'p': self.p,
            'max_angle': triangle_metrics(tri).max_angle,
        })
        return row


def kobayashi_trial(rng: np.random.Generator) -> dict:
    """
    One trial of the sharp linear interpolation bound on a random triangle with a random cubic field
    :return: Dict with the error |v - I^1 v|_{1,2,K}, the bounds C(K)|v|_{2,2,K} and R_K|v|_{2,2,K}, and C(K) < R_K
    """
    tri = RandomTriangles.random_triangle(rng)
    v = BivariatePolynomial.random(3, rng)
    metrics = triangle_metrics(tri)
    c_k = kobayashi_constant(tri)
    top = seminorm(v, SeminormSpec(order=2, p=2.0), tri)
    error = Interpolation.interp_error(v, 1, 1, 2.0, tri)
    return {
        'error': error,
        'kobayashi_bound': c_k * top,
        'circumradius_bound': metrics.circumradius * top,
        'kobayashi_below_circumradius': c_k < metrics.circumradius,
        'max_angle': metrics.max_angle,
    }


def kobayashi_suite(trials: int, seed: int = Auxiliary.DEFAULT_SEED, max_workers: int | None = None) -> dict:
    """
    Kobayashi bound over seeded random trials
    :return: Dict with 'trials', 'violations' (either bound exceeded by more than 1e-8 relative, or C(K) >= R_K),
        'max_ratio' (largest error / C(K)|v|_{2,2,K}) and 'max_angle'
    """
    results = Auxiliary.parallel_map(kobayashi_trial, Auxiliary.spawn_generators(seed, trials), max_workers)
    violations = sum(
        1 for r in results
        if r['error'] > r['kobayashi_bound'] * (1.0 + 1e-8)
        or r['error'] > r['circumradius_bound'] * (1.0 + 1e-8)
        or not r['kobayashi_below_circumradius']
    )
    max_ratio = max(r['error'] / r['kobayashi_bound'] for r in results if r['kobayashi_bound'] > 0.0)
    logger.info(f"Kobayashi suite: {trials} trial(s), {violations} violation(s), max ratio {max_ratio:.6f}")
    return {
        'trials': trials,
        'violations': violations,
        'max_ratio': max_ratio,
        'max_angle': max(r['max_angle'] for r in results),
    }


def random_fields(k: int, count: int = FIELD_SAMPLES, seed: int = Auxiliary.DEFAULT_SEED) -> list[BivariatePolynomial]:
    """Seeded random fields of degree k + 1 with standard normal coefficients"""
    if count < 1:
        raise ValueError(f"Number of fields must be positive, got '{count}'")
    return [BivariatePolynomial.random(k + 1, rng) for rng in Auxiliary.spawn_generators(seed, count)]


def boundedness_sweep(
        k: int,
        m: int,
        p: float,
        family: str,
        hs: list[float],
        v: BivariatePolynomial | None = None,
        fields: int = FIELD_SAMPLES,
        seed: int = Auxiliary.DEFAULT_SEED,
        **exponents,
) -> list[float]:
    """
    Empirical sup of the bound ratio along a family, in the order of hs
    :param v: Single field, if None, take the maximum over random_fields(k, fields, seed), the same fields for every h
    :param fields: Number of random fields
    :param seed: Seed of the random fields
    :param exponents: 'a' (and 'b') exponents of the example families
    """
    candidates = random_fields(k, fields, seed) if v is None else [v]
    ratios = []
    for h in hs:
        tri = RandomTriangles.family_triangle(family, h, **exponents)
        ratios.append(max(Interpolation.bound_ratio(w, k, m, p, tri) for w in candidates))
    return ratios


def variation_factor(values: list[float]) -> float:
    """max / min of positive values, inf if any value vanishes"""
    low = min(values)
    return math.inf if low <= 0.0 else max(values) / low


def growth_factor(values: list[float]) -> float:
    """max / first of positive values, the blow-up of a sweep relative to its coarsest member"""
    if values[0] <= 0.0:
        return math.inf
    return max(values) / values[0]
