"""
Module VerifyAll: invariant checks of every sub-package, gathered into one PASS/FAIL table

Each check group is a function of the master seed returning rows with the keys of VerifyAllDataSource.VARIABLE_NAMES.
The groups run in a fixed order and draw randomness only from the seed, so two runs give identical rows.
"""

import math
from typing import Callable
from circumradiusfem.Base import Auxiliary
from circumradiusfem.Base.DataSource import ParameterSweepDataSource
from circumradiusfem.Constants import BabuskaAziz
from circumradiusfem.DiffQuot import GridQuotient
from circumradiusfem.Fem import Assembly, ConvergenceDataSource, FemSolution
from circumradiusfem.Fem.Poisson import CylinderProblem, PolynomialProblem, consistency_check
from circumradiusfem.Geometry.Triangle import REFERENCE_TRIANGLE, kobayashi_constant, triangle_metrics
from circumradiusfem.Lagrange import InterpErrorDataSource, Interpolation, RandomTriangles
from circumradiusfem.Mesh import AnisoMesh
from circumradiusfem.Quadrature.Polynomial import BivariatePolynomial
from circumradiusfem.Quadrature.QuadratureRule import MAX_DEGREE, integrate
import logging.config
# Load logging configuration from file
logger = logging.getLogger(__name__)

# Number of random triangles of the geometry and Kobayashi checks
RANDOM_TRIALS = 200

# Parameters of the degenerating families
FAMILY_PARAMETERS = (1e-1, 1e-2, 1e-3, 1e-4)

# Largest admissible variation of the circumradius bound ratio along a family
VARIATION_LIMIT = 3.0

# Number of random fields of the empirical sup along the families
VERIFY_FIELDS = 8

# Largest order of the divided difference identities
IDENTITY_MAX_ORDER = 4


def _row(module: str, check: str, detail: str, value: float, tolerance: float, passed: bool) -> dict:
    return {
        'module': module,
        'check': check,
        'detail': detail,
        'value': float(value),
        'tolerance': float(tolerance),
        'passed': bool(passed),
    }


def _below(module: str, check: str, detail: str, value: float, tolerance: float) -> dict:
    return _row(module, check, detail, value, tolerance, value <= tolerance)


def geometry_checks(seed: int) -> list[dict]:
    rows = []
    metrics = triangle_metrics(REFERENCE_TRIANGLE)
    rows.append(_below('geometry', 'circumradius', 'right isosceles', abs(metrics.circumradius - math.sqrt(0.5)),
                       1e-15))
    rows.append(_below('geometry', 'kobayashi-constant', 'right isosceles',
                       abs(kobayashi_constant(REFERENCE_TRIANGLE) - math.sqrt(0.5 - 4.0 / 30.0 - 0.125)), 1e-13))

    law_of_sines, ordering = 0.0, 0
    for rng in Auxiliary.spawn_generators(seed, RANDOM_TRIALS):
        tri = RandomTriangles.random_triangle(rng)
        m = triangle_metrics(tri)
        law_of_sines = max(law_of_sines, abs(m.semiregularity * 2.0 * math.sin(m.max_angle) - 1.0))
        ordering += int(not kobayashi_constant(tri) < m.circumradius)
    rows.append(_below('geometry', 'law-of-sines', f"{RANDOM_TRIALS} random triangles", law_of_sines, 1e-10))
    rows.append(_below('geometry', 'C-below-R', f"{RANDOM_TRIALS} random triangles", ordering, 0))
    return rows


def quadrature_checks(seed: int) -> list[dict]:
    """Monomials x^a y^b integrate to a! b! / (a + b + 2)! on the reference triangle"""
    error = 0.0
    for q in range(1, MAX_DEGREE + 1):
        for a in range(q + 1):
            b = q - a
            exact = math.factorial(a) * math.factorial(b) / math.factorial(a + b + 2)
            value = integrate(BivariatePolynomial.monomial(a, b), REFERENCE_TRIANGLE, q)
            error = max(error, abs(value - exact) / exact)
    return [_below('quadrature', 'monomial-exactness', f"degrees 1..{MAX_DEGREE}", error, 1e-10)]


def lagrange_checks(seed: int) -> list[dict]:
    rows = []
    suite = InterpErrorDataSource.kobayashi_suite(RANDOM_TRIALS, seed, max_workers=1)
    rows.append(_below('lagrange', 'kobayashi-bound', f"{RANDOM_TRIALS} random triangles", suite['violations'], 0))

    for family in ('example1-left', 'example1-right'):
        for p in (1.0, 2.0, math.inf):
            for k, m in ((1, 1), (2, 1), (2, 2), (3, 1)):
                ratios = InterpErrorDataSource.boundedness_sweep(
                    k, m, p, family, list(FAMILY_PARAMETERS), fields=VERIFY_FIELDS, seed=seed)
                detail = f"{family} k={k} m={m} p={p:g}"
                rows.append(_below('lagrange', 'circumradius-ratio-no-blow-up', detail,
                                   InterpErrorDataSource.growth_factor(ratios), VARIATION_LIMIT))
                if m == 1:
                    rows.append(_below('lagrange', 'circumradius-ratio-bounded', detail,
                                       InterpErrorDataSource.variation_factor(ratios), VARIATION_LIMIT))

    factors = [Interpolation.classical_factor(1, 1, RandomTriangles.example1_right(h, 1.5, 2.2))
               for h in FAMILY_PARAMETERS]
    growth = factors[-1] / factors[0]
    rows.append(_row('lagrange', 'classical-factor-grows', "example1-right a=1.5 b=2.2", growth, 3.0, growth > 3.0))
    return rows


def constants_checks(seed: int) -> list[dict]:
    rows = []
    a2 = BabuskaAziz.babuska_aziz_A2()
    rows.append(_below('constants', 'A2-value', '0.49291', abs(a2 - 0.49291), 1e-5))
    rows.append(_below('constants', 'A2-root', '1/A + tan(1/A) = 0', abs(1.0 / a2 + math.tan(1.0 / a2)), 1e-9))

    pairs = [(1.0, 1.0), (1.0, 0.1), (1.0, 0.01), (0.5, 0.05)]
    for r in BabuskaAziz.squeeze_scaling_check(1, 1, 2.0, pairs, 6, max_workers=1):
        bound = max(r['alpha'], r['beta']) * a2
        rows.append(_below('constants', 'squeezed-below-A2', f"alpha={r['alpha']:g} beta={r['beta']:g}",
                           r['estimate'] / bound, 1.0 + 1e-6))

    report = BabuskaAziz.corollary_error_check(1, 1, 2.0, 1.0, 0.1, 50, seed=seed)
    rows.append(_below('constants', 'corollary-error', "k=1 m=1 p=2 alpha=1 beta=0.1", report['violations'], 0))
    comparison = BabuskaAziz.kobayashi_comparison(REFERENCE_TRIANGLE, 6)
    rows.append(_row('constants', 'B-below-C-below-R', 'right isosceles', comparison['B_estimate'],
                     comparison['C_K'], comparison['holds']))
    return rows


def diffquot_checks(seed: int) -> list[dict]:
    return [
        _row('diffquot', r['check'], r['detail'], r['max_error'], r['tolerance'], r['passed'])
        for r in GridQuotient.run_identity_suite(seed=seed, max_order=IDENTITY_MAX_ORDER, max_workers=1)
    ]


def mesh_checks(seed: int) -> list[dict]:
    rows = []
    sizes = ((4, 1.0), (8, 1.6), (6, 2.1), (5, 1.3))
    cases = [(n, alpha, pattern) for pattern in AnisoMesh.PATTERNS for n, alpha in sizes]
    for n, alpha, pattern in cases:
        mesh = AnisoMesh.build_aniso_mesh(n, alpha, pattern)
        report = AnisoMesh.conformity_report(mesh)
        detail = f"{pattern} N={n} alpha={alpha:g}"
        ok = report['conforming'] and report['positive'] and report['node_count']
        rows.append(_row('mesh', 'conforming', detail, mesh.n_elements, 0, ok))
        rows.append(_below('mesh', 'tiles-square', detail, abs(report['area'] - 4.0), 1e-10))
        stats = AnisoMesh.mesh_stats(mesh)
        expected_r = mesh.closed_form_circumradius()
        error = abs(stats.max_circumradius - expected_r) / expected_r
        rows.append(_below('mesh', 'max-circumradius', detail, error, 1e-10))
    return rows


def fem_checks(seed: int) -> list[dict]:
    rows = []
    consistency = consistency_check(CylinderProblem(), seed=seed)
    rows.append(_below('fem', 'cylinder-pde', 'a=1.1', consistency['pde_residual'], 1e-10))

    x, y = BivariatePolynomial.x(), BivariatePolynomial.y()
    for order, u in ((1, 0.3 - 1.2 * x + 2.5 * y), (2, x ** 2 + x * y - 0.5 * y)):
        problem = PolynomialProblem(u)
        solution = FemSolution.solve(Assembly.assemble(AnisoMesh.build_aniso_mesh(4, 1.4), order, problem,
                                                       max_workers=1))
        rows.append(_below('fem', 'patch-test', f"k={order}", FemSolution.h1_error(solution, problem), 1e-6))

    study = ConvergenceDataSource.convergence_study(1, [1.0, 1.6], [4, 8], max_workers=1)
    rows.append(_below('fem', 'solver-residual', 'k=1 N=4,8', max(r['residual'] for r in study), 1e-10))
    rows.append(_below('fem', 'cea-optimality', 'k=1 N=4,8', len(ConvergenceDataSource.cea_violations(study)), 0))
    return rows


CHECK_GROUPS: dict[str, Callable[[int], list[dict]]] = {
    'geometry': geometry_checks,
    'quadrature': quadrature_checks,
    'lagrange': lagrange_checks,
    'constants': constants_checks,
    'diffquot': diffquot_checks,
    'mesh': mesh_checks,
    'fem': fem_checks,
}


class VerifyAllDataSource(ParameterSweepDataSource):
    VARIABLE_NAMES = ('module', 'check', 'detail', 'value', 'tolerance', 'passed')

    def __init__(self, seed: int = Auxiliary.DEFAULT_SEED, groups: list[str] | None = None,
                 max_workers: int | None = None):
        """
        Data source of all invariant checks, one row per check, groups in the order of CHECK_GROUPS
        :param seed: Master seed of the randomized checks
        :param groups: Names of the groups to run, if None, run all
        :param max_workers: Number of worker threads over the groups, if None, use Auxiliary.worker_count()
        """
        logger.info("Initializing VerifyAllDataSource ...")
        groups = list(CHECK_GROUPS) if groups is None else groups
        unknown = [g for g in groups if g not in CHECK_GROUPS]
        if unknown:
            raise ValueError(f"Unknown check groups '{unknown}', expected some of {tuple(CHECK_GROUPS)}")
        self.seed = seed
        super().__init__(self.VARIABLE_NAMES, [{'group': g} for g in groups], self._rows, max_workers)

    def _rows(self, point: dict) -> list[dict]:
        rows = CHECK_GROUPS[point['group']](self.seed)
        failed = [r for r in rows if not r['passed']]
        for r in failed:
            logger.warning(f"Check failed: {r['module']} {r['check']} ({r['detail']}), value {r['value']}")
        return rows


def all_passed(rows: list[dict]) -> bool:
    return bool(rows) and all(r['passed'] for r in rows)


if __name__ == '__main__':
    _rows = list(VerifyAllDataSource(groups=['geometry', 'mesh']).read_data())
    for _r in _rows:
        print(f"{'PASS' if _r['passed'] else 'FAIL'}  {_r['module']:<10} {_r['check']:<28} {_r['detail']}")
    print(f"all passed: {all_passed(_rows)}")
