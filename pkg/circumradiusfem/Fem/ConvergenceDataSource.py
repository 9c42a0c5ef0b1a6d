"""
Module ConvergenceDataSource: H1 errors of the Poisson FEM on anisotropic meshes as a data source
"""

import math
import numpy as np
from circumradiusfem.Base.DataSource import ParameterSweepDataSource
from circumradiusfem.Base.Errors import ConvergenceError
from circumradiusfem.Fem import Assembly, FemSolution
from circumradiusfem.Fem.ConjugateGradient import DEFAULT_TOLERANCE
from circumradiusfem.Fem.Poisson import CylinderProblem, PoissonProblemBase
from circumradiusfem.Mesh import AnisoMesh
import logging.config
# Load logging configuration from file
logger = logging.getLogger(__name__)

# Columns of the slope table
SLOPE_NAMES = ('alpha', 'k', 'points', 'slope_h', 'slope_R', 'slope_R_hk', 'monotone')


class ConvergenceDataSource(ParameterSweepDataSource):
    VARIABLE_NAMES = ('k', 'alpha', 'N', 'M', 'elements', 'dofs', 'max_h', 'max_R', 'max_R_hk', 'error',
                      'interp_error', 'iterations', 'residual', 'failed')

    def __init__(
            self,
            k: int,
            alphas: list[float],
            columns: list[int],
            tol: float = DEFAULT_TOLERANCE,
            problem: PoissonProblemBase | None = None,
            max_workers: int | None = None,
            max_iterations: int | None = None,
    ):
        """
        Data source solving the Poisson problem on build_aniso_mesh(N, alpha), one row per (alpha, N), N running fastest
        :param k: Element order, 1 or 2
        :param alphas: Anisotropy exponents
        :param columns: Numbers of columns N
        :param tol: Relative residual target of CG
        :param problem: Problem to solve, if None, use CylinderProblem()
        :param max_workers: Number of worker threads over parameter points, if None, use Auxiliary.worker_count()
        :param max_iterations: CG iteration cap, if None, use 10 times the number of unknowns
        """
        logger.info("Initializing ConvergenceDataSource ...")
        Assembly.basis_size(k)
        self.k = k
        self.tol = tol
        self.max_iterations = max_iterations
        self.problem = CylinderProblem() if problem is None else problem
        parameters = [{'alpha': alpha, 'N': n} for alpha in alphas for n in columns]
        super().__init__(self.VARIABLE_NAMES, parameters, self._row, max_workers)

    def _row(self, point: dict) -> dict:
        mesh = AnisoMesh.build_aniso_mesh(point['N'], point['alpha'])
        metrics = AnisoMesh.element_metrics(mesh.element_vertices())
        system = Assembly.assemble(mesh, self.k, self.problem, max_workers=1)
        interp = FemSolution.interpolate_exact(system.space, self.problem)
        row = {
            'k': self.k,
            'alpha': point['alpha'],
            'N': mesh.n_columns,
            'M': mesh.n_rows,
            'elements': mesh.n_elements,
            'dofs': system.space.n_dofs,
            'max_h': float(metrics['diameter'].max()),
            'max_R': float(metrics['circumradius'].max()),
            'max_R_hk': float((metrics['circumradius'] * metrics['diameter'] ** (self.k - 1)).max()),
            'interp_error': FemSolution.h1_error(interp, self.problem),
        }
        try:
            solution = FemSolution.solve(system, tol=self.tol, max_iterations=self.max_iterations)
        except ConvergenceError as e:
            logger.warning(f"Solver failure at alpha={point['alpha']}, N={point['N']}: {e}")
            row.update({'error': None, 'iterations': e.iterations, 'residual': e.residual, 'failed': True})
            return row
        row.update({
            'error': FemSolution.h1_error(solution, self.problem),
            'iterations': solution.iterations,
            'residual': solution.residual,
            'failed': False,
        })
        return row


def convergence_study(
        k: int,
        alphas: list[float],
        columns: list[int],
        tol: float = DEFAULT_TOLERANCE,
        problem: PoissonProblemBase | None = None,
        max_workers: int | None = None,
) -> list[dict]:
    """All rows of a ConvergenceDataSource"""
    return list(ConvergenceDataSource(k, alphas, columns, tol, problem, max_workers).read_data())


def _slope(xs: list[float], ys: list[float]) -> float | None:
    if len(xs) < 2:
        return None
    return AnisoMesh.log_log_slope(xs, ys)


def slopes(rows: list[dict]) -> list[dict]:
    """
    Least-squares log-log slopes of the error per alpha
    :param rows: Rows of a convergence study
    :return: One dict per alpha with 'slope_h' (against max h_K), 'slope_R' (against max R_K), 'slope_R_hk' (against
        max R_K h_K^(k-1)), 'monotone' (error non-increasing in N) and 'points' (number of solved rows); slopes are None
        with fewer than two solved rows
    """
    result = []
    for alpha in dict.fromkeys(row['alpha'] for row in rows):
        solved = sorted((r for r in rows if r['alpha'] == alpha and not r['failed']), key=lambda r: r['N'])
        errors = [r['error'] for r in solved]
        result.append({
            'alpha': alpha,
            'k': solved[0]['k'] if solved else None,
            'points': len(solved),
            'slope_h': _slope([r['max_h'] for r in solved], errors),
            'slope_R': _slope([r['max_R'] for r in solved], errors),
            'slope_R_hk': _slope([r['max_R_hk'] for r in solved], errors),
            'monotone': bool(np.all(np.diff(errors) <= 0.0)) if len(errors) > 1 else None,
        })
    return result


def cea_violations(rows: list[dict], rtol: float = 1e-6) -> list[dict]:
    """Solved rows whose FEM error exceeds the interpolation error by more than rtol"""
    return [r for r in rows if not r['failed'] and r['error'] > r['interp_error'] * (1.0 + rtol)]


def is_divergent(rows: list[dict], alpha: float) -> bool:
    """Error non-decreasing in N for one alpha"""
    errors = [r['error'] for r in sorted(rows, key=lambda r: r['N']) if r['alpha'] == alpha and not r['failed']]
    return len(errors) > 1 and all(b >= a for a, b in zip(errors, errors[1:])) and math.isfinite(errors[-1])
