"""
Module ConstantsDataSource: constant estimates on squeezed triangles as a data source
"""

from circumradiusfem.Base import Auxiliary
from circumradiusfem.Base.DataSource import ParameterSweepDataSource
from circumradiusfem.Constants import BabuskaAziz
from circumradiusfem.Geometry.Triangle import squeezed_triangle
import logging.config
# Load logging configuration from file
logger = logging.getLogger(__name__)


def known_upper_bound(k: int, m: int, p: float, alpha: float, beta: float) -> float | None:
    """Proven upper bound max(alpha, beta) A_2 of B_2^{1,1}(K_ab), None where no closed form is known"""
    if (k, m, p) == (1, 1, 2.0):
        return max(alpha, beta) * BabuskaAziz.babuska_aziz_A2()
    return None


class ConstantsDataSource(ParameterSweepDataSource):
    VARIABLE_NAMES = ('k', 'm', 'p', 'alpha', 'beta', 'basis_degree', 'value', 'kind', 'converged', 'upper_bound')

    def __init__(
            self,
            k: int,
            m: int,
            p: float,
            alphas: list[float],
            betas: list[float],
            basis_degree: int = 8,
            seed: int = Auxiliary.DEFAULT_SEED,
            max_workers: int | None = None,
    ):
        """
        Data source estimating B_p^{m,k}(K_ab), one row per (alpha, beta) pair
        :param alphas: Squeezing factors in x, a single value is broadcast against betas
        :param betas: Squeezing factors in y, a single value is broadcast against alphas
        :param basis_degree: Polynomial degree N of the trial space
        :param seed: Master seed of the ascent starts (p != 2)
        :param max_workers: Number of worker threads, if None, use Auxiliary.worker_count()
        """
        logger.info("Initializing ConstantsDataSource ...")
        if len(alphas) == 1 and len(betas) > 1:
            alphas = list(alphas) * len(betas)
        if len(betas) == 1 and len(alphas) > 1:
            betas = list(betas) * len(alphas)
        if len(alphas) != len(betas):
            raise ValueError(f"alphas and betas must have equal length or length 1, got {len(alphas)} and "
                             f"{len(betas)}")
        self.k, self.m, self.p = k, m, p
        self.basis_degree = basis_degree
        self.seed = seed
        parameters = [{'alpha': a, 'beta': b} for a, b in zip(alphas, betas)]
        super().__init__(self.VARIABLE_NAMES, parameters, self._row, max_workers)

    def _row(self, point: dict) -> dict:
        alpha, beta = point['alpha'], point['beta']
        estimate = BabuskaAziz.estimate_B(
            self.k, self.m, self.p, squeezed_triangle(alpha, beta), self.basis_degree, seed=self.seed)
        row = estimate.as_dict()
        row.update({
            'alpha': alpha,
            'beta': beta,
            'upper_bound': known_upper_bound(self.k, self.m, self.p, alpha, beta),
        })
        return row
