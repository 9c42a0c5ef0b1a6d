"""
Module Poisson: model problems -Laplace(u) = f in (-1, 1)^2, u = g on the boundary

Every problem carries its exact solution in closed form; the Dirichlet data is the trace of the exact solution.
"""

from abc import ABC, abstractmethod
import numpy as np
from circumradiusfem.Base import Auxiliary
from circumradiusfem.Quadrature.Polynomial import BivariatePolynomial
import logging.config
# Load logging configuration from file
logger = logging.getLogger(__name__)


class PoissonProblemBase(ABC):
    """Base class of Poisson problems with known solution"""
    name: str = 'poisson'

    @abstractmethod
    def exact(self, x, y) -> np.ndarray:
        """Exact solution u"""
        pass

    @abstractmethod
    def gradient(self, x, y) -> tuple[np.ndarray, np.ndarray]:
        """Exact gradient (u_x, u_y)"""
        pass

    @abstractmethod
    def laplacian(self, x, y) -> np.ndarray:
        pass

    def source(self, x, y) -> np.ndarray:
        """Right-hand side f = -Laplace(u)"""
        return -self.laplacian(x, y)

    def boundary(self, x, y) -> np.ndarray:
        """Dirichlet data g"""
        return self.exact(x, y)


class CylinderProblem(PoissonProblemBase):
    name = 'cylinder'

    def __init__(self, a: float = 1.1):
        """
        Problem with u = g = (a^2 - x^2)^(1/2) and f = a^2 / (a^2 - x^2)^(3/2), the graph of u is part of a cylinder
        :param a: Radius of the cylinder, a > 1 keeps f smooth on the closed square
        """
        if not a > 1.0:
            raise ValueError(f"Radius must satisfy a > 1, got '{a}'")
        self.a = a

    def _radicand(self, x) -> np.ndarray:
        return self.a ** 2 - np.asarray(x, dtype=float) ** 2

    def exact(self, x, y) -> np.ndarray:
        return np.sqrt(self._radicand(x)) + 0.0 * np.asarray(y, dtype=float)

    def gradient(self, x, y) -> tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        return -x / np.sqrt(self._radicand(x)), np.zeros(np.broadcast(x, np.asarray(y)).shape)

    def laplacian(self, x, y) -> np.ndarray:
        return -self.a ** 2 / self._radicand(x) ** 1.5 + 0.0 * np.asarray(y, dtype=float)

    def source(self, x, y) -> np.ndarray:
        return self.a ** 2 / self._radicand(x) ** 1.5 + 0.0 * np.asarray(y, dtype=float)


class PolynomialProblem(PoissonProblemBase):
    name = 'polynomial'

    def __init__(self, solution: BivariatePolynomial):
        """Manufactured problem with a polynomial exact solution"""
        self.solution = solution
        self._dx = solution.diff(1, 0)
        self._dy = solution.diff(0, 1)
        self._laplacian = solution.diff(2, 0) + solution.diff(0, 2)

    @classmethod
    def linear(cls, c0: float, c1: float, c2: float) -> 'PolynomialProblem':
        """u = c0 + c1 x + c2 y, f = 0"""
        return cls(BivariatePolynomial.from_terms({(0, 0): c0, (1, 0): c1, (0, 1): c2}))

    def exact(self, x, y) -> np.ndarray:
        return self.solution(x, y)

    def gradient(self, x, y) -> tuple[np.ndarray, np.ndarray]:
        return self._dx(x, y), self._dy(x, y)

    def laplacian(self, x, y) -> np.ndarray:
        return self._laplacian(x, y)


def consistency_check(
        problem: PoissonProblemBase,
        samples: int = 100,
        seed: int = Auxiliary.DEFAULT_SEED,
        step: float = 1e-4,
) -> dict:
    """
    Check the closed forms of a problem at random points
    :param samples: Number of interior and of boundary sample points
    :param step: Step of the central differences checking gradient and Laplacian
    :return: Dict with 'pde_residual' (max |-Laplace(u) - f|), 'boundary_residual' (max |u - g| on the boundary),
        'gradient_residual' and 'laplacian_residual' (max deviation from central differences)
    """
    rng = np.random.default_rng(seed)
    x, y = rng.uniform(-1.0 + step, 1.0 - step, size=(2, samples))
    side = rng.integers(0, 4, size=samples)
    t = rng.uniform(-1.0, 1.0, size=samples)
    bx = np.where(side < 2, np.where(side == 0, -1.0, 1.0), t)
    by = np.where(side < 2, t, np.where(side == 2, -1.0, 1.0))

    gx, gy = problem.gradient(x, y)
    fd_gx = (problem.exact(x + step, y) - problem.exact(x - step, y)) / (2.0 * step)
    fd_gy = (problem.exact(x, y + step) - problem.exact(x, y - step)) / (2.0 * step)
    fd_lap = (
        (problem.gradient(x + step, y)[0] - problem.gradient(x - step, y)[0])
        + (problem.gradient(x, y + step)[1] - problem.gradient(x, y - step)[1])
    ) / (2.0 * step)
    result = {
        'pde_residual': float(np.max(np.abs(-problem.laplacian(x, y) - problem.source(x, y)))),
        'boundary_residual': float(np.max(np.abs(problem.exact(bx, by) - problem.boundary(bx, by)))),
        'gradient_residual': float(max(np.max(np.abs(gx - fd_gx)), np.max(np.abs(gy - fd_gy)))),
        'laplacian_residual': float(np.max(np.abs(problem.laplacian(x, y) - fd_lap))),
    }
    logger.info(f"Consistency of problem '{problem.name}': {result}")
    return result
