"""
Module ConjugateGradient: Jacobi-preconditioned conjugate gradients for symmetric positive definite sparse systems
"""

from dataclasses import dataclass, field
import numpy as np
import scipy.sparse as sp
from circumradiusfem.Base.Errors import ConvergenceError
import logging.config
# Load logging configuration from file
logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-10

# Iteration cap per unknown
ITERATION_FACTOR = 10


@dataclass(frozen=True, eq=False)
class CgResult:
    solution: np.ndarray = field(repr=False)
    iterations: int
    residual: float  # Relative residual ||b - Ax|| / ||b||
    converged: bool


def conjugate_gradient(
        matrix: sp.spmatrix | np.ndarray,
        rhs: np.ndarray,
        x0: np.ndarray | None = None,
        tol: float = DEFAULT_TOLERANCE,
        max_iterations: int | None = None,
        raise_on_failure: bool = True,
) -> CgResult:
    """
    Solve Ax = b with the Jacobi preconditioner diag(A)^(-1)
    :param matrix: Symmetric positive definite matrix
    :param rhs: Right-hand side b
    :param x0: Initial guess, zero if None
    :param tol: Target of the relative residual ||b - Ax|| / ||b||
    :param max_iterations: Iteration cap, if None, use 10 n
    :param raise_on_failure: Raise ConvergenceError when the cap is reached, otherwise return the unconverged result
    :raises ConvergenceError: If the relative residual is above tol after max_iterations iterations
    """
    rhs = np.asarray(rhs, dtype=float)
    n = rhs.shape[0]
    if matrix.shape != (n, n):
        raise ValueError(f"Matrix of shape {matrix.shape} does not match right-hand side of length {n}")
    if tol <= 0.0:
        raise ValueError(f"Tolerance must be positive, got '{tol}'")
    max_iterations = ITERATION_FACTOR * max(n, 1) if max_iterations is None else max_iterations
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    b_norm = float(np.linalg.norm(rhs))
    if n == 0 or b_norm == 0.0:
        return CgResult(solution=np.zeros(n), iterations=0, residual=0.0, converged=True)

    diagonal = matrix.diagonal() if sp.issparse(matrix) else np.diag(matrix)
    if np.any(diagonal <= 0.0):
        raise ValueError("Matrix diagonal must be positive for the Jacobi preconditioner")
    inverse_diagonal = 1.0 / diagonal

    r = rhs - matrix @ x
    z = inverse_diagonal * r
    d = z.copy()
    rz = float(r @ z)
    residual = float(np.linalg.norm(r)) / b_norm
    iterations = 0
    while residual > tol and iterations < max_iterations:
        ad = matrix @ d
        step = rz / float(d @ ad)
        x += step * d
        r -= step * ad
        z = inverse_diagonal * r
        rz_next = float(r @ z)
        d = z + (rz_next / rz) * d
        rz = rz_next
        iterations += 1
        residual = float(np.linalg.norm(r)) / b_norm
        if iterations % 1000 == 0:
            logger.debug(f"Iteration {iterations}, relative residual {residual:.3e}")

    converged = residual <= tol
    if not converged:
        message = f"CG did not reach tolerance {tol:g} within {iterations} iterations, residual {residual:.3e}"
        if raise_on_failure:
            raise ConvergenceError(message, iterations, residual)
        logger.warning(message)
    else:
        logger.info(f"CG converged in {iterations} iterations, relative residual {residual:.3e}")
    return CgResult(solution=x, iterations=iterations, residual=residual, converged=converged)
