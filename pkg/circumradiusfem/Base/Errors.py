"""
Module Errors

Exception hierarchy of the package. Each error also derives from the builtin exception that describes its kind, so
callers may catch either.
"""


class CircumradiusFemError(Exception):
    """Base class of all package errors"""


class DegenerateTriangleError(CircumradiusFemError, ValueError):
    """Vertices are collinear (or numerically so)"""


class NumericalConsistencyError(CircumradiusFemError, ArithmeticError):
    """A quantity that is positive in exact arithmetic was computed as non-positive"""


class ZeroSeminormError(CircumradiusFemError, ZeroDivisionError):
    """Denominator seminorm of a bound ratio vanishes"""


class QuadratureDegreeError(CircumradiusFemError, ValueError):
    """Requested exactness degree of a quadrature rule is not supported"""


class EmptySubspaceError(CircumradiusFemError, ValueError):
    """Constrained polynomial subspace is empty"""


class InfeasibleIndexError(CircumradiusFemError, ValueError):
    """Multi-index does not address points of the reference stencil"""


class MeshParameterError(CircumradiusFemError, ValueError):
    """Mesh generation parameters give an empty grid"""


class ConvergenceError(CircumradiusFemError, RuntimeError):
    """Iterative solver hit its iteration cap"""
    def __init__(self, message: str, iterations: int, residual: float):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual
