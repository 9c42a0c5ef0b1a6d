from .Base import Auxiliary, DataLogger, DataOutput, DataSource, Errors
from .Geometry import Triangle
from .Quadrature import Polynomial, QuadratureRule, Seminorm
from .Lagrange import Interpolation, RandomTriangles, InterpErrorDataSource
from .Constants import BabuskaAziz, ConstantsDataSource
from .DiffQuot import DividedDifference, GridQuotient
from .Mesh import AnisoMesh, MeshDataSource
from .Fem import Poisson, Assembly, ConjugateGradient, FemSolution, ConvergenceDataSource
import logging

# Configure the root logger
logging.basicConfig(
    level=logging.INFO,  # Set the logging level
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
