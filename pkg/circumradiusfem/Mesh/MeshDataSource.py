"""
Module MeshDataSource: mesh listings and mesh statistics as data sources
"""

from typing import Iterator
from circumradiusfem.Base.DataSource import DataSourceBase, ParameterSweepDataSource
from circumradiusfem.Mesh import AnisoMesh
import logging.config
# Load logging configuration from file
logger = logging.getLogger(__name__)


class MeshDumpDataSource(DataSourceBase):
    VARIABLE_NAMES = ('kind', 'index', 'x', 'y', 'boundary', 'v1', 'v2', 'v3')

    def __init__(self, mesh: AnisoMesh.TriMesh):
        """
        Data source listing vertices (kind 'vertex') followed by triangles (kind 'triangle')
        :param mesh: Mesh to list
        """
        logger.info("Initializing MeshDumpDataSource ...")
        super().__init__()
        self._all_variable_names = self.VARIABLE_NAMES
        self.mesh = mesh

    def read_data(self) -> Iterator[dict]:
        for i, ((x, y), on_boundary) in enumerate(zip(self.mesh.vertices, self.mesh.boundary)):
            yield {'kind': 'vertex', 'index': i, 'x': float(x), 'y': float(y), 'boundary': bool(on_boundary)}
        for i, (a, b, c) in enumerate(self.mesh.triangles):
            yield {'kind': 'triangle', 'index': i, 'v1': int(a), 'v2': int(b), 'v3': int(c)}


class MeshStatsDataSource(ParameterSweepDataSource):
    VARIABLE_NAMES = ('pattern', 'N', 'M', 'alpha', 'h', 'elements', 'max_h_K', 'max_R_K', 'max_chunkiness',
                      'min_angle', 'max_angle', 'conforming', 'area')

    def __init__(
            self,
            columns: list[int],
            alphas: list[float],
            pattern: str = AnisoMesh.DEFAULT_PATTERN,
            max_workers: int | None = None,
    ):
        """
        Data source of mesh statistics, one row per (alpha, N), N running fastest
        :param columns: Numbers of columns N
        :param alphas: Anisotropy exponents
        :param pattern: Cell pattern of the meshes, one of AnisoMesh.PATTERNS
        :param max_workers: Number of worker threads, if None, use Auxiliary.worker_count()
        """
        logger.info("Initializing MeshStatsDataSource ...")
        parameters = [{'N': n, 'alpha': alpha, 'pattern': pattern} for alpha in alphas for n in columns]
        super().__init__(self.VARIABLE_NAMES, parameters, self._row, max_workers)

    @staticmethod
    def _row(point: dict) -> dict:
        mesh = AnisoMesh.build_aniso_mesh(point['N'], point['alpha'], point['pattern'])
        row = AnisoMesh.mesh_stats(mesh).as_dict()
        report = AnisoMesh.conformity_report(mesh)
        row.update({'pattern': mesh.pattern, 'conforming': report['conforming'], 'area': report['area']})
        return row
