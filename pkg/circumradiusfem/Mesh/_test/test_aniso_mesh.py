import io
import math

import numpy as np
import pytest

from circumradiusfem.Base.DataLogger import DataLoggerSweep
from circumradiusfem.Base.DataOutput import DataOutputMemory
from circumradiusfem.Base.Errors import MeshParameterError
from circumradiusfem.Geometry.Triangle import Triangle, triangle_metrics
from circumradiusfem.Mesh.AnisoMesh import (
    PATTERNS,
    boundary_edges,
    build_aniso_mesh,
    conformity_report,
    dump_off,
    edge_structure,
    element_count,
    element_metrics,
    isosceles_circumradius,
    log_log_slope,
    mesh_stats,
    node_count,
    row_count,
)
from circumradiusfem.Mesh.MeshDataSource import MeshDumpDataSource, MeshStatsDataSource


# {{{ construction

def test_row_count_example():
    assert row_count(12, 1.6) == 35
    assert row_count(8, 1.0) == 16


def test_example_mesh_sizes():
    mesh = build_aniso_mesh(12, 1.6)
    assert mesh.n_rows == 35
    assert mesh.h == pytest.approx(1.0 / 6.0)
    assert mesh.n_vertices == 13 * 36 + 18 == node_count(12, 35)
    assert mesh.n_elements == 35 * 25 == element_count(12, 35)


@pytest.mark.parametrize(("n", "alpha"), [(2, 1.0), (4, 1.0), (6, 1.5), (12, 1.6), (8, 2.0)])
def test_conformity(n, alpha):
    report = conformity_report(build_aniso_mesh(n, alpha))
    assert report['conforming']
    assert report['positive']
    assert report['node_count']
    assert report['area'] == pytest.approx(4.0, abs=1e-12)
    assert report['tiles']


def test_boundary_flags():
    mesh = build_aniso_mesh(6, 1.3)
    n, m = mesh.n_columns, mesh.n_rows
    assert mesh.boundary.sum() == 2 * (n + m) + m % 2
    flagged = mesh.vertices[mesh.boundary]
    assert np.all(np.isclose(np.abs(flagged).max(axis=1), 1.0))
    assert np.all(np.abs(mesh.vertices[~mesh.boundary]).max(axis=1) < 1.0 - 1e-12)
    assert boundary_edges(mesh).shape == (mesh.boundary.sum(), 2)


def test_edge_structure_counts():
    mesh = build_aniso_mesh(4, 1.3)
    structure = edge_structure(mesh)
    # Euler characteristic of the disc
    assert structure.edges.shape[0] == mesh.n_vertices + mesh.n_elements - 1
    assert structure.element_edges.shape == (mesh.n_elements, 3)
    local = np.sort(mesh.triangles[:, [0, 1]], axis=1)
    assert np.array_equal(structure.edges[structure.element_edges[:, 0]], local)


def test_invalid_parameters():
    with pytest.raises(MeshParameterError):
        build_aniso_mesh(0, 1.0)
    with pytest.raises(MeshParameterError):
        build_aniso_mesh(4, 0.5)
    with pytest.raises(MeshParameterError):
        build_aniso_mesh(4, 1.5, pattern='diamond')
    with pytest.raises(MeshParameterError):
        node_count(4, 4, 'diamond')


@pytest.mark.parametrize("pattern", PATTERNS)
def test_single_column_rejected(pattern):
    with pytest.raises(MeshParameterError):
        build_aniso_mesh(1, 1.0, pattern)


def test_vanishing_row_count():
    # h = 2, so floor(2/h^alpha) is zero for every alpha > 1
    assert row_count(1, 1.5) == 0
    with pytest.raises(MeshParameterError):
        build_aniso_mesh(1, 1.5)
    assert row_count(2, 3.0) == 2

# }}}


# {{{ center-split pattern

@pytest.mark.parametrize(("n", "alpha"), [(2, 1.0), (4, 1.0), (6, 1.5), (12, 1.6), (8, 2.0), (5, 1.3)])
def test_center_split_node_count(n, alpha):
    mesh = build_aniso_mesh(n, alpha, pattern='center-split')
    m = row_count(n, alpha)
    assert mesh.pattern == 'center-split'
    assert mesh.n_vertices == (n + 1) * (m + 1) + n * m == node_count(n, m, 'center-split')
    assert mesh.n_elements == 4 * n * m == element_count(n, m, 'center-split')
    report = conformity_report(mesh)
    assert report['conforming']
    assert report['positive']
    assert report['node_count']
    assert report['area'] == pytest.approx(4.0, abs=1e-12)


def test_center_split_example():
    mesh = build_aniso_mesh(12, 1.6, pattern='center-split')
    assert mesh.n_rows == 35
    assert mesh.n_vertices == 13 * 36 + 12 * 35


def test_center_split_boundary_and_centers():
    mesh = build_aniso_mesh(4, 1.0, pattern='center-split')
    n, m = mesh.n_columns, mesh.n_rows
    assert mesh.boundary.sum() == 2 * (n + m)
    centers = mesh.vertices[(n + 1) * (m + 1):]
    assert not mesh.boundary[(n + 1) * (m + 1):].any()
    assert np.allclose(centers[0], [-1.0 + mesh.h / 2.0, -1.0 + mesh.row_height / 2.0])
    # Every element has one cell center as its third vertex
    assert np.all(mesh.triangles[:, 2] >= (n + 1) * (m + 1))


@pytest.mark.parametrize(("n", "alpha"), [(2, 1.0), (12, 1.6), (8, 2.0)])
def test_center_split_circumradius(n, alpha):
    mesh = build_aniso_mesh(n, alpha, pattern='center-split')
    stats = mesh_stats(mesh)
    assert stats.max_circumradius == pytest.approx(mesh.closed_form_circumradius(), rel=1e-12)
    assert stats.max_diameter == pytest.approx(mesh.h, rel=1e-12)

# }}}


# {{{ statistics

def test_element_metrics_match_geometry(rng):
    mesh = build_aniso_mesh(4, 1.4)
    metrics = element_metrics(mesh.element_vertices())
    for e in rng.choice(mesh.n_elements, size=10, replace=False):
        reference = triangle_metrics(Triangle.from_array(mesh.element_vertices()[e]))
        assert metrics['circumradius'][e] == pytest.approx(reference.circumradius, rel=1e-12)
        assert metrics['inradius'][e] == pytest.approx(reference.inradius, rel=1e-12)
        assert metrics['max_angle'][e] == pytest.approx(reference.max_angle, rel=1e-12)


def test_isotropic_mesh_angles():
    stats = mesh_stats(build_aniso_mesh(2, 1.0))
    assert stats.min_angle == pytest.approx(math.pi / 4.0)
    assert stats.max_angle == pytest.approx(math.pi / 2.0)
    assert stats.max_circumradius == pytest.approx(0.5)


def test_max_angle_grows():
    angles = [mesh_stats(build_aniso_mesh(n, 1.6)).max_angle for n in (4, 8, 16, 32)]
    assert all(b > a for a, b in zip(angles, angles[1:]))


def test_circumradius_closed_form():
    for n, alpha in [(12, 1.6), (8, 2.0), (6, 1.0)]:
        mesh = build_aniso_mesh(n, alpha)
        stats = mesh_stats(mesh)
        assert stats.max_circumradius == pytest.approx(isosceles_circumradius(mesh.h, mesh.row_height), rel=1e-12)
        assert stats.max_diameter == pytest.approx(mesh.h, rel=1e-12)


@pytest.mark.parametrize(("alpha", "columns"), [(1.0, [8, 16, 32]), (1.8, [32, 64]), (2.0, [16, 32, 64])])
def test_circumradius_slope(alpha, columns):
    stats = [mesh_stats(build_aniso_mesh(n, alpha)) for n in columns]
    slope = log_log_slope([s.h for s in stats], [s.max_circumradius for s in stats])
    assert slope == pytest.approx(min(2.0 - alpha, 1.0), abs=0.1)


@pytest.mark.slow
def test_circumradius_slope_fine():
    stats = [mesh_stats(build_aniso_mesh(n, 1.8)) for n in (32, 64, 128)]
    slope = log_log_slope([s.h for s in stats], [s.max_circumradius for s in stats])
    assert slope == pytest.approx(0.2, abs=0.1)


def test_slope_requires_two_points():
    with pytest.raises(ValueError):
        log_log_slope([0.1], [1.0])

# }}}


# {{{ output

def test_dump_off():
    mesh = build_aniso_mesh(2, 1.0)
    stream = io.StringIO()
    dump_off(mesh, stream)
    lines = stream.getvalue().splitlines()
    assert lines[0] == "OFF"
    assert lines[1] == f"{mesh.n_vertices} {mesh.n_elements} 0"
    assert len(lines) == 2 + mesh.n_vertices + mesh.n_elements
    assert lines[-1].startswith("3 ")


def test_dump_data_source():
    mesh = build_aniso_mesh(2, 1.0)
    output = DataOutputMemory()
    rows = DataLoggerSweep({'mesh': MeshDumpDataSource(mesh)}, {'memory': output}).run_data_logging()
    assert len(rows) == mesh.n_vertices + mesh.n_elements
    assert [r['kind'] for r in rows].count('vertex') == mesh.n_vertices
    assert rows[-1]['kind'] == 'triangle'
    assert output.rows == rows


def test_stats_data_source():
    source = MeshStatsDataSource([4, 8], [1.0, 1.5], max_workers=1)
    rows = list(source.read_data())
    assert [(r['alpha'], r['N']) for r in rows] == [(1.0, 4), (1.0, 8), (1.5, 4), (1.5, 8)]
    assert all(r['conforming'] for r in rows)
    assert all(r['area'] == pytest.approx(4.0) for r in rows)
    assert all(r['pattern'] == 'alternating' for r in rows)


def test_stats_data_source_center_split():
    rows = list(MeshStatsDataSource([4], [1.0], pattern='center-split', max_workers=1).read_data())
    assert rows[0]['pattern'] == 'center-split'
    assert rows[0]['elements'] == 4 * 4 * 8
    assert rows[0]['conforming']

# }}}
