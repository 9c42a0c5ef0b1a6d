"""
Module Cli: command line entry point of all experiments and verification suites

Every subcommand builds a data source and drains it through a DataLoggerSweep into a DataOutputCsv, written to the
file given by --out or to stdout. Logs go to stderr.

Exit codes: 0 success, 1 verification failure, 2 usage or input error, 3 solver failure.
"""

from dataclasses import asdict, dataclass, field
from typing import TextIO
import argparse
import sys
from circumradiusfem.Base import Auxiliary
from circumradiusfem.Base.DataLogger import DataLoggerSweep
from circumradiusfem.Base.DataOutput import DataOutputCsv
from circumradiusfem.Base.DataSource import DataSourceBase, ParameterSweepDataSource
from circumradiusfem.Base.Errors import CircumradiusFemError, ConvergenceError
from circumradiusfem.Constants import BabuskaAziz
from circumradiusfem.Constants.ConstantsDataSource import ConstantsDataSource
from circumradiusfem.DiffQuot import GridQuotient
from circumradiusfem.Fem import ConvergenceDataSource
from circumradiusfem.Fem.ConjugateGradient import DEFAULT_TOLERANCE
from circumradiusfem.Fem.Poisson import CylinderProblem
from circumradiusfem.Geometry.Triangle import Triangle, jamet_factor, kobayashi_constant, triangle_metrics
from circumradiusfem.Lagrange import RandomTriangles
from circumradiusfem.Lagrange.InterpErrorDataSource import InterpErrorDataSource
from circumradiusfem.Mesh import AnisoMesh
from circumradiusfem.Mesh.MeshDataSource import MeshDumpDataSource, MeshStatsDataSource
from circumradiusfem.VerifyAll import CHECK_GROUPS, VerifyAllDataSource, all_passed
import logging.config
# Load logging configuration from file
logger = logging.getLogger(__name__)

EXIT_SUCCESS = 0
EXIT_VERIFICATION_FAILURE = 1
EXIT_USAGE = 2
EXIT_SOLVER_FAILURE = 3

SUBCOMMANDS = ('tri-report', 'interp-error', 'constants', 'dq-verify', 'mesh-dump', 'mesh-stats', 'convergence',
               'verify-all')

# Options shared by all subcommands, not part of the parameter map
COMMON_OPTIONS = ('subcommand', 'config', 'dump_config', 'log_level', 'seed', 'out')

TRI_REPORT_NAMES = ('x1', 'y1', 'x2', 'y2', 'x3', 'y3', 'A', 'B', 'C', 'area', 'h_K', 'rho_K', 'R_K', 'theta1',
                    'theta2', 'theta3', 'max_angle', 'chunkiness', 'semiregularity', 'C_K', 'jamet_factor')

DQ_VERIFY_NAMES = ('check', 'detail', 'max_error', 'tolerance', 'passed')


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    parameters: dict = field(default_factory=dict)  # Typed subcommand flags
    seed: int = Auxiliary.DEFAULT_SEED
    out: str | None = None  # Output file, stdout if None

    def as_dict(self) -> dict:
        return asdict(self)


def _float_list(text: str) -> list[float]:
    return Auxiliary.parse_number_list(text, float)


def _int_list(text: str) -> list[int]:
    return Auxiliary.parse_number_list(text, int)


def _basis_degree(text: str) -> int:
    degree = int(text)
    if not 1 <= degree <= BabuskaAziz.MAX_BASIS_DEGREE:
        raise argparse.ArgumentTypeError(f"must be in 1..{BabuskaAziz.MAX_BASIS_DEGREE}, got '{degree}'")
    return degree


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    """Argument parser and the sub-parser of each subcommand"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', default=None,
                        help="JSON file with default parameters, flags on the command line win")
    common.add_argument('--dump-config', default=None, help="Write the effective configuration to this JSON file")
    common.add_argument('--log-level', default=None, choices=('DEBUG', 'INFO', 'WARNING', 'ERROR'))
    common.add_argument('--seed', type=int, default=Auxiliary.DEFAULT_SEED,
                        help=f"Master seed (default: {Auxiliary.DEFAULT_SEED:#x})")
    common.add_argument('--out', default=None, help="Output file (default: stdout)")

    parser = argparse.ArgumentParser(
        prog='circumradiusfem',
        description="Circumradius interpolation estimates and P1/P2 FEM on anisotropic meshes",
    )
    subparsers = parser.add_subparsers(dest='subcommand', required=True)
    sub = {}

    p = subparsers.add_parser('tri-report', parents=[common], help="Metrics of one triangle")
    p.add_argument('coordinates', type=float, nargs=6, metavar='X', help="x1 y1 x2 y2 x3 y3")
    sub['tri-report'] = p

    p = subparsers.add_parser('interp-error', parents=[common], help="Interpolation errors along a triangle family")
    p.add_argument('--k', type=int, default=1, help="Interpolation order")
    p.add_argument('--m', type=int, default=1, help="Seminorm order")
    p.add_argument('--p', type=float, default=2.0, help="Exponent, 'inf' for the maximum norm")
    p.add_argument('--family', choices=RandomTriangles.FAMILIES, default='example1-right')
    p.add_argument('--h-min', type=float, default=1e-4)
    p.add_argument('--h-max', type=float, default=1e-1)
    p.add_argument('--samples', type=int, default=4)
    p.add_argument('--a', type=float, default=None, help="First exponent of the example families")
    p.add_argument('--b', type=float, default=None, help="Second exponent of the right families")
    sub['interp-error'] = p

    p = subparsers.add_parser('constants', parents=[common], help="Constant estimates on squeezed triangles")
    p.add_argument('--k', type=int, default=1)
    p.add_argument('--m', type=int, default=1)
    p.add_argument('--p', type=float, default=2.0)
    p.add_argument('--alpha', type=_float_list, default=[1.0], help="Comma separated squeezing factors in x")
    p.add_argument('--beta', type=_float_list, default=[1.0], help="Comma separated squeezing factors in y")
    p.add_argument('--basis-degree', type=_basis_degree, default=8,
                   help=f"Trial polynomial degree N, at most {BabuskaAziz.MAX_BASIS_DEGREE}")
    sub['constants'] = p

    p = subparsers.add_parser('dq-verify', parents=[common], help="Divided difference and box integral identities")
    p.add_argument('--max-order', type=int, default=GridQuotient.MAX_SWEEP_ORDER)
    sub['dq-verify'] = p

    p = subparsers.add_parser('mesh-dump', parents=[common], help="Vertices and triangles of one mesh")
    p.add_argument('--N', type=int, default=8, help="Number of columns")
    p.add_argument('--alpha', type=float, default=1.6)
    p.add_argument('--format', choices=('csv', 'off'), default='csv')
    p.add_argument('--pattern', choices=AnisoMesh.PATTERNS, default=AnisoMesh.DEFAULT_PATTERN)
    sub['mesh-dump'] = p

    p = subparsers.add_parser('mesh-stats', parents=[common], help="Statistics of meshes")
    p.add_argument('--Ns', type=_int_list, default=[8], help="Comma separated numbers of columns")
    p.add_argument('--alphas', type=_float_list, default=[1.6], help="Comma separated anisotropy exponents")
    p.add_argument('--pattern', choices=AnisoMesh.PATTERNS, default=AnisoMesh.DEFAULT_PATTERN)
    sub['mesh-stats'] = p

    p = subparsers.add_parser('convergence', parents=[common], help="H1 errors of the FEM on anisotropic meshes")
    p.add_argument('--k', type=int, default=1, choices=(1, 2), help="Element order")
    p.add_argument('--alphas', type=_float_list, default=[1.0, 1.4, 1.6, 1.8, 2.0, 2.1])
    p.add_argument('--Ns', type=_int_list, default=[8, 16, 32])
    p.add_argument('--tol', type=float, default=DEFAULT_TOLERANCE)
    p.add_argument('--radius', type=float, default=1.1, help="Radius a of the cylinder solution")
    p.add_argument('--slopes-out', default=None, help="Also write the slope table to this file")
    sub['convergence'] = p

    p = subparsers.add_parser('verify-all', parents=[common], help="All invariant suites, PASS/FAIL table")
    p.add_argument('--groups', type=lambda text: [g.strip() for g in text.split(',') if g.strip()], default=None,
                   help=f"Comma separated subset of {','.join(CHECK_GROUPS)}")
    sub['verify-all'] = p
    return parser, sub


def parse_config(argv: list[str] | None = None) -> RunConfig:
    """
    Parse the command line into a RunConfig
    :param argv: Arguments without the program name, if None, use sys.argv[1:]
    :raises SystemExit: On usage errors, with code 2
    """
    parser, sub = build_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        content = Auxiliary.load_json(args.config)
        if not isinstance(content, dict):
            raise ValueError(f"Configuration file '{args.config}' must contain a JSON object")
        if content.get('subcommand', args.subcommand) != args.subcommand:
            raise ValueError(f"Configuration file '{args.config}' is for subcommand '{content['subcommand']}', "
                             f"not '{args.subcommand}'")
        defaults = dict(content.get('parameters', {}))
        for key in ('seed', 'out'):
            if key in content:
                defaults[key] = content[key]
        known = {action.dest for action in sub[args.subcommand]._actions}
        unknown = [k for k in defaults if k not in known]
        if unknown:
            raise ValueError(f"Unknown parameters {unknown} in configuration file '{args.config}'")
        sub[args.subcommand].set_defaults(**defaults)
        args = parser.parse_args(argv)
    if args.log_level is not None:
        logging.getLogger().setLevel(args.log_level)
    values = vars(args)
    config = RunConfig(
        subcommand=args.subcommand,
        parameters={k: v for k, v in values.items() if k not in COMMON_OPTIONS},
        seed=args.seed,
        out=args.out,
    )
    if args.dump_config is not None:
        Auxiliary.dump_json(config.as_dict(), args.dump_config)
        logger.info(f"Effective configuration written to '{args.dump_config}'")
    return config


def _tri_report_row(point: dict) -> dict:
    coordinates = point['coordinates']
    tri = Triangle.from_coordinates(*coordinates)
    metrics = triangle_metrics(tri)
    row = dict(zip(TRI_REPORT_NAMES[:6], coordinates))
    row.update(metrics.as_dict())
    row.update({
        'max_angle': metrics.max_angle,
        'C_K': kobayashi_constant(tri),
        'jamet_factor': jamet_factor(tri),
    })
    return row


def _write_csv(sources: dict[str, DataSourceBase], file_name: str | None, stream: TextIO | None) -> list[dict]:
    output = DataOutputCsv(file_name=file_name, stream=stream)
    return DataLoggerSweep(sources, {'csv': output}).run_data_logging()


def _run_mesh_dump(config: RunConfig, stream: TextIO | None) -> int:
    params = config.parameters
    mesh = AnisoMesh.build_aniso_mesh(params['N'], params['alpha'], params['pattern'])
    if params['format'] == 'csv':
        _write_csv({'mesh': MeshDumpDataSource(mesh)}, config.out, stream)
        return EXIT_SUCCESS
    if config.out is None:
        AnisoMesh.dump_off(mesh, sys.stdout if stream is None else stream)
        return EXIT_SUCCESS
    try:
        with open(config.out, 'w') as f:
            AnisoMesh.dump_off(mesh, f)
    except OSError as e:
        raise OSError(f"Unable to write OFF file '{config.out}': {e}") from e
    return EXIT_SUCCESS


def _run_convergence(config: RunConfig, stream: TextIO | None) -> int:
    params = config.parameters
    source = ConvergenceDataSource.ConvergenceDataSource(
        k=params['k'],
        alphas=params['alphas'],
        columns=params['Ns'],
        tol=params['tol'],
        problem=CylinderProblem(params['radius']),
    )
    rows = _write_csv({'convergence': source}, config.out, stream)
    table = ConvergenceDataSource.slopes(rows)
    for entry in table:
        logger.info(f"alpha={entry['alpha']}: slope_h={entry['slope_h']}, slope_R={entry['slope_R']}, "
                    f"slope_R_hk={entry['slope_R_hk']}, monotone={entry['monotone']}")
    if params['slopes_out'] is not None:
        slopes_source = ParameterSweepDataSource(ConvergenceDataSource.SLOPE_NAMES, [{}], lambda _: table, 1)
        _write_csv({'slopes': slopes_source}, params['slopes_out'], stream)
    failed = [r for r in rows if r['failed']]
    if failed:
        logger.error(f"Solver failure in {len(failed)} of {len(rows)} run(s)")
        return EXIT_SOLVER_FAILURE
    for r in ConvergenceDataSource.cea_violations(rows):
        logger.warning(f"FEM error above the interpolation error at alpha={r['alpha']}, N={r['N']}")
    return EXIT_SUCCESS


def _report_checks(rows: list[dict], what: str) -> int:
    passed = sum(1 for r in rows if r['passed'])
    logger.info(f"{what}: {'PASS' if all_passed(rows) else 'FAIL'}, {passed} of {len(rows)} check(s) passed")
    return EXIT_SUCCESS if all_passed(rows) else EXIT_VERIFICATION_FAILURE


def run(config: RunConfig, stream: TextIO | None = None) -> int:
    """
    Run one subcommand
    :param config: Parsed configuration
    :param stream: Text stream of the CSV output when config.out is None, if None, use sys.stdout
    :return: Exit code
    """
    params = config.parameters
    logger.info(f"Running subcommand '{config.subcommand}' with seed {config.seed:#x} ...")
    if config.subcommand == 'tri-report':
        source = ParameterSweepDataSource(TRI_REPORT_NAMES, [{'coordinates': params['coordinates']}],
                                          _tri_report_row, 1)
        _write_csv({'triangle': source}, config.out, stream)
        return EXIT_SUCCESS
    if config.subcommand == 'interp-error':
        exponents = {key: params[key] for key in ('a', 'b') if params[key] is not None}
        source = InterpErrorDataSource(
            k=params['k'],
            m=params['m'],
            p=params['p'],
            family=params['family'],
            h_max=params['h_max'],
            h_min=params['h_min'],
            samples=params['samples'],
            seed=config.seed,
            exponents=exponents,
        )
        _write_csv({'interp_error': source}, config.out, stream)
        return EXIT_SUCCESS
    if config.subcommand == 'constants':
        source = ConstantsDataSource(
            k=params['k'],
            m=params['m'],
            p=params['p'],
            alphas=params['alpha'],
            betas=params['beta'],
            basis_degree=params['basis_degree'],
            seed=config.seed,
        )
        _write_csv({'constants': source}, config.out, stream)
        return EXIT_SUCCESS
    if config.subcommand == 'dq-verify':
        source = ParameterSweepDataSource(
            DQ_VERIFY_NAMES, [{}],
            lambda _: GridQuotient.run_identity_suite(seed=config.seed, max_order=params['max_order']), 1)
        return _report_checks(_write_csv({'identities': source}, config.out, stream), 'Identity suite')
    if config.subcommand == 'mesh-dump':
        return _run_mesh_dump(config, stream)
    if config.subcommand == 'mesh-stats':
        source = MeshStatsDataSource(params['Ns'], params['alphas'], params['pattern'])
        _write_csv({'mesh_stats': source}, config.out, stream)
        return EXIT_SUCCESS
    if config.subcommand == 'convergence':
        return _run_convergence(config, stream)
    if config.subcommand == 'verify-all':
        source = VerifyAllDataSource(seed=config.seed, groups=params['groups'])
        return _report_checks(_write_csv({'verify_all': source}, config.out, stream), 'Verification')
    raise ValueError(f"Unknown subcommand '{config.subcommand}', expected one of {SUBCOMMANDS}")


def main(argv: list[str] | None = None, stream: TextIO | None = None) -> int:
    """Parse, run and map failures to exit codes"""
    try:
        config = parse_config(argv)
    except SystemExit as e:
        return EXIT_SUCCESS if e.code in (0, None) else EXIT_USAGE
    except (OSError, ValueError) as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_USAGE
    try:
        return run(config, stream)
    except ConvergenceError as e:
        logger.error(f"Solver failure: {e}")
        return EXIT_SOLVER_FAILURE
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_USAGE
    except (CircumradiusFemError, ValueError) as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
