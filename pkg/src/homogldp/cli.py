"""Command-line experiment runner.

    homogldp [-v | --quiet] COMMAND [--config PATH] [--out DIR] [--seed U64] [--threads N]

Commands and the CSV files they write (columns in parentheses):

- `media-sample`: realization.csv (cell_index, inv_value)
- `solve`: solution.csv (x, u_eps, u0, v_eps, R_eps)
- `homogenize`: homogenized.csv (x, u0, inv_a0)
- `corrector`: corrector_variance.csv (x, c_c), corrector_paths.csv (path, x, v)
- `rate --kind approx|full|gaussian|chernoff`: rate_<kind>.csv
  (ell, rate, status, plus lambda_star or z1..z4, or clt_valid)
- `empirical`: empirical_rate.csv (ell, neg_rate, neg_rate_normalized, ess,
  n_exceed), samples.csv (level_index, value, log_weight),
  samples_manifest.yaml
- `figure NAME`: the files of every step of the named recipe plus
  manifest.yaml

Files are suffixed with 1/ε and the realization index when a run produces
more than one of a kind. Every CSV starts with `# key=value` lines holding
the config hash, master seed and library version.

Exit codes: 0 success, 2 invalid config or arguments, 3 numerical failure.
"""

__docformat__ = 'google'

__all__ = [
    'Experiment',
    'build_parser',
    'main'
]

import argparse
import logging
import math
from pathlib import Path
from typing import Any, Callable

import numpy as np

from homogldp import __version__
from homogldp.artifacts import ArtifactHeader, write_csv, write_manifest
from homogldp.config import ExperimentConfig, load_config
from homogldp.corrector import clt_validity, corrector_variance, sample_corrector_paths
from homogldp.entities import CorrectorSpec, CramerKind, RateCurve, Tilt
from homogldp.errors import ConfigError, HomogLDPError, NumericalError
from homogldp.ldp import (
    approx_rate_curve,
    chernoff_curve,
    cramer_functional,
    full_rate_curve,
    gaussian_rate_curve,
    steepness_check
)
from homogldp.lookups import FigureRecipes
from homogldp.media import cells_for, inv_homogenized, realization_columns, sample_fine
from homogldp.montecarlo import run_empirical, run_samples
from homogldp.rng import Rng
from homogldp.solver import homogenized_integrals, solve_homogenized, solve_path

log = logging.getLogger(__name__)

RATE_KINDS = ('approx', 'full', 'gaussian', 'chernoff')

def _stem(name: str, *tags: Any) -> str:
    """
    Examples:
        >>> _stem('solution')
        'solution.csv'
        >>> _stem('solution', 100, 2)
        'solution_100_2.csv'
    """
    return '_'.join([name] + [str(t) for t in tags]) + '.csv'

class Experiment:
    """
    Runs the commands of one validated config into its output directory.

    Args:
        config: Validated experiment config
        threads: Worker threads for Monte Carlo
    """

    def __init__(self, config: ExperimentConfig, threads: int = 1) -> None:
        self.config = config
        self.threads = max(int(threads), 1)
        self.f = config.source_spec()
        self.model = config.media_model()
        self.written: list[Path] = []

    def header(self, **extra: Any) -> ArtifactHeader:
        return ArtifactHeader(self.config.config_hash, self.config.seed, __version__, extra)

    def write(self, filename: str, columns: dict[str, Any], **extra: Any) -> Path:
        path = write_csv(self.config.directory / filename, self.header(**extra), columns)
        self.written.append(path)
        return path

    def _tags(self, epsilon: float, index: int = 0, count: int = 1) -> list[Any]:
        tags: list[Any] = []
        if len(self.config.epsilons) > 1:
            tags.append(cells_for(epsilon))
        if count > 1:
            tags.append(index)
        return tags

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, int(self.config.run['grid_size']))

    @property
    def corrector_spec(self) -> CorrectorSpec:
        return CorrectorSpec(self.model, self.f, int(self.config.numeric('wiener_grid_size')))

    def u0(self) -> float:
        return float(homogenized_integrals(self.model, self.f, self.config.x).u0)

    ## commands

    def media_sample(self) -> list[Path]:
        count = int(self.config.run['n_realizations'])
        paths = []
        for epsilon in self.config.epsilons:
            for k in range(count):
                realization = sample_fine(self.model, epsilon, Rng.named(self.config.seed, f'fine-{cells_for(epsilon)}-{k}'))
                paths.append(self.write(
                    _stem('realization', *self._tags(epsilon, k, count)),
                    realization_columns(self.model, realization),
                    epsilon=epsilon, realization=k, family=self.model.family.value
                ))
        return paths

    def solve(self) -> list[Path]:
        count = int(self.config.run['n_realizations'])
        order = int(self.config.numeric('gauss_order'))
        paths = []
        for epsilon in self.config.epsilons:
            for k in range(count):
                realization = sample_fine(self.model, epsilon, Rng.named(self.config.seed, f'fine-{cells_for(epsilon)}-{k}'))
                path = solve_path(self.model, realization, self.f, self.grid, order)
                paths.append(self.write(
                    _stem('solution', *self._tags(epsilon, k, count)),
                    {'x': path.grid, 'u_eps': path.values, 'u0': path.u0, 'v_eps': path.v_eps, 'R_eps': path.r_eps},
                    epsilon=epsilon, realization=k
                ))
        return paths

    def homogenize(self) -> list[Path]:
        grid = self.grid
        u0 = solve_homogenized(self.model, self.f, grid, float(self.config.numeric('simpson_tol'))).values
        return [self.write(
            'homogenized.csv',
            {'x': grid, 'u0': u0, 'inv_a0': inv_homogenized(self.model, grid)},
            u0_at_x=self.u0(), x=self.config.x
        )]

    def corrector(self) -> list[Path]:
        spec = self.corrector_spec
        interior = self.grid[1:-1]
        variance = np.array([corrector_variance(spec, float(x)) for x in interior])
        paths = [self.write('corrector_variance.csv', {'x': interior, 'c_c': variance})]
        n_paths = int(self.config.run['n_paths'])
        draws = sample_corrector_paths(
            spec, interior, Rng.named(self.config.seed, 'corrector'), n_paths,
            int(self.config.numeric('block_size')), self.threads
        )
        paths.append(self.write(
            'corrector_paths.csv',
            {'path': np.repeat(np.arange(n_paths), len(interior)), 'x': np.tile(interior, n_paths), 'v': draws.ravel()}
        ))
        return paths

    def rate(self, kind: str) -> list[Path]:
        if kind not in RATE_KINDS:
            raise ConfigError(f'unknown rate kind {kind!r}; expected one of {", ".join(RATE_KINDS)}', 'kind')
        x = self.config.x
        cramer_kind = CramerKind.FULL_4D if kind == 'full' else CramerKind.APPROX_1D
        cf = cramer_functional(
            self.model, self.f, x, cramer_kind,
            int(self.config.numeric('ldp_panels')), int(self.config.numeric('ldp_order'))
        )
        report = steepness_check(cf)
        if not report.steep:
            log.warning('steepness could not be established; rates may be upper bounds only')
        levels = self.config.levels(cf.u0)
        if kind == 'chernoff':
            return [
                self._write_curve(chernoff_curve(self.model, self.f, x, eps, levels), report, _stem('rate_chernoff', *self._tags(eps)), epsilon=eps)
                for eps in self.config.epsilons
            ]
        if kind == 'gaussian':
            c_c = corrector_variance(self.corrector_spec, x)
            curve = gaussian_rate_curve(cf.u0, c_c, levels)
            epsilon = self.config.epsilons[0]
            factor = float(self.config.numeric('validity_factor'))
            valid = [ell != cf.u0 and clt_validity(cf.u0, c_c, epsilon, float(ell), factor).valid for ell in curve.levels]
            return [self._write_curve(curve, report, 'rate_gaussian.csv', c_c=c_c, clt_valid=np.array(valid), epsilon=epsilon)]
        if kind == 'approx':
            curve = approx_rate_curve(cf, levels)
        else:
            curve = full_rate_curve(cf, levels, starts=int(self.config.numeric('rate_starts')))
        return [self._write_curve(curve, report, f'rate_{kind}.csv')]

    def _write_curve(self, curve: RateCurve, report: Any, filename: str, clt_valid: Any = None, **extra: Any) -> Path:
        columns: dict[str, Any] = {
            'ell': curve.levels,
            'rate': curve.values,
            'status': [s.value for s in curve.status]
        }
        if curve.argmax.ndim == 2:
            for i in range(4):
                columns[f'z{i + 1}'] = curve.argmax[:, i]
        elif curve.kind == 'approx':
            columns['lambda_star'] = curve.argmax
        if clt_valid is not None:
            columns['clt_valid'] = clt_valid
        path = self.write(filename, columns, kind=curve.kind, u0=self.u0(), **report.as_header(), **extra)
        limit = float(self.config.numeric('max_failure_fraction'))
        if curve.failure_fraction > limit:
            raise NumericalError(
                f'{curve.kind} rate did not converge at {curve.failure_fraction:.0%} of levels (limit {limit:.0%}); see {path}'
            )
        return path

    def empirical(self) -> list[Path]:
        run = self.config.run
        min_ess = float(self.config.numeric('min_ess'))
        numerics = self._sampling_numerics()
        paths = []
        for epsilon in self.config.epsilons:
            tags = self._tags(epsilon)
            levels = self.config.levels(self.u0())
            rng = Rng.named(self.config.seed, f'empirical-{cells_for(epsilon)}')
            rate, runs = run_empirical(
                self.model, self.f, epsilon, self.config.x, int(run['n_samples']), levels, rng,
                tilt=self.config.tilt(), quantity=run['quantity'], threads=self.threads, **numerics
            )
            paths.append(self.write(
                _stem('empirical_rate', *tags),
                {
                    'ell': rate.levels,
                    'neg_rate': rate.neg_values,
                    'neg_rate_normalized': rate.neg_normalized_values,
                    'ess': rate.ess,
                    'n_exceed': rate.n_exceed
                },
                epsilon=epsilon, center=rate.center, quantity=run['quantity'], n_samples=int(run['n_samples'])
            ))
            if self.config.wants('samples'):
                paths.append(self.write(
                    _stem('samples', *tags),
                    {
                        'level_index': np.concatenate([np.full(s.n, i) for i, s in enumerate(runs)]),
                        'value': np.concatenate([s.values for s in runs]),
                        'log_weight': np.concatenate([s.log_weights for s in runs])
                    },
                    epsilon=epsilon
                ))
            manifest = {
                'config_hash': self.config.config_hash,
                'master_seed': self.config.seed,
                'version': __version__,
                'epsilon': epsilon,
                'center': float(rate.center),
                'runs': [
                    {'tilt': s.tilt.family.value, 'parameter': s.tilt.parameter, 'n': s.n, 'quantity': s.quantity}
                    for s in runs
                ]
            }
            manifest_path = self.config.directory / _stem('samples_manifest', *tags).replace('.csv', '.yaml')
            self.written.append(write_manifest(manifest_path, manifest))
            paths.append(manifest_path)
            if not np.any(rate.ess >= min_ess):
                raise NumericalError(f'effective sample size below {min_ess:g} at every level for epsilon={epsilon}')
        return paths

    def _sampling_numerics(self) -> dict[str, Any]:
        return {
            'pilot': int(self.config.numeric('pilot_samples')),
            'candidates': int(self.config.numeric('tilt_candidates')),
            'block_size': int(self.config.numeric('block_size')),
            'order': int(self.config.numeric('gauss_order'))
        }

    def corrector_sweep(self) -> list[Path]:
        """Var[u_ε(x)]/ε from direct draws against C_c(x), one row per ε."""
        x = self.config.x
        c_c = corrector_variance(self.corrector_spec, x)
        n = int(self.config.run['n_samples'])
        numerics = self._sampling_numerics()
        rows = []
        for epsilon in self.config.epsilons:
            samples = run_samples(
                self.model, self.f, epsilon, x, n, Tilt(), Rng.named(self.config.seed, f'sweep-{cells_for(epsilon)}'),
                threads=self.threads, block_size=numerics['block_size'], order=numerics['order']
            )
            rows.append((cells_for(epsilon), float(np.var(samples.values, ddof=1)) / epsilon))
        inverse, ratio = (np.array(column) for column in zip(*rows))
        return [self.write(
            'corrector_sweep.csv',
            {'inv_epsilon': inverse, 'var_over_eps': ratio, 'c_c': np.full(len(rows), c_c), 'rel_error': ratio / c_c - 1.0},
            x=x, n_samples=n
        )]

    def pdf_samples(self) -> list[Path]:
        """Draws of u_ε(x) next to draws of u₀ + √ε v(x) for density overlays."""
        x = self.config.x
        n = int(self.config.run['n_samples'])
        numerics = self._sampling_numerics()
        spec = self.corrector_spec
        u0 = self.u0()
        paths = []
        for epsilon in self.config.epsilons:
            tag = cells_for(epsilon)
            samples = run_samples(
                self.model, self.f, epsilon, x, n, Tilt(), Rng.named(self.config.seed, f'pdf-{tag}'),
                threads=self.threads, block_size=numerics['block_size'], order=numerics['order']
            )
            v = sample_corrector_paths(spec, np.array([x]), Rng.named(self.config.seed, f'pdf-corrector-{tag}'), n, numerics['block_size'], self.threads)[:, 0]
            paths.append(self.write(
                _stem('pdf_samples', *self._tags(epsilon)),
                {'u_eps': samples.values, 'corrector_prediction': u0 + math.sqrt(epsilon) * v},
                epsilon=epsilon, x=x
            ))
        return paths

    def figure(self, name: str) -> list[Path]:
        recipe = FigureRecipes.get_lookup().recipe(name)
        steps: dict[str, Callable[[], list[Path]]] = {
            'homogenize': self.homogenize,
            'rate_approx': lambda: self.rate('approx'),
            'rate_full': lambda: self.rate('full'),
            'rate_gaussian': lambda: self.rate('gaussian'),
            'rate_chernoff': lambda: self.rate('chernoff'),
            'empirical': self.empirical,
            'corrector_sweep': self.corrector_sweep,
            'pdf_samples': self.pdf_samples
        }
        for step in recipe['steps']:
            if step not in steps:
                raise ConfigError(f'unknown step {step!r}', f'figures.{name}.steps')
            log.info('figure %s: %s', name, step)
            steps[step]()
        manifest = {
            'figure': name,
            'description': recipe.get('description', ''),
            'config_hash': self.config.config_hash,
            'master_seed': self.config.seed,
            'version': __version__,
            'config': self.config.as_mapping(),
            'files': [p.name for p in self.written]
        }
        self.written.append(write_manifest(self.config.directory / 'manifest.yaml', manifest))
        return list(self.written)

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=Path, help='experiment config (YAML)')
    common.add_argument('--out', type=Path, help='output directory, overrides outputs.directory')
    common.add_argument('--seed', type=int, help='master seed (unsigned 64-bit), overrides run.seed')
    common.add_argument('--threads', type=int, default=1, help='worker threads for Monte Carlo')

    parser = argparse.ArgumentParser(
        prog='homogldp',
        description='Homogenization, corrector and large deviations of a 1D random elliptic problem.',
        epilog=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='INFO logging; repeat for DEBUG')
    parser.add_argument('--quiet', action='store_true', help='log errors only')
    commands = parser.add_subparsers(dest='command', required=True)
    commands.add_parser('media-sample', parents=[common], help='sample fine-scale realizations')
    commands.add_parser('solve', parents=[common], help='solve realizations on the uniform grid')
    commands.add_parser('homogenize', parents=[common], help='homogenized solution')
    commands.add_parser('corrector', parents=[common], help='corrector variance and paths')
    rate = commands.add_parser('rate', parents=[common], help='rate function curves')
    rate.add_argument('--kind', choices=RATE_KINDS, default='approx')
    commands.add_parser('empirical', parents=[common], help='empirical rate functions by Monte Carlo')
    figure = commands.add_parser('figure', parents=[common], help='run a named figure recipe')
    figure.add_argument('name')
    return parser

def _configure_logging(verbose: int, quiet: bool) -> None:
    if quiet:
        level = logging.ERROR
    elif verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s', force=True)

def _load(args: argparse.Namespace) -> ExperimentConfig:
    if args.command == 'figure':
        config = ExperimentConfig.for_figure(args.name)
    elif args.config is None:
        raise ConfigError('--config is required for this command')
    else:
        config = load_config(args.config)
    return config.with_overrides(seed=args.seed, directory=args.out)

def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    _configure_logging(args.verbose, args.quiet)
    try:
        experiment = Experiment(_load(args), args.threads)
        if args.command == 'figure':
            paths = experiment.figure(args.name)
        elif args.command == 'rate':
            paths = experiment.rate(args.kind)
        else:
            paths = getattr(experiment, args.command.replace('-', '_'))()
    except HomogLDPError as e:
        log.error('%s', e)
        return e.exit_code
    log.info('wrote %d file(s) to %s', len(paths), experiment.config.directory)
    return 0
