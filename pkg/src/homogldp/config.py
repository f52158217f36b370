"""Experiment configs: loading, validation and hashing.

A config is a YAML document with the blocks `media`, `source`, `run`,
`numerics` and `outputs`. Package defaults are merged under every block
except `media`, which must be given. Each block is checked against an
explicit schema; unknown keys, wrong types and out-of-domain values raise
`ConfigError` with the dotted path of the offending field.

Example config:

    media:
      family: convolved
      xi: 1
      kappa: 1
    run:
      epsilons: [0.01]
      levels: [0.03, 0.05, 0.08]
"""

__docformat__ = 'google'

__all__ = [
    'ARTIFACTS',
    'FieldRule',
    'ExperimentConfig',
    'load_config'
]

import hashlib
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Mapping

import numpy as np
from ruamel.yaml import YAML
from ruamel.yaml.error import YAMLError

from homogldp._vendor import canonical_json, cells_per_unit, deep_merge, dotted
from homogldp.constants import COARSE_FLOOR, N_MODES
from homogldp.entities import MediaFamily, MediaModel, SourceSpec, Tilt, TiltFamily
from homogldp.errors import ConfigError, DomainError
from homogldp.lookups import Defaults, FigureRecipes
from homogldp.rng import Rng

log = logging.getLogger(__name__)

ARTIFACTS = ('solution', 'rate', 'empirical', 'samples')
""" Artifact groups that `outputs.artifacts` may switch on."""

_U64 = 2 ** 64

@dataclass(frozen=True)
class FieldRule:
    """
    Schema entry of one config field.

    Args:
        types: Accepted Python types after YAML loading
        check: Predicate on the value; a string return is the error message
        required: Whether the field must be present
    """
    types: tuple[type, ...]
    check: Callable[[Any], bool | str] | None = None
    required: bool = False

def _number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)

def _int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)

def _positive(value: Any) -> bool | str:
    return value > 0 or 'must be positive'

def _open_unit(value: Any) -> bool | str:
    return 0 < value < 1 or 'must lie in (0, 1)'

def _check_xi(value: Any) -> bool | str:
    if value is None:
        return True
    if _int(value):
        return value >= 1 or 'must be a positive integer'
    if isinstance(value, list):
        if len(value) != N_MODES or not all(_number(v) for v in value):
            return f'must be a list of {N_MODES} numbers'
        return all(abs(v) <= 1 for v in value) or 'entries must lie in [-1, 1]'
    return 'must be an integer, a list or null'

def _check_kernel(value: list) -> bool | str:
    if not value or not all(_number(v) and v >= 0 for v in value):
        return 'must be a nonempty list of nonnegative numbers'
    return sum(value) > 0 or 'must have positive mass'

def _check_epsilons(value: list) -> bool | str:
    if not value:
        return 'must not be empty'
    for eps in value:
        if not _number(eps) or cells_per_unit(float(eps)) is None:
            return f'1/epsilon must be a positive integer, got {eps!r}'
    return True

def _check_seed(value: int) -> bool | str:
    return 0 <= value < _U64 or 'must be an unsigned 64-bit integer'

def _check_tilt(value: Any) -> bool | str:
    if isinstance(value, str):
        return value in ('auto', 'none') or "must be 'auto', 'none' or a mapping"
    if set(value) != {'family', 'parameter'}:
        return 'mapping needs exactly the keys family and parameter'
    if value['family'] not in {t.value for t in TiltFamily}:
        return f'unknown tilt family {value["family"]!r}'
    return _number(value['parameter']) or 'parameter must be a number'

def _check_levels(value: Any) -> bool | str:
    if isinstance(value, list):
        return (bool(value) and all(_number(v) for v in value)) or 'must be a nonempty list of numbers'
    keys = {'relative_start', 'relative_stop', 'num'}
    if set(value) != keys:
        return f'mapping needs exactly the keys {", ".join(sorted(keys))}'
    if not (_int(value['num']) and value['num'] >= 1):
        return 'num must be a positive integer'
    return (_number(value['relative_start']) and _number(value['relative_stop'])) or 'relative bounds must be numbers'

def _check_artifacts(value: list) -> bool | str:
    unknown = [a for a in value if a not in ARTIFACTS]
    return not unknown or f'unknown artifacts {unknown}; expected a subset of {list(ARTIFACTS)}'

SCHEMA: dict[str, dict[str, FieldRule]] = {
    'media': {
        'family': FieldRule((str,), lambda v: v in {f.value for f in MediaFamily} or 'must be parameterized or convolved', True),
        'xi': FieldRule((int, list, type(None)), _check_xi),
        'r': FieldRule((int, float), _open_unit),
        'nu_b': FieldRule((int, float), lambda v: v >= 0 or 'must be nonnegative'),
        'kappa': FieldRule((int,), lambda v: v >= 1 or 'must be a positive integer'),
        'h_norm': FieldRule((int, float), _positive),
        'kernel': FieldRule((list,), _check_kernel)
    },
    'source': {
        'pieces': FieldRule((list,), None, True)
    },
    'run': {
        'epsilons': FieldRule((list,), _check_epsilons, True),
        'x': FieldRule((int, float), _open_unit, True),
        'n_samples': FieldRule((int,), _positive),
        'seed': FieldRule((int,), _check_seed, True),
        'n_realizations': FieldRule((int,), _positive),
        'n_paths': FieldRule((int,), _positive),
        'grid_size': FieldRule((int,), lambda v: v >= 2 or 'must be at least 2'),
        'tilt': FieldRule((str, dict), _check_tilt),
        'quantity': FieldRule((str,), lambda v: v in ('u_eps', 'linearized') or "must be 'u_eps' or 'linearized'"),
        'levels': FieldRule((list, dict), _check_levels)
    },
    'numerics': {
        'gauss_order': FieldRule((int,), _positive),
        'ldp_panels': FieldRule((int,), _positive),
        'ldp_order': FieldRule((int,), _positive),
        'theta_order': FieldRule((int,), _positive),
        'simpson_tol': FieldRule((int, float), _positive),
        'wiener_grid_size': FieldRule((int,), lambda v: v >= 10 or 'must be at least 10'),
        'tilt_candidates': FieldRule((int,), lambda v: v >= 2 or 'must be at least 2'),
        'pilot_samples': FieldRule((int,), _positive),
        'validity_factor': FieldRule((int, float), _positive),
        'block_size': FieldRule((int,), _positive),
        'rate_starts': FieldRule((int,), _positive),
        'max_failure_fraction': FieldRule((int, float), lambda v: 0 <= v <= 1 or 'must lie in [0, 1]'),
        'min_ess': FieldRule((int, float), lambda v: v >= 0 or 'must be nonnegative')
    },
    'outputs': {
        'directory': FieldRule((str,), None, True),
        'artifacts': FieldRule((list,), _check_artifacts)
    }
}
""" Allowed keys of every config block with their types and domains."""

def _validate_block(name: str, block: Any) -> dict[str, Any]:
    if not isinstance(block, Mapping):
        raise ConfigError('must be a mapping', name)
    rules = SCHEMA[name]
    for key in block:
        if key not in rules:
            raise ConfigError(f'unknown key; allowed keys are {", ".join(rules)}', dotted(name, key))
    for key, rule in rules.items():
        path = dotted(name, key)
        if key not in block:
            if rule.required:
                raise ConfigError('is required', path)
            continue
        value = block[key]
        if isinstance(value, bool) or not isinstance(value, rule.types):
            raise ConfigError(f'has type {type(value).__name__}', path)
        if rule.check is not None:
            outcome = rule.check(value)
            if outcome is not True:
                raise ConfigError(outcome if isinstance(outcome, str) else 'is invalid', path)
    return dict(block)

def _validate_pieces(pieces: list) -> SourceSpec:
    for index, piece in enumerate(pieces):
        if not (isinstance(piece, list) and len(piece) == 3 and all(_number(v) for v in piece)):
            raise ConfigError('must be a [x_lo, x_hi, value] triple', dotted('source.pieces', index))
    try:
        return SourceSpec(tuple(tuple(piece) for piece in pieces))
    except DomainError as e:
        raise ConfigError(str(e), 'source.pieces') from e

@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """
    A validated experiment config.

    Args:
        media: Media block (family, ξ or null for a prior draw, r, ν_b, κ, ‖h‖₁, kernel)
        source: Source block with the pieces of f
        run: Run block (ε list, x, sample counts, seed, tilt, level grid)
        numerics: Numerical settings
        outputs: Output directory and artifact selection
    """
    media: dict[str, Any]
    source: dict[str, Any]
    run: dict[str, Any]
    numerics: dict[str, Any]
    outputs: dict[str, Any]

    @classmethod
    def from_mapping(cls, data: Any) -> 'ExperimentConfig':
        """Merge defaults under `data` and validate every block.

        Raises:
            ConfigError: unknown or invalid fields, or no media block
        """
        if not isinstance(data, Mapping):
            raise ConfigError('config must be a mapping')
        for key in data:
            if key not in SCHEMA:
                raise ConfigError(f'unknown block; allowed blocks are {", ".join(SCHEMA)}', str(key))
        if 'media' not in data:
            raise ConfigError('is required', 'media')
        defaults = Defaults.get_lookup().as_mapping()
        merged = deep_merge(defaults, data)
        blocks = {name: _validate_block(name, merged.get(name, {})) for name in SCHEMA}
        _validate_pieces(blocks['source']['pieces'])
        media = blocks['media']
        xi = media.get('xi')
        if media['family'] == MediaFamily.PARAMETERIZED.value and _int(xi):
            raise ConfigError(f'must be a list of {N_MODES} numbers for parameterized media', 'media.xi')
        if media['family'] == MediaFamily.CONVOLVED.value and isinstance(xi, list):
            raise ConfigError('must be a positive integer for convolved media', 'media.xi')
        if media['family'] == MediaFamily.PARAMETERIZED.value and media['nu_b'] >= COARSE_FLOOR:
            raise ConfigError(f'must be below the coarse floor {COARSE_FLOOR}', 'media.nu_b')
        return cls(**blocks)

    @classmethod
    def for_figure(cls, name: str) -> 'ExperimentConfig':
        return cls.from_mapping(FigureRecipes.get_lookup().recipe(name)['config'])

    def with_overrides(self, *, seed: int | None = None, directory: str | Path | None = None) -> 'ExperimentConfig':
        """A copy with the CLI's --seed and --out applied."""
        data = self.as_mapping()
        if seed is not None:
            data['run']['seed'] = seed
        if directory is not None:
            data['outputs']['directory'] = str(directory)
        return type(self).from_mapping(data)

    def as_mapping(self) -> dict[str, Any]:
        return {
            'media': dict(self.media),
            'source': dict(self.source),
            'run': dict(self.run),
            'numerics': dict(self.numerics),
            'outputs': dict(self.outputs)
        }

    @property
    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON of the validated config."""
        return hashlib.sha256(canonical_json(self.as_mapping()).encode('utf-8')).hexdigest()

    @property
    def seed(self) -> int:
        return int(self.run['seed'])

    @property
    def epsilons(self) -> list[float]:
        return [float(eps) for eps in self.run['epsilons']]

    @property
    def x(self) -> float:
        return float(self.run['x'])

    @property
    def directory(self) -> Path:
        return Path(self.outputs['directory'])

    def wants(self, artifact: str) -> bool:
        return artifact in self.outputs.get('artifacts', ARTIFACTS)

    def source_spec(self) -> SourceSpec:
        return _validate_pieces(self.source['pieces'])

    def media_model(self) -> MediaModel:
        """The configured medium; a null ξ is drawn from the prior on the 'coarse' stream."""
        from homogldp.media import media_from_config
        try:
            return media_from_config(self.media, Rng.named(self.seed, 'coarse'))
        except DomainError as e:
            raise ConfigError(str(e), 'media') from e

    def tilt(self) -> Tilt | str:
        value = self.run.get('tilt', 'auto')
        if value == 'auto':
            return 'auto'
        if value == 'none':
            return Tilt()
        return Tilt(TiltFamily(value['family']), float(value['parameter']))

    def levels(self, u0: float) -> np.ndarray:
        """Level grid: an explicit list, or `num` points between the relative bounds times u₀."""
        value = self.run['levels']
        if isinstance(value, list):
            return np.array(value, dtype=float)
        if not math.isfinite(u0) or u0 == 0:
            raise ConfigError('relative levels need a nonzero homogenized solution', 'run.levels')
        return u0 * np.linspace(value['relative_start'], value['relative_stop'], value['num'])

    def numeric(self, key: str) -> Any:
        return self.numerics[key]

def load_config(path: Path | str) -> ExperimentConfig:
    """Read and validate a YAML experiment config.

    Raises:
        ConfigError: unreadable file, malformed YAML or invalid fields
    """
    path = Path(path)
    yaml = YAML(typ='safe')
    try:
        with open(path, encoding='utf-8') as f:
            data = yaml.load(f)
    except OSError as e:
        raise ConfigError(f'cannot read config {path}: {e.strerror}') from e
    except YAMLError as e:
        raise ConfigError(f'malformed YAML in {path}: {e}') from e
    log.debug('loaded config %s', path)
    return ExperimentConfig.from_mapping(data if data is not None else {})
