"""CSV and manifest writers for experiment outputs.

Every CSV starts with `# key=value` header lines carrying the config hash,
the master seed and the library version, followed by one header row of
column names. Numbers are written with `repr` so identical inputs give
byte-identical files.
"""

__docformat__ = 'google'

__all__ = [
    'ArtifactHeader',
    'write_csv',
    'read_header',
    'write_manifest'
]

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np
from ruamel.yaml import YAML

from homogldp._vendor import format_number

log = logging.getLogger(__name__)

@dataclass(frozen=True)
class ArtifactHeader:
    """
    Provenance lines written at the top of every artifact.

    Args:
        config_hash: SHA-256 of the canonical experiment config
        master_seed: Seed all random streams derive from
        version: Library version
        extra: Further key/value pairs, e.g. the steepness report
    """
    config_hash: str
    master_seed: int
    version: str
    extra: dict[str, Any] = field(default_factory=dict)

    def lines(self) -> list[str]:
        """
        Examples:
            >>> ArtifactHeader('abc', 7, '0.1.0', {'kind': 'approx'}).lines()
            ['# config_hash=abc', '# master_seed=7', '# version=0.1.0', '# kind=approx']
        """
        pairs = {
            'config_hash': self.config_hash,
            'master_seed': self.master_seed,
            'version': self.version,
            **self.extra
        }
        return [f'# {key}={_format_cell(value)}' for key, value in pairs.items()]

def _format_cell(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return str(value).lower()
    if isinstance(value, (float, np.floating)):
        return format_number(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)

def write_csv(path: Path, header: ArtifactHeader, columns: Mapping[str, Any]) -> Path:
    """Write equal-length columns to `path` below the provenance header.

    Raises:
        ValueError: columns have different lengths
    """
    names = list(columns)
    data = [np.asarray(columns[name]).ravel() for name in names]
    lengths = {len(column) for column in data}
    if len(lengths) > 1:
        raise ValueError(f'columns have different lengths: {sorted(lengths)}')
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        for line in header.lines():
            f.write(line + '\n')
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(names)
        for row in zip(*data):
            writer.writerow([_format_cell(value) for value in row])
    log.info('wrote %s (%d rows)', path, lengths.pop() if lengths else 0)
    return path

def read_header(path: Path) -> dict[str, str]:
    """The `# key=value` lines at the top of an artifact."""
    header = {}
    with open(path, encoding='utf-8') as f:
        for line in f:
            if not line.startswith('# '):
                break
            key, _, value = line[2:].rstrip('\n').partition('=')
            header[key] = value
    return header

def write_manifest(path: Path, data: Mapping[str, Any]) -> Path:
    """Dump a YAML manifest (seeds, configs, file list) for audit."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    yaml = YAML(typ='safe')
    yaml.default_flow_style = False
    with open(path, 'w', encoding='utf-8') as f:
        yaml.dump(dict(data), f)
    log.info('wrote %s', path)
    return path
