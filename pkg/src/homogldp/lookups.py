__docformat__ = 'google'

__all__ = [
    'Defaults',
    'FigureRecipes'
]

import copy
import json
from ruamel.yaml import YAML
from dataclasses import dataclass
from functools import cache
from typing import IO, Any, Callable, ClassVar
from pathlib import Path

from homogldp.errors import ConfigError
from homogldp.paths import (
    DEFAULTS_YAML,
    FIGURES_YAML
)

yaml = YAML(typ='safe')

@dataclass
class Lookup:
    DATA_SOURCE: ClassVar[Path]

    def __post_init__(self) -> None:
        self.set_data()
        self.set_convenience_attrs()

    @classmethod
    @cache
    def get_lookup(cls) -> Any:
        return cls()

    @property
    def loader(self) -> Callable[[IO[str]], Any]:
        extension = Path(str(self.DATA_SOURCE)).suffix.lower()
        if extension == '.json':
            return json.load
        elif extension in ('.yaml', '.yml'):
            return yaml.load
        else:
            raise ValueError(f'Unsupported extension: {extension}')

    def load_data(self) -> dict:
        with self.DATA_SOURCE.open() as f:
            return self.loader(f)

    def set_data(self) -> None:
        self.data = self.load_data()

    def set_convenience_attrs(self) -> None:
        for key in self.data.keys():
            if key in self.__dataclass_fields__.keys():
                setattr(self, key, self.data[key])

@dataclass
class Defaults(Lookup):
    """Package defaults, one attribute per experiment config block.

    Callers get deep copies through `as_mapping` so the cached lookup is
    never mutated.
    """
    media: dict | None = None
    source: dict | None = None
    run: dict | None = None
    numerics: dict | None = None
    outputs: dict | None = None

    DATA_SOURCE: ClassVar[Path] = DEFAULTS_YAML

    def as_mapping(self) -> dict[str, Any]:
        return copy.deepcopy(self.data)

    def numeric(self, key: str) -> Any:
        """Look up a single numerical setting.

        Examples:
            >>> Defaults.get_lookup().numeric('gauss_order')
            8
        """
        return self.data['numerics'][key]

@dataclass
class FigureRecipes(Lookup):
    DATA_SOURCE: ClassVar[Path] = FIGURES_YAML

    @property
    def names(self) -> list[str]:
        return list(self.data.keys())

    def recipe(self, name: str) -> dict[str, Any]:
        if name not in self.data:
            raise ConfigError(
                f'unknown figure {name!r}; expected one of {", ".join(self.names)}',
                'figure'
            )
        return copy.deepcopy(self.data[name])
