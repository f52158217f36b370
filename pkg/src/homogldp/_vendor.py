"""
Small dependency-free helpers shared by the config, artifact and media
modules.
"""

__docformat__ = 'google'

import json
import math
from typing import Any, Mapping

def deep_merge(base: Mapping, override: Mapping) -> dict:
    """Recursively merge two nested mappings.

    Values in `override` win. Nested mappings are merged key by key; every
    other value (lists included) is replaced wholesale.

    Args:
        base: Mapping supplying defaults
        override: Mapping whose values take precedence

    Returns:
        New merged dict; neither input is modified

    Examples:
        >>> deep_merge({'a': {'b': 1, 'c': 2}, 'd': [1]}, {'a': {'c': 3}, 'd': [2]})
        {'a': {'b': 1, 'c': 3}, 'd': [2]}
        >>> deep_merge({'a': 1}, {})
        {'a': 1}
    """
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged

def canonical_json(data: Any) -> str:
    """Serialize to JSON with sorted keys and no insignificant whitespace.

    Examples:
        >>> canonical_json({'b': 1, 'a': [1.5, None]})
        '{"a":[1.5,null],"b":1}'
    """
    return json.dumps(data, sort_keys=True, separators=(',', ':'), allow_nan=True)

def format_number(value: float) -> str:
    """Format a float for CSV output so re-runs are byte-identical.

    Examples:
        >>> format_number(0.1)
        '0.1'
        >>> format_number(float('-inf'))
        '-inf'
        >>> format_number(1/3)
        '0.3333333333333333'
    """
    value = float(value)
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    if math.isnan(value):
        return 'nan'
    return repr(value)

def cells_per_unit(epsilon: float, tol: float = 1e-9) -> int | None:
    """Return 1/ε when it is an integer (up to `tol`), otherwise None.

    Examples:
        >>> cells_per_unit(0.01)
        100
        >>> cells_per_unit(0.3) is None
        True
        >>> cells_per_unit(1/64)
        64
    """
    if not 0 < epsilon <= 1:
        return None
    n = round(1 / epsilon)
    if n < 1 or abs(n * epsilon - 1) > tol:
        return None
    return int(n)

def dotted(path: str, key: Any) -> str:
    """Join a config path and a key.

    Examples:
        >>> dotted('', 'media')
        'media'
        >>> dotted('media', 'xi')
        'media.xi'
        >>> dotted('source.pieces', 2)
        'source.pieces[2]'
    """
    if isinstance(key, int):
        return f'{path}[{key}]'
    return f'{path}.{key}' if path else str(key)
