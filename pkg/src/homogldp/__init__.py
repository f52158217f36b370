"""
.. include:: ../../README.md

See individual module documentation for detailed information.
"""
__version__ = '0.1.0'

from . import entities
from . import media
from . import solver
from . import corrector
from . import ldp
from . import montecarlo
from . import config
from . import cli

__all__ = [
    'entities',
    'media',
    'solver',
    'corrector',
    'ldp',
    'montecarlo',
    'config',
    'cli'
]
