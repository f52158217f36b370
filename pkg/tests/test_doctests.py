import doctest
import unittest

from homogldp import (
    _vendor,
    artifacts,
    cli,
    corrector,
    ldp,
    lookups,
    media,
    montecarlo,
    rng,
    solver
)

MODULES = (_vendor, artifacts, cli, corrector, ldp, lookups, media, montecarlo, rng, solver)

def load_tests(loader, tests, ignore):
    for module in MODULES:
        tests.addTests(doctest.DocTestSuite(module))
    return tests
