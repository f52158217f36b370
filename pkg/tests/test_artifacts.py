import tempfile
import unittest
from pathlib import Path

import numpy as np
from ruamel.yaml import YAML

from homogldp import artifacts

HEADER = artifacts.ArtifactHeader('abc', 7, '0.1.0', {'steep': True})

class TestWriteCsv(unittest.TestCase):
    def test_layout(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = artifacts.write_csv(Path(tmp) / 'nested' / 'rate.csv', HEADER, {
                'level': np.array([0.1, 0.2]),
                'rate': np.array([0.5, np.inf]),
                'status': ['converged', 'infinite']
            })
            lines = path.read_text().splitlines()
            header = artifacts.read_header(path)
        self.assertEqual(lines[:4], ['# config_hash=abc', '# master_seed=7', '# version=0.1.0', '# steep=true'])
        self.assertEqual(lines[4:], ['level,rate,status', '0.1,0.5,converged', '0.2,inf,infinite'])
        self.assertEqual(header['master_seed'], '7')

    def test_unequal_columns(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(ValueError):
                artifacts.write_csv(Path(tmp) / 'bad.csv', HEADER, {'a': [1.0], 'b': [1.0, 2.0]})

    def test_byte_identical(self):
        columns = {'x': np.linspace(0.0, 1.0, 7), 'u': np.linspace(0.0, 1.0, 7) ** 2 / 3}
        with tempfile.TemporaryDirectory() as tmp:
            first = artifacts.write_csv(Path(tmp) / 'a.csv', HEADER, columns).read_bytes()
            second = artifacts.write_csv(Path(tmp) / 'b.csv', HEADER, columns).read_bytes()
        self.assertEqual(first, second)

class TestWriteManifest(unittest.TestCase):
    def test_yaml(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = artifacts.write_manifest(Path(tmp) / 'manifest.yaml', {'seed': 3, 'files': ['a.csv']})
            data = YAML(typ='safe').load(path)
        self.assertEqual(data, {'seed': 3, 'files': ['a.csv']})
