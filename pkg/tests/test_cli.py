import tempfile
import unittest
from pathlib import Path

from homogldp import cli
from homogldp.artifacts import read_header

CONFIG = """\
media:
  family: convolved
  xi: 1
run:
  epsilons: [0.1]
  seed: 11
  grid_size: 11
  n_samples: 300
  n_paths: 3
  tilt: none
  levels: [0.01, 0.03, 0.05]
numerics:
  ldp_panels: 32
  pilot_samples: 100
  tilt_candidates: 3
  wiener_grid_size: 100
  min_ess: 0.0
"""

def columns(path):
    lines = [line for line in path.read_text().splitlines() if not line.startswith('# ')]
    return lines[0].split(','), lines[1:]

class CliTestCase(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)
        self.config = self.root / 'experiment.yaml'
        self.config.write_text(CONFIG)
        self.out = self.root / 'out'

    def tearDown(self):
        self.tmp.cleanup()

    def run_cli(self, *args):
        return cli.main(['--quiet', *args, '--config', str(self.config), '--out', str(self.out)])

class TestCommands(CliTestCase):
    def test_solve(self):
        self.assertEqual(self.run_cli('solve'), 0)
        names, rows = columns(self.out / 'solution.csv')
        self.assertEqual(names, ['x', 'u_eps', 'u0', 'v_eps', 'R_eps'])
        self.assertEqual(len(rows), 11)
        self.assertEqual(read_header(self.out / 'solution.csv')['master_seed'], '11')

    def test_media_sample(self):
        self.assertEqual(self.run_cli('media-sample'), 0)
        names, rows = columns(self.out / 'realization.csv')
        self.assertEqual(names, ['cell_index', 'inv_value'])
        self.assertEqual(len(rows), 10)

    def test_homogenize(self):
        self.assertEqual(self.run_cli('homogenize'), 0)
        header = read_header(self.out / 'homogenized.csv')
        self.assertAlmostEqual(float(header['u0_at_x']), 0.02375)

    def test_corrector(self):
        self.assertEqual(self.run_cli('corrector'), 0)
        _, rows = columns(self.out / 'corrector_paths.csv')
        self.assertEqual(len(rows), 3 * 9)
        self.assertTrue((self.out / 'corrector_variance.csv').exists())

    def test_rates(self):
        for kind in ('approx', 'gaussian', 'chernoff'):
            with self.subTest(kind=kind):
                self.assertEqual(self.run_cli('rate', '--kind', kind), 0)
                header = read_header(self.out / f'rate_{kind}.csv')
                self.assertEqual(header['steep'], 'true')
        names, _ = columns(self.out / 'rate_gaussian.csv')
        self.assertIn('clt_valid', names)

    def test_empirical(self):
        self.assertEqual(self.run_cli('empirical'), 0)
        names, rows = columns(self.out / 'empirical_rate.csv')
        self.assertEqual(names, ['ell', 'neg_rate', 'neg_rate_normalized', 'ess', 'n_exceed'])
        self.assertEqual(len(rows), 3)
        for row in rows:
            cells = row.split(',')
            for value in map(float, cells[1:3]):
                self.assertGreaterEqual(value, 0.0)
            self.assertFalse(cells[1].startswith('-'))
        self.assertTrue((self.out / 'samples.csv').exists())
        self.assertTrue((self.out / 'samples_manifest.yaml').exists())

class TestReproducibility(CliTestCase):
    def test_rerun_is_byte_identical(self):
        self.run_cli('solve')
        first = (self.out / 'solution.csv').read_bytes()
        self.run_cli('solve')
        self.assertEqual(first, (self.out / 'solution.csv').read_bytes())

    def test_threads_do_not_change_results(self):
        self.run_cli('empirical')
        first = (self.out / 'samples.csv').read_bytes()
        self.run_cli('empirical', '--threads', '4')
        self.assertEqual(first, (self.out / 'samples.csv').read_bytes())

    def test_seed_override(self):
        self.run_cli('solve', '--seed', '12')
        self.assertEqual(read_header(self.out / 'solution.csv')['master_seed'], '12')

class TestExitCodes(CliTestCase):
    def test_missing_media_block(self):
        self.config.write_text('run:\n  x: 0.5\n')
        self.assertEqual(self.run_cli('solve'), 2)

    def test_unknown_command(self):
        self.assertEqual(cli.main(['--quiet', 'plot']), 2)

    def test_config_required(self):
        self.assertEqual(cli.main(['--quiet', 'solve']), 2)

    def test_unusable_weights(self):
        self.config.write_text(CONFIG.replace('min_ess: 0.0', 'min_ess: 1.0e9'))
        self.assertEqual(self.run_cli('empirical'), 3)

    def test_unknown_figure(self):
        self.assertEqual(cli.main(['--quiet', 'figure', 'fig99']), 2)

class TestStem(unittest.TestCase):
    def test_tags(self):
        self.assertEqual(cli._stem('rate_chernoff', 10), 'rate_chernoff_10.csv')
