import tempfile
import unittest
from pathlib import Path

import numpy as np

from homogldp import config
from homogldp.entities import ConvolvedCoarse, MediaFamily, Tilt, TiltFamily
from homogldp.errors import ConfigError

CONVOLVED = {'media': {'family': 'convolved', 'xi': 1}}

class TestFromMapping(unittest.TestCase):
    def assertConfigError(self, data, path):
        with self.assertRaises(ConfigError) as context:
            config.ExperimentConfig.from_mapping(data)
        self.assertEqual(context.exception.path, path)

    def test_defaults_merged(self):
        cfg = config.ExperimentConfig.from_mapping(CONVOLVED)
        self.assertEqual(cfg.epsilons, [0.01])
        self.assertEqual(cfg.x, 0.5)
        self.assertEqual(cfg.numeric('gauss_order'), 8)

    def test_media_required(self):
        self.assertConfigError({'run': {'x': 0.3}}, 'media')

    def test_unknown_key(self):
        self.assertConfigError({'media': {'family': 'convolved', 'colour': 'red'}}, 'media.colour')

    def test_unknown_block(self):
        self.assertConfigError({**CONVOLVED, 'plots': {}}, 'plots')

    def test_bad_epsilon(self):
        self.assertConfigError({**CONVOLVED, 'run': {'epsilons': [0.3]}}, 'run.epsilons')

    def test_bool_is_not_a_number(self):
        self.assertConfigError({**CONVOLVED, 'run': {'x': True}}, 'run.x')

    def test_xi_must_match_family(self):
        self.assertConfigError({'media': {'family': 'parameterized', 'xi': 2}}, 'media.xi')
        self.assertConfigError({'media': {'family': 'convolved', 'xi': [0.0] * 8}}, 'media.xi')

    def test_nu_b_below_floor(self):
        data = {'media': {'family': 'parameterized', 'xi': [0.0] * 8, 'nu_b': 0.6}}
        self.assertConfigError(data, 'media.nu_b')

    def test_bad_source_piece(self):
        self.assertConfigError({**CONVOLVED, 'source': {'pieces': [[0.0, 1.0]]}}, 'source.pieces[0]')
        self.assertConfigError({**CONVOLVED, 'source': {'pieces': [[0.0, 0.5, 1.0]]}}, 'source.pieces')

    def test_unknown_artifact(self):
        self.assertConfigError({**CONVOLVED, 'outputs': {'artifacts': ['plots']}}, 'outputs.artifacts')

class TestConfigHash(unittest.TestCase):
    def test_stable(self):
        first = config.ExperimentConfig.from_mapping(CONVOLVED)
        second = config.ExperimentConfig.from_mapping({'media': {'xi': 1, 'family': 'convolved'}})
        self.assertEqual(first.config_hash, second.config_hash)
        self.assertEqual(len(first.config_hash), 64)

    def test_seed_changes_hash(self):
        cfg = config.ExperimentConfig.from_mapping(CONVOLVED)
        self.assertNotEqual(cfg.config_hash, cfg.with_overrides(seed=1).config_hash)

class TestAccessors(unittest.TestCase):
    def test_relative_levels(self):
        cfg = config.ExperimentConfig.from_mapping(CONVOLVED)
        levels = cfg.levels(0.02)
        self.assertEqual(len(levels), 50)
        self.assertAlmostEqual(levels[0], 0.01)
        self.assertAlmostEqual(levels[-1], 0.06)

    def test_explicit_levels(self):
        cfg = config.ExperimentConfig.from_mapping({**CONVOLVED, 'run': {'levels': [0.05, 0.03]}})
        self.assertTrue(np.array_equal(cfg.levels(0.02), [0.05, 0.03]))

    def test_relative_levels_need_u0(self):
        with self.assertRaises(ConfigError):
            config.ExperimentConfig.from_mapping(CONVOLVED).levels(0.0)

    def test_tilt(self):
        self.assertEqual(config.ExperimentConfig.from_mapping(CONVOLVED).tilt(), 'auto')
        fixed = {**CONVOLVED, 'run': {'tilt': {'family': 'chisq', 'parameter': 0.2}}}
        self.assertEqual(config.ExperimentConfig.from_mapping(fixed).tilt(), Tilt(TiltFamily.CHISQ, 0.2))
        direct = {**CONVOLVED, 'run': {'tilt': 'none'}}
        self.assertEqual(config.ExperimentConfig.from_mapping(direct).tilt(), Tilt())

    def test_media_model(self):
        model = config.ExperimentConfig.from_mapping(CONVOLVED).media_model()
        self.assertEqual(model.coarse, ConvolvedCoarse(1))

    def test_prior_draw_is_seeded(self):
        data = {'media': {'family': 'parameterized'}}
        first = config.ExperimentConfig.from_mapping(data).media_model()
        second = config.ExperimentConfig.from_mapping(data).media_model()
        self.assertEqual(first, second)
        self.assertIs(first.family, MediaFamily.PARAMETERIZED)

    def test_artifact_selection(self):
        cfg = config.ExperimentConfig.from_mapping({**CONVOLVED, 'outputs': {'artifacts': ['rate']}})
        self.assertTrue(cfg.wants('rate'))
        self.assertFalse(cfg.wants('samples'))

class TestLoadConfig(unittest.TestCase):
    def test_round_trip(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'experiment.yaml'
            path.write_text('media:\n  family: convolved\n  xi: 2\nrun:\n  epsilons: [0.1, 0.05]\n')
            cfg = config.load_config(path)
        self.assertEqual(cfg.epsilons, [0.1, 0.05])
        self.assertEqual(cfg.media['xi'], 2)

    def test_malformed_yaml(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'broken.yaml'
            path.write_text('media: [unclosed\n')
            with self.assertRaises(ConfigError):
                config.load_config(path)

    def test_missing_file(self):
        with self.assertRaises(ConfigError):
            config.load_config('/nonexistent/experiment.yaml')

    def test_empty_file_lacks_media(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'empty.yaml'
            path.write_text('')
            with self.assertRaises(ConfigError) as context:
                config.load_config(path)
        self.assertEqual(context.exception.path, 'media')

class TestFigures(unittest.TestCase):
    def test_recipes_validate(self):
        for name in ('mild_ldp', 'wild_ldp', 'convolved_ldp_eps100', 'convolved_ldp_eps10', 'corrector_variance', 'pdf_compare'):
            with self.subTest(figure=name):
                config.ExperimentConfig.for_figure(name)

    def test_corrector_sweep_scales(self):
        cfg = config.ExperimentConfig.for_figure('corrector_variance')
        self.assertEqual(cfg.epsilons, [0.1, 0.02, 0.01])

    def test_unknown_figure(self):
        with self.assertRaises(ConfigError) as context:
            config.ExperimentConfig.for_figure('fig99')
        self.assertEqual(context.exception.path, 'figure')
