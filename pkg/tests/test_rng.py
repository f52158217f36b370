import unittest

import numpy as np

from homogldp import rng
from homogldp.errors import DomainError

class TestRng(unittest.TestCase):
    def test_same_stream_same_draws(self):
        first = rng.Rng(42, 7).generator().random(5)
        second = rng.Rng(42, 7).generator().random(5)
        self.assertTrue(np.array_equal(first, second))

    def test_streams_differ(self):
        base = rng.Rng.named(42, 'fine')
        first = base.substream(0).generator().random(5)
        second = base.substream(1).generator().random(5)
        self.assertFalse(np.array_equal(first, second))

    def test_labelled_substreams_differ_from_blocks(self):
        base = rng.Rng(1)
        self.assertNotEqual(base.substream('center'), base.substream(0))

    def test_seed_must_be_u64(self):
        with self.assertRaises(DomainError):
            rng.Rng(-1)
        with self.assertRaises(DomainError):
            rng.Rng(2 ** 64)

class TestMapBlocks(unittest.TestCase):
    def draw(self, start, stop, stream):
        return stream.generator().standard_normal(stop - start)

    def test_independent_of_thread_count(self):
        stream = rng.Rng.named(2024, 'samples')
        serial = np.concatenate(rng.map_blocks(self.draw, 1000, stream, 64, threads=1))
        threaded = np.concatenate(rng.map_blocks(self.draw, 1000, stream, 64, threads=4))
        self.assertTrue(np.array_equal(serial, threaded))

    def test_block_order(self):
        starts = rng.map_blocks(lambda start, stop, stream: start, 10, rng.Rng(0), 3, threads=3)
        self.assertEqual(starts, [0, 3, 6, 9])

    def test_empty(self):
        self.assertEqual(rng.map_blocks(self.draw, 0, rng.Rng(0), 8), [])

class TestBlockBounds(unittest.TestCase):
    def test_rejects_zero_block(self):
        with self.assertRaises(DomainError):
            rng.block_bounds(10, 0)
