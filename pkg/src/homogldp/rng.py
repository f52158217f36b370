"""Reproducible random streams.

Every draw in the package comes from an `Rng`: a (master_seed, stream_id)
pair that deterministically keys a counter-based Philox generator. Streams
are split by purpose (`Rng.named`) and by block index (`Rng.substream`), so
the values a block sees depend only on the seed and the block number, never
on how many threads evaluate the blocks or in which order.
"""

__docformat__ = 'google'

__all__ = [
    'Rng',
    'stream_key',
    'block_bounds',
    'map_blocks'
]

import hashlib
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, TypeVar

import numpy as np

from homogldp.errors import DomainError

log = logging.getLogger(__name__)

T = TypeVar('T')

_U64 = 2 ** 64

def stream_key(*parts: int | str) -> int:
    """Hash stream labels into a 64-bit stream id.

    Examples:
        >>> stream_key('coarse') == stream_key('coarse')
        True
        >>> stream_key('coarse') == stream_key('fine')
        False
        >>> 0 <= stream_key(7, 'block', 3) < 2 ** 64
        True
    """
    digest = hashlib.blake2b(digest_size=8)
    for part in parts:
        digest.update(repr(part).encode())
        digest.update(b'\x00')
    return int.from_bytes(digest.digest(), 'little')

@dataclass(frozen=True)
class Rng:
    """
    A reproducible random stream.

    Args:
        master_seed: Unsigned 64-bit experiment seed
        stream_id: Unsigned 64-bit stream label
    """
    master_seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        for name in ('master_seed', 'stream_id'):
            value = getattr(self, name)
            if not 0 <= value < _U64:
                raise DomainError(f'{name} must be an unsigned 64-bit integer, got {value}')

    @classmethod
    def named(cls, master_seed: int, name: str) -> 'Rng':
        """Stream reserved for one purpose, e.g. ``'coarse'`` or ``'pilot'``."""
        return cls(master_seed, stream_key(name))

    def substream(self, index: int | str) -> 'Rng':
        """Child stream for a block number or a purpose label."""
        return Rng(self.master_seed, stream_key(self.stream_id, index))

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.Philox(seq))

def block_bounds(n: int, block_size: int) -> list[tuple[int, int]]:
    """Split range(n) into consecutive blocks of at most `block_size`.

    Examples:
        >>> block_bounds(5, 2)
        [(0, 2), (2, 4), (4, 5)]
        >>> block_bounds(0, 4)
        []
    """
    if block_size < 1:
        raise DomainError(f'block_size must be positive, got {block_size}')
    return [(start, min(start + block_size, n)) for start in range(0, n, block_size)]

def map_blocks(
        func: Callable[[int, int, Rng], T],
        n: int,
        rng: Rng,
        block_size: int,
        threads: int = 1) -> list[T]:
    """Evaluate `func(start, stop, substream)` over all blocks of range(n).

    Block b always receives `rng.substream(b)`. Results come back in block
    order whatever the thread count.
    """
    blocks = [(start, stop, rng.substream(b)) for b, (start, stop) in enumerate(block_bounds(n, block_size))]
    log.debug('evaluating %d blocks of up to %d on %d thread(s)', len(blocks), block_size, threads)
    if threads <= 1 or len(blocks) <= 1:
        return [func(*block) for block in blocks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda block: func(*block), blocks))
