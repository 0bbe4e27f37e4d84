"""Block-deterministic random streams.

A stream of ``n`` draws is cut into fixed blocks of :data:`BLOCK_SIZE`
rows.  Block ``j`` is generated from ``SeedSequence(seed, spawn_key=(j,))``,
so a block's content depends only on ``(seed, j)`` and the row count within
it.  Rows are drawn row-major, which makes a shorter stream a prefix of a
longer one.  Blocks can therefore be produced in any order, on any number of
threads, and reassembled into the same bytes.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, TypeVar

import numpy as np

__all__ = ["BLOCK_SIZE", "block_rng", "block_sizes", "block_uniforms", "map_blocks"]

BLOCK_SIZE = 1 << 18

T = TypeVar("T")


def block_rng(seed: int, block: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(block),)))


def block_sizes(n: int, block_size: int = BLOCK_SIZE) -> list[int]:
    if n < 0:
        raise ValueError("sample count must be nonnegative")
    full, rest = divmod(int(n), block_size)
    return [block_size] * full + ([rest] if rest else [])


def block_uniforms(seed: int, block: int, rows: int, cols: int) -> np.ndarray:
    """Uniforms on ``(0, 1]`` with shape ``(rows, cols)``.

    ``1 - U`` for ``U`` in ``[0, 1)`` keeps inverse transforms such as
    ``u ** (-1/a)`` finite.
    """
    return 1.0 - block_rng(seed, block).random((rows, cols))


def map_blocks(fn: Callable[[int, int], T], n: int, workers: int = 1,
               block_size: int = BLOCK_SIZE) -> list[T]:
    """Apply ``fn(block_index, rows)`` to every block, results in block order."""
    sizes = block_sizes(n, block_size)
    if workers < 1:
        raise ValueError("workers must be positive")
    if workers == 1 or len(sizes) <= 1:
        return [fn(j, m) for j, m in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(len(sizes)), sizes))


def iter_blocks(fn: Callable[[int, int], T], n: int, block_size: int = BLOCK_SIZE) -> Iterator[T]:
    for j, m in enumerate(block_sizes(n, block_size)):
        yield fn(j, m)
