"""Fixed-partition row-block execution.

The row-block boundaries depend only on the row count, never on the thread
count, so threaded and sequential runs perform the exact same numpy calls on
the exact same slices and produce bit-identical results.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable

BLOCK_ROWS = 1024


def row_blocks(n: int, block: int = BLOCK_ROWS) -> list[tuple[int, int]]:
    return [(start, min(start + block, n)) for start in range(0, n, block)]


def run_blocks(n: int, fn: Callable[[int, int], None], threads: int = 1) -> None:
    """Apply fn(start, stop) to every row block, optionally in parallel.

    fn must write only to rows [start, stop) of its output buffers.
    """
    blocks = row_blocks(n)
    if threads <= 1 or len(blocks) <= 1:
        for start, stop in blocks:
            fn(start, stop)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn, start, stop) for start, stop in blocks]
        for fut in futures:
            fut.result()
