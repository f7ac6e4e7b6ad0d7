"""Reproducible, worker-count-independent Monte Carlo plumbing.

Trials are cut into fixed blocks of ``BLOCK_SIZE`` consecutive trial indices.
Block ``b`` of a run draws from a Philox counter-based generator keyed by
``SeedSequence(seed, spawn_key=(*path, b))``. Because the block boundaries
depend only on the trial index, any partition of blocks across workers
produces the same per-trial randomness, and integer tallies merge by
summation in a fixed order.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

import numpy as np

BLOCK_SIZE = 4096

Kernel = Callable[[np.random.Generator, int], np.ndarray]


def stream(seed: int, *path: int) -> np.random.Generator:
    """Child generator for ``path`` under the master ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def blocks(samples: int, block_size: int = BLOCK_SIZE) -> list[tuple[int, int]]:
    """``(block_index, trial_count)`` for a run of ``samples`` trials."""
    if samples < 0:
        raise ValueError("samples must be non-negative")
    full, rest = divmod(samples, block_size)
    out = [(b, block_size) for b in range(full)]
    if rest:
        out.append((full, rest))
    return out


def _run_one(args):
    kernel, seed, path, block, count = args
    return np.asarray(kernel(stream(seed, *path, block), count))


def run_blocks(
    kernel: Kernel,
    samples: int,
    seed: int,
    path: Sequence[int] = (),
    workers: int = 1,
) -> np.ndarray:
    """Sum the tallies returned by ``kernel(rng, count)`` over all blocks.

    ``kernel`` must be picklable (module-level function or ``functools.partial``)
    when ``workers > 1``.
    """
    jobs = [(kernel, seed, tuple(path), b, n) for b, n in blocks(samples)]
    if not jobs:
        raise ValueError("no trials requested")
    if workers <= 1 or len(jobs) == 1:
        tallies = [_run_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            tallies = list(pool.map(_run_one, jobs))
    total = tallies[0].copy()
    for t in tallies[1:]:
        total = total + t
    return total


def binomial_stderr(successes: int, samples: int) -> float:
    p = successes / samples
    return float(np.sqrt(p * (1 - p) / samples))
