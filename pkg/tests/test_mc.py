from functools import partial

import numpy as np
import pytest

from ghzbell import mc


def draw_sum(rng, count, scale=1):
    return np.array([int((rng.random(count) * 1000 * scale).astype(int).sum()), count])


@pytest.mark.parametrize("samples, expected", [(0, []), (5, [(0, 5)]), (4096, [(0, 4096)]), (4100, [(0, 4096), (1, 4)])])
def test_blocks(samples, expected):
    assert mc.blocks(samples) == expected


def test_streams_are_distinct_and_stable():
    a = mc.stream(42, 1, 0).random(4)
    assert np.array_equal(a, mc.stream(42, 1, 0).random(4))
    assert not np.array_equal(a, mc.stream(42, 1, 1).random(4))
    assert not np.array_equal(a, mc.stream(43, 1, 0).random(4))


@pytest.mark.parametrize("workers", [2, 3])
def test_worker_count_independence(workers):
    kernel = partial(draw_sum, scale=2)
    one = mc.run_blocks(kernel, 20_000, seed=9, path=(5,))
    many = mc.run_blocks(kernel, 20_000, seed=9, path=(5,), workers=workers)
    assert np.array_equal(one, many)
    assert one[1] == 20_000


def test_empty_run_rejected():
    with pytest.raises(ValueError):
        mc.run_blocks(draw_sum, 0, seed=1)


def test_binomial_stderr():
    assert mc.binomial_stderr(50, 100) == pytest.approx(0.05)
