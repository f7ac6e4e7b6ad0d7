import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghzbell.ghz import LogicalQubit, logical_bm_counts
from ghzbell.loss import (
    LossChannel,
    LossEvent,
    apply_loss,
    bm_failure_prob,
    bm_failure_prob_binomial,
    qubit_loss_prob,
    sample_loss,
    sample_loss_batch,
)
from helpers import z_score


def test_channel_from_decay():
    assert LossChannel.from_decay(2.0, 0.5).eta == pytest.approx(1 - math.exp(-1))
    with pytest.raises(ValueError):
        LossChannel(1.5)


@pytest.mark.parametrize("n, eta, expected", [(4, 1.7e-3, 0.50085**4), (3, 0.0, 0.125), (5, 1.0, 1.0)])
def test_failure_closed_form(n, eta, expected):
    assert bm_failure_prob(n, eta) == pytest.approx(expected, rel=1e-12)


@settings(max_examples=100)
@given(st.integers(1, 12), st.floats(0.0, 1.0))
def test_binomial_sum_identity(n, eta):
    assert abs(bm_failure_prob(n, eta) - bm_failure_prob_binomial(n, eta)) < 1e-12


@pytest.mark.parametrize("n", [1, 4, 8])
def test_qubit_loss_prob(n):
    assert qubit_loss_prob(n, 0.0) == 0.0
    assert qubit_loss_prob(n, 1.0) == 1.0
    assert qubit_loss_prob(n, 0.1) == pytest.approx(1 - 0.9**n)


def test_sample_loss_mask_and_k(rng):
    ev = sample_loss(6, 0.5, rng)
    assert len(ev.mask) == 6 and ev.k == sum(ev.mask)
    assert not sample_loss(6, 0.0, rng).z_flip


def test_z_flip_is_a_fair_coin_given_loss(rng):
    mask, z = sample_loss_batch(200_000, 3, 0.4, rng)
    lost = mask.any(axis=1)
    assert not z[~lost].any()
    assert abs(z_score(int(z[lost].sum()), int(lost.sum()), 0.5)) < 4


def test_apply_loss_dephases():
    q = LogicalQubit(4, 0.6, 0.8)
    out = apply_loss(q, LossEvent((True, False, False, False), z_flip=True))
    assert out.photons_present == 3 and out.amp_minus == -0.8 and out.z_flag
    assert apply_loss(q, LossEvent((False,) * 4)) is q
    with pytest.raises(ValueError):
        apply_loss(q, LossEvent((True, False)))


def test_dephasing_channel_average():
    """Averaging the coin reproduces the dephased density matrix."""
    q = LogicalQubit(2, 0.6, 0.8)
    rho = np.zeros((2, 2))
    for z in (False, True):
        v = apply_loss(q, LossEvent((True, False), z)).amplitudes.real
        rho += 0.5 * np.outer(v, v)
    assert np.allclose(rho, np.diag([0.36, 0.64]))


@pytest.mark.parametrize("n", [1, 3, 6])
@pytest.mark.parametrize("eta", [0.05, 0.5])
def test_pipeline_failure_matches_law(n, eta):
    samples = 40_000
    succ = int(logical_bm_counts(n, samples, seed=42, eta=eta)[0])
    assert abs(z_score(samples - succ, samples, bm_failure_prob(n, eta))) < 3


def test_two_sided_loss_law():
    n, eta, samples = 3, 0.2, 40_000
    succ = int(logical_bm_counts(n, samples, seed=42, eta=eta, two_sided=True)[0])
    fail = (1 - (1 - eta) ** 2 / 2) ** n
    assert abs(z_score(samples - succ, samples, fail)) < 3


@pytest.mark.parametrize("bad", [-0.1, 1.1])
def test_rate_validation(bad):
    with pytest.raises(ValueError):
        bm_failure_prob(3, bad)
