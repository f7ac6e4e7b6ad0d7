"""Telecorrection round and threshold search.

The oracle is an exact evaluation of the same round: it sums over all 2^7
erasure patterns and all 2^7 flip patterns per sector, classifying each with
a brute-force minimum-weight decoder.
"""

import itertools
import math
from dataclasses import replace

import numpy as np
import pytest

from ghzbell import mc
from ghzbell.telecorrection import (
    ErrorRates,
    NoThresholdFound,
    TelecorrectionConfig,
    erasure_prob,
    find_threshold,
    is_contracting,
    level_sequence,
    physical_rates,
    simulate_level,
)
from helpers import z_score

H = np.array([[(i + 1) >> (2 - r) & 1 for i in range(7)] for r in range(3)])
PATTERNS = np.array(list(itertools.product((0, 1), repeat=7)))[:, ::-1]  # row m has bit i at column i
SYN = PATTERNS @ H.T % 2
POP = PATTERNS.sum(axis=1)


def _classes():
    """cls[E, e]: 0 corrected, 1 logical flip, 2 decoder failure."""
    cls = np.zeros((128, 128), int)
    for em in range(128):
        keep = PATTERNS[em] == 0
        for e in range(128):
            same = np.nonzero((SYN == SYN[e]).all(axis=1))[0]
            cost = PATTERNS[same][:, keep].sum(axis=1)
            best = same[cost == cost.min()]
            parities = set(POP[best] % 2)
            cls[em, e] = 2 if len(parities) > 1 else (POP[e] + POP[best[0]]) % 2
    return cls


CLS = _classes()
ERASED = PATTERNS.astype(bool)


def _sector(p):
    """Failure and logical probabilities per erasure mask for flip rate p."""
    free = (PATTERNS[None, :, :] & ~ERASED[:, None, :]).sum(axis=2)
    n_free = (~ERASED).sum(axis=1)[:, None]
    n_erased = ERASED.sum(axis=1)[:, None]
    w = p**free * (1 - p) ** (n_free - free) * 0.5**n_erased
    return (w * (CLS == 2)).sum(axis=1), (w * (CLS == 1)).sum(axis=1)


def exact_level(p_erase, p_z, p_x):
    pe = p_erase**POP * (1 - p_erase) ** (7 - POP)
    fz, lz = _sector(p_z)
    fx, lx = _sector(p_x)
    fail = (pe * (1 - (1 - fz) * (1 - fx))).sum()
    ok = 1 - fail
    return fail, (pe * lz * (1 - fx)).sum() / ok, (pe * lx * (1 - fz)).sum() / ok


def exact_threshold(n, cfg):
    def contracting(eta):
        r = physical_rates(n, eta, cfg.memory_steps, cfg.gate_ops, cfg.offline_loss)
        rates = [(erasure_prob(r, cfg.gate_ops), r.p_z, r.p_x)]
        for _ in range(cfg.levels):
            rates.append(exact_level(*rates[-1]))
        return max(rates[-1]) < max(rates[-2])

    lo, hi = 1e-5, 1e-1
    while hi / lo > 1.01:
        mid = math.sqrt(lo * hi)
        lo, hi = (mid, hi) if contracting(mid) else (lo, mid)
    return math.sqrt(lo * hi)


# ---------------------------------------------------------------------------


@pytest.mark.parametrize("n", [3, 4, 8])
def test_physical_rates_lossless(n):
    r = physical_rates(n, 0.0)
    assert (r.p_fail, r.p_z, r.p_x, r.level) == (2.0**-n, 0.0, 0.0, 0)


def test_physical_rates_operating_point():
    r = physical_rates(4, 1.7e-3)
    assert r.p_fail == pytest.approx(0.50085**4, rel=1e-12)
    assert r.p_fail == pytest.approx(0.06293, abs=1e-5)
    assert r.p_z == pytest.approx(3.39e-3, abs=5e-6)
    assert physical_rates(5, 1.0).p_fail == 1.0


def test_physical_rates_compose_exposures():
    one = physical_rates(4, 0.01).p_z
    many = physical_rates(4, 0.01, memory_steps=3, gate_ops=1, offline_loss=True).p_z
    # five independent flips of probability p compose to (1 - (1 - 2p)^5) / 2
    assert many == pytest.approx((1 - (1 - 2 * one) ** 5) / 2, rel=1e-12)
    assert physical_rates(4, 0.5, memory_steps=10 ** 4).p_z <= 0.5


def test_erasure_probability_counts_gate_measurements():
    r0 = ErrorRates(0.1, 0.0, level=0)
    assert erasure_prob(r0, 2) == pytest.approx(1 - 0.9**3)
    assert erasure_prob(replace(r0, level=1), 2) == 0.1


@pytest.mark.parametrize("bad", [dict(samples=10), dict(levels=0), dict(levels=6), dict(eta=2.0)])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        TelecorrectionConfig(**bad)


def test_rates_validation():
    with pytest.raises(ValueError):
        ErrorRates(1.2, 0.0)


def test_noiseless_and_saturated_rounds():
    cfg = TelecorrectionConfig(samples=2000)
    assert simulate_level(ErrorRates(0.0, 0.0, 0.0, level=1), cfg, mc.stream(1)).worst == 0.0
    assert simulate_level(ErrorRates(1.0, 0.0, 0.0, level=1), cfg, mc.stream(1)).p_fail == 1.0


@pytest.mark.parametrize(
    "rates",
    [(0.05, 0.01, 0.0), (0.2, 0.02, 0.01), (0.1, 0.0, 0.05), (0.35, 0.05, 0.05)],
)
def test_round_matches_exact_oracle(rates):
    samples = 100_000
    cfg = TelecorrectionConfig(samples=samples)
    out = simulate_level(ErrorRates(*rates, level=1), cfg, mc.stream(42, 7))
    fail, pz, px = exact_level(*rates)
    assert abs(z_score(round(out.p_fail * samples), samples, fail)) < 4
    ok = round((1 - out.p_fail) * samples)
    for got, want in ((out.p_z, pz), (out.p_x, px)):
        if want > 0:
            assert abs(z_score(round(got * ok), ok, want)) < 4
        else:
            assert got == 0.0


def test_round_monotone_in_p_fail():
    cfg = TelecorrectionConfig(samples=20_000)
    outs = [simulate_level(ErrorRates(f, 0.01, 0.0, level=1), cfg, mc.stream(42, 8)).p_fail for f in np.linspace(0, 0.5, 11)]
    assert all(a <= b for a, b in zip(outs, outs[1:]))


def test_sub_threshold_contraction():
    cfg = TelecorrectionConfig(n_photons=4, samples=100_000, levels=2)
    rates = level_sequence(5e-4, cfg)
    assert rates[2].worst < rates[1].worst


def test_level_sequence_uses_common_random_numbers():
    cfg = TelecorrectionConfig(n_photons=4, samples=5000)
    a = level_sequence(1e-3, cfg, replica=0)
    b = level_sequence(1e-3, cfg, replica=0)
    c = level_sequence(1e-3, cfg, replica=1)
    assert a == b and a != c


def test_is_contracting():
    mk = lambda *w: [ErrorRates(x, 0.0, level=i) for i, x in enumerate(w)]
    assert is_contracting(mk(0.3, 0.2, 0.1))
    assert not is_contracting(mk(0.1, 0.2, 0.3))
    assert is_contracting(mk(0.0, 0.0))


@pytest.mark.parametrize("n", [3, 4, 6, 8])
def test_threshold_close_to_exact_recursion(n):
    cfg = TelecorrectionConfig(samples=10_000, replicas=3)
    res = find_threshold(n, cfg)
    exact = exact_threshold(n, cfg)
    assert res.ci_low <= res.eta_threshold <= res.ci_high
    assert abs(math.log(res.eta_threshold / exact)) < math.log(1.25)


def test_threshold_reproducible_and_worker_independent():
    cfg = TelecorrectionConfig(samples=2000, replicas=2)
    assert find_threshold(5, cfg) == find_threshold(5, cfg, workers=2)


def test_no_threshold_raises():
    cfg = TelecorrectionConfig(samples=2000, replicas=1, memory_steps=10 ** 6)
    with pytest.raises(NoThresholdFound):
        find_threshold(1, cfg)


def test_threshold_needs_two_levels():
    with pytest.raises(ValueError):
        find_threshold(4, TelecorrectionConfig(levels=1))
