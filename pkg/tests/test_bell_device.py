import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ghzbell.bell_device import (
    BOTH,
    NEITHER,
    ONLY_A,
    ONLY_B,
    BellKind,
    BsOutcome,
    MalformedClicks,
    OutcomeKind,
    bell_input,
    build_bs_device,
    classify_clicks,
    exact_outcome_table,
    pair_kraus,
    sample_bs,
)
from ghzbell.optics import ClickPattern, ModeIndex, PureOpticalState, apply_transform, click_distribution
from test_optics import oracle_amplitude, occupations

R2 = 1 / math.sqrt(2)
H0, V0, H1, V1 = 0, 1, 2, 3

# Bell states rewritten by hand in the H/V basis, as occupation amplitudes.
HV_FORMS = {
    BellKind.PHI_PLUS: {(1, 0, 1, 0): R2, (0, 1, 0, 1): R2},
    BellKind.PHI_MINUS: {(1, 0, 0, 1): R2, (0, 1, 1, 0): R2},
    BellKind.PSI_PLUS: {(1, 0, 1, 0): R2, (0, 1, 0, 1): -R2},
    BellKind.PSI_MINUS: {(1, 0, 0, 1): -R2, (0, 1, 1, 0): R2},
}

EXPECTED = {
    BellKind.PHI_MINUS: OutcomeKind.SUCCESS_PHI_MINUS,
    BellKind.PSI_MINUS: OutcomeKind.SUCCESS_PSI_MINUS,
    BellKind.PHI_PLUS: OutcomeKind.AMBIGUOUS,
    BellKind.PSI_PLUS: OutcomeKind.AMBIGUOUS,
}


def oracle_table(kind):
    """Outcome probabilities from permanents of the device matrix."""
    u = build_bs_device().transform.matrix
    table = dict.fromkeys(OutcomeKind, 0.0)
    for out in occupations(4, 2):
        amp = sum(a * oracle_amplitude(u, occ, out) for occ, a in HV_FORMS[kind].items())
        pattern = ClickPattern.from_occupation(out, range(4))
        if abs(amp) > 1e-14:
            table[classify_clicks(pattern).kind] += abs(amp) ** 2
    return table


@pytest.mark.parametrize("kind", list(BellKind))
def test_bell_input_matches_hand_derivation(kind):
    assert bell_input(kind).close_to(PureOpticalState(HV_FORMS[kind]), tol=1e-12, up_to_phase=True)


@pytest.mark.parametrize("kind", list(BellKind))
def test_outcome_table_matches_permanent_oracle(kind):
    table = exact_outcome_table(kind)
    oracle = oracle_table(kind)
    for k in OutcomeKind:
        assert table[k] == pytest.approx(oracle[k], abs=1e-12)
    assert table[EXPECTED[kind]] == pytest.approx(1.0, abs=1e-10)


def test_uniform_input_success_is_half():
    total = sum(exact_outcome_table(k)[o] for k in BellKind for o in OutcomeKind if o.is_success) / 4
    assert total == pytest.approx(0.5, abs=1e-10)


def test_phi_minus_clicks_same_port_only():
    device = build_bs_device()
    dist = click_distribution(apply_transform(bell_input(BellKind.PHI_MINUS), device.transform), device.detector_modes)
    for pattern, p in dist.items():
        ports = {ModeIndex.from_flat(m).port for m in pattern.clicked}
        assert p < 1e-20 or (len(pattern) == 2 and len(ports) == 1)


@pytest.mark.parametrize(
    "modes, kind",
    [
        ((H0, V0), OutcomeKind.SUCCESS_PHI_MINUS),
        ((H1, V1), OutcomeKind.SUCCESS_PHI_MINUS),
        ((H0, V1), OutcomeKind.SUCCESS_PSI_MINUS),
        ((V0, H1), OutcomeKind.SUCCESS_PSI_MINUS),
        ((V1,), OutcomeKind.AMBIGUOUS),
        ((), OutcomeKind.CLICK_DEFICIT),
    ],
)
def test_classify_clicks(modes, kind):
    out = classify_clicks(ClickPattern.of(*modes))
    assert out.kind is kind
    assert out.clicks == len(modes)


@pytest.mark.parametrize("modes", [(H0, V0, H1), (H0, H1), (V0, V1)])
def test_classify_rejects_impossible_patterns(modes):
    with pytest.raises(MalformedClicks):
        classify_clicks(ClickPattern.of(*modes))


def test_outcome_click_invariant():
    with pytest.raises(ValueError):
        BsOutcome(OutcomeKind.AMBIGUOUS, 2)


def test_port_swap_covariance():
    swap = {H0: H1, V0: V1, H1: H0, V1: V0}
    for a, b in itertools.combinations(range(4), 2):
        try:
            k = classify_clicks(ClickPattern.of(a, b)).kind
        except MalformedClicks:
            continue
        assert classify_clicks(ClickPattern.of(swap[a], swap[b])).kind is k


@pytest.mark.parametrize("kind", list(BellKind))
def test_sampling_is_deterministic_in_kind(kind):
    rng = np.random.default_rng(3)
    assert {sample_bs(kind, rng).kind for _ in range(50)} == {EXPECTED[kind]}


@pytest.mark.parametrize("label, kind", [("Phi+", BellKind.PHI_PLUS), ("PSI_MINUS", BellKind.PSI_MINUS)])
def test_bell_kind_parse(label, kind):
    assert BellKind.parse(label) is kind
    with pytest.raises(ValueError):
        BellKind.parse("Chi+")


def test_kraus_table_is_isometry_per_case():
    kr = pair_kraus()
    for case in (BOTH, ONLY_A, ONLY_B, NEITHER):
        a = kr.amps[case]
        for s, t in itertools.product(range(2), repeat=2):
            assert np.sum(np.abs(a[:, s, t]) ** 2) == pytest.approx(1.0, abs=1e-12)
    # orthogonal sign patterns stay orthogonal through the device
    m = kr.amps[BOTH].reshape(len(kr.outcomes), 4)
    assert np.allclose(m.conj().T @ m, np.eye(4), atol=1e-12)


def test_kraus_success_amplitudes():
    kr = pair_kraus()
    for o, kind in enumerate(kr.kinds):
        block = kr.amps[BOTH, o]
        # a success click projects onto the identified minus-sign Bell state
        if kind is OutcomeKind.SUCCESS_PHI_MINUS:
            assert np.allclose(np.abs(block), 0.5 * np.eye(2))
            assert block[0, 0] == pytest.approx(-block[1, 1])
        if kind is OutcomeKind.SUCCESS_PSI_MINUS:
            assert np.allclose(np.abs(block), 0.5 * (1 - np.eye(2)))
            assert block[0, 1] == pytest.approx(-block[1, 0])


@given(st.sampled_from(list(BellKind)))
def test_tables_are_probability_vectors(kind):
    t = exact_outcome_table(kind)
    assert all(v >= -1e-15 for v in t.values())
    assert sum(t.values()) == pytest.approx(1.0, abs=1e-10)
