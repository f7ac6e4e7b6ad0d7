"""Single-photon-qubit Bell measurement built from beam splitters and on-off detectors.

Qubits are encoded in the diagonal polarization basis |+-> = (|H> +- |V>)/sqrt(2).
Photon A enters port 0 and photon B port 1. The device is a 50/50 beam
splitter across the ports (acting identically on H and V) followed by a
polarizing beam splitter on each output port; the PBS is just the H/V mode
labels of the four detectors.

Rewriting the diagonal Bell states in the H/V basis,

    Phi-  = (|++> - |-->)/sqrt2 = (|HV> + |VH>)/sqrt2    photons bunch, orthogonal pols
    Psi-  = (|+-> - |-+>)/sqrt2 = -(|HV> - |VH>)/sqrt2   singlet, photons anti-bunch
    Phi+  = (|HH> + |VV>)/sqrt2                          bunched, same pol -> 1 click
    Psi+  = (|HH> - |VV>)/sqrt2                          bunched, same pol -> 1 click

so the device identifies exactly Phi- (two clicks on one port) and Psi- (one
click on each port). The outcome tables below are computed by propagating
these states through the Fock-space engine, not read off this comment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .optics import (
    ClickPattern,
    ModeIndex,
    ModeTransform,
    Pol,
    PureOpticalState,
    apply_transform,
    build_beamsplitter,
    build_waveplate_diag_to_hv,
    click_distribution,
)

N_MODES = 4
DETECTORS = tuple(range(N_MODES))
MODE_0H, MODE_0V, MODE_1H, MODE_1V = (ModeIndex(p, pol) for p in (0, 1) for pol in (Pol.H, Pol.V))


class Family(Enum):
    PHI = "Phi"
    PSI = "Psi"


class Sign(Enum):
    PLUS = "+"
    MINUS = "-"


class BellKind(Enum):
    PHI_PLUS = (Family.PHI, Sign.PLUS)
    PHI_MINUS = (Family.PHI, Sign.MINUS)
    PSI_PLUS = (Family.PSI, Sign.PLUS)
    PSI_MINUS = (Family.PSI, Sign.MINUS)

    @property
    def family(self) -> Family:
        return self.value[0]

    @property
    def sign(self) -> Sign:
        return self.value[1]

    @property
    def label(self) -> str:
        return f"{self.family.value}{self.sign.value}"

    @classmethod
    def parse(cls, text: str) -> "BellKind":
        for k in cls:
            if text in (k.label, k.name):
                return k
        raise ValueError(f"unknown Bell state {text!r}")


class OutcomeKind(Enum):
    SUCCESS_PHI_MINUS = "success_phi_minus"
    SUCCESS_PSI_MINUS = "success_psi_minus"
    AMBIGUOUS = "ambiguous"
    CLICK_DEFICIT = "click_deficit"

    @property
    def is_success(self) -> bool:
        return self in (OutcomeKind.SUCCESS_PHI_MINUS, OutcomeKind.SUCCESS_PSI_MINUS)


_REQUIRED_CLICKS = {
    OutcomeKind.SUCCESS_PHI_MINUS: 2,
    OutcomeKind.SUCCESS_PSI_MINUS: 2,
    OutcomeKind.AMBIGUOUS: 1,
    OutcomeKind.CLICK_DEFICIT: 0,
}


@dataclass(frozen=True)
class BsOutcome:
    kind: OutcomeKind
    clicks: int

    def __post_init__(self):
        if _REQUIRED_CLICKS[self.kind] != self.clicks:
            raise ValueError(f"{self.kind.name} requires {_REQUIRED_CLICKS[self.kind]} clicks, got {self.clicks}")

    @property
    def is_success(self) -> bool:
        return self.kind.is_success


class MalformedClicks(ValueError):
    """Click pattern that two photons cannot produce on this device."""


@dataclass(frozen=True)
class BsDevice:
    circuit: tuple[ModeTransform, ...]
    detector_modes: tuple[int, ...] = DETECTORS

    @property
    def transform(self) -> ModeTransform:
        total = ModeTransform.identity(N_MODES)
        for stage in self.circuit:
            total = total.then(stage)
        return total


def build_bs_device() -> BsDevice:
    quarter = math.pi / 4
    return BsDevice(
        circuit=(
            build_beamsplitter(quarter, (MODE_0H, MODE_1H), N_MODES),
            build_beamsplitter(quarter, (MODE_0V, MODE_1V), N_MODES),
        )
    )


def classify_clicks(pattern: ClickPattern) -> BsOutcome:
    """Map an on-off click pattern on the four detectors to a B_s outcome."""
    clicked = sorted(pattern.clicked)
    if any(m not in DETECTORS for m in clicked):
        raise MalformedClicks(f"pattern {pattern} uses modes outside the device")
    if len(clicked) > 2:
        raise MalformedClicks(f"{len(clicked)} clicks from two photons: {pattern}")
    if len(clicked) == 0:
        return BsOutcome(OutcomeKind.CLICK_DEFICIT, 0)
    if len(clicked) == 1:
        return BsOutcome(OutcomeKind.AMBIGUOUS, 1)
    a, b = (ModeIndex.from_flat(m) for m in clicked)
    if a.port == b.port:
        return BsOutcome(OutcomeKind.SUCCESS_PHI_MINUS, 2)
    if a.pol != b.pol:
        return BsOutcome(OutcomeKind.SUCCESS_PSI_MINUS, 2)
    # same polarization on both ports never happens for the bosonic input
    raise MalformedClicks(f"pattern {pattern} is not produced by any Bell input")


def _diag(port: int, sign: int) -> list[tuple[complex, ModeIndex]]:
    """Creation operator of |+> (sign=+1) or |-> (sign=-1) on ``port`` as H/V terms."""
    r = 1 / math.sqrt(2)
    return [(r, ModeIndex(port, Pol.H)), (sign * r, ModeIndex(port, Pol.V))]


def product_input(sign_a: int | None, sign_b: int | None) -> PureOpticalState:
    """Diagonal-basis product state with photon A on port 0 and photon B on port 1.

    ``None`` means that photon is absent (lost before the device).
    """
    factors = [_diag(p, s) for p, s in ((0, sign_a), (1, sign_b)) if s is not None]
    terms: list[tuple[complex, list[ModeIndex]]] = [(1.0, [])]
    for factor in factors:
        terms = [(c * fc, modes + [m]) for c, modes in terms for fc, m in factor]
    return PureOpticalState.from_polynomial(terms, N_MODES)


def bell_input(kind: BellKind) -> PureOpticalState:
    """Two-photon Bell state of ``kind`` in the diagonal basis.

    Prepared with |+> and |-> written on the H and V slots of each port, then
    passed through the diag->HV plate, which is its own inverse.
    """
    h0, v0, h1, v1 = MODE_0H, MODE_0V, MODE_1H, MODE_1V
    s = 1 if kind.sign is Sign.PLUS else -1
    if kind.family is Family.PHI:
        terms = [(1.0, [h0, h1]), (s, [v0, v1])]
    else:
        terms = [(1.0, [h0, v1]), (s, [v0, h1])]
    slots = PureOpticalState.from_polynomial(terms, N_MODES).normalized()
    plates = build_waveplate_diag_to_hv(0, N_MODES).then(build_waveplate_diag_to_hv(1, N_MODES))
    return apply_transform(slots, plates)


def exact_outcome_table(kind: BellKind, device: BsDevice | None = None) -> dict[OutcomeKind, float]:
    device = device or build_bs_device()
    out = apply_transform(bell_input(kind), device.transform)
    table = {k: 0.0 for k in OutcomeKind}
    for pattern, p in click_distribution(out, device.detector_modes).items():
        table[classify_clicks(pattern).kind] += p
    return table


@lru_cache(maxsize=None)
def _pattern_table(kind: BellKind) -> tuple[tuple[ClickPattern, ...], np.ndarray]:
    device = build_bs_device()
    out = apply_transform(bell_input(kind), device.transform)
    dist = click_distribution(out, device.detector_modes)
    patterns = tuple(dist)
    return patterns, np.cumsum([dist[p] for p in patterns])


def sample_bs(kind: BellKind, rng: np.random.Generator) -> BsOutcome:
    """Draw one device outcome for a Bell-state input."""
    patterns, cdf = _pattern_table(kind)
    i = min(int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right")), len(patterns) - 1)
    return classify_clicks(patterns[i])


# Survivor cases for a photon pair entering the device.
BOTH, ONLY_A, ONLY_B, NEITHER = range(4)


@dataclass(frozen=True)
class PairKraus:
    """Device Kraus amplitudes on diagonal product inputs.

    ``amps[case, o, a, b]`` is the amplitude <o|U|s_a s_b> of output occupation
    vector ``outcomes[o]`` for input signs indexed ``a, b`` (0 -> +, 1 -> -),
    under survivor ``case``. For cases with a missing photon the amplitude
    does not depend on that photon's index.
    """

    outcomes: tuple[tuple[int, ...], ...]
    kinds: tuple[OutcomeKind, ...]
    amps: np.ndarray


@lru_cache(maxsize=None)
def pair_kraus() -> PairKraus:
    device = build_bs_device()
    u = device.transform
    per_case: list[dict[tuple[int, int], PureOpticalState]] = [{} for _ in range(4)]
    for a, sa in enumerate((1, -1)):
        for b, sb in enumerate((1, -1)):
            per_case[BOTH][a, b] = apply_transform(product_input(sa, sb), u)
            per_case[ONLY_A][a, b] = apply_transform(product_input(sa, None), u)
            per_case[ONLY_B][a, b] = apply_transform(product_input(None, sb), u)
            per_case[NEITHER][a, b] = apply_transform(product_input(None, None), u)
    outcomes = sorted({occ for case in per_case for st in case.values() for occ in st.amplitudes})
    amps = np.zeros((4, len(outcomes), 2, 2), dtype=complex)
    for c, case in enumerate(per_case):
        for (a, b), st in case.items():
            for o, occ in enumerate(outcomes):
                amps[c, o, a, b] = st.amplitude(occ)
    kinds = tuple(classify_clicks(ClickPattern.from_occupation(o, DETECTORS)).kind for o in outcomes)
    amps.setflags(write=False)
    return PairKraus(tuple(outcomes), kinds, amps)
