"""GHZ-encoded logical qubits, the N-pair logical Bell measurement and teleportation.

A logical qubit is ``a|+>^N + b|->^N``. Two such qubits (A and B) are
measured by N device runs, each on one photon of A and one of B. Every
computation here is done on a 4-branch representation of the joint state,

    sum_{s, t in {+,-}} c[s, t] |s>_A^{n_A} |t>_B^{n_B + extra}

where ``n_A`` / ``n_B`` count photons not yet measured and ``extra`` counts
photons carrying B's sign that are never measured (the receiver half of a
teleportation channel). Branches are orthogonal while their distinguishing
photons remain, and merge once all of them are gone; probabilities are taken
under that Gram structure. Per-pair Kraus amplitudes come from
:func:`ghzbell.bell_device.pair_kraus`, i.e. from Fock propagation through
the device.

Pair outcomes are sampled sequentially from the exact conditional
distribution, vectorized over independent trials.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from functools import partial
from typing import Mapping, Sequence

import numpy as np

from . import mc
from .bell_device import (
    BOTH,
    NEITHER,
    ONLY_A,
    ONLY_B,
    BellKind,
    BsOutcome,
    Family,
    OutcomeKind,
    Sign,
    pair_kraus,
)
from .loss import sample_loss_batch

LogicalBellKind = BellKind

AMP_TOL = 1e-10
PRUNE_TOL = 1e-14


class ImpossibleOutcome(RuntimeError):
    """Successes of both Bell families in one logical measurement."""


@dataclass(frozen=True)
class LogicalQubit:
    n_photons: int
    amp_plus: complex
    amp_minus: complex
    photons_present: int | None = None
    z_flag: bool = False

    def __post_init__(self):
        if self.n_photons < 1:
            raise ValueError("a logical qubit needs at least one photon")
        norm = abs(self.amp_plus) ** 2 + abs(self.amp_minus) ** 2
        if abs(norm - 1.0) > AMP_TOL:
            raise ValueError(f"|a|^2 + |b|^2 = {norm}, expected 1")
        if self.photons_present is None:
            object.__setattr__(self, "photons_present", self.n_photons)
        if not 0 <= self.photons_present <= self.n_photons:
            raise ValueError("photons_present must lie in [0, n_photons]")

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([self.amp_plus, self.amp_minus], dtype=complex)

    @classmethod
    def random(cls, n_photons: int, rng: np.random.Generator) -> "LogicalQubit":
        """Haar-random qubit state."""
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        return cls(n_photons, complex(v[0]), complex(v[1]))


def fidelity(q: LogicalQubit, amps: Sequence[complex]) -> float:
    return float(abs(np.vdot(q.amplitudes, np.asarray(amps, dtype=complex))) ** 2)


def logical_pauli_x(q: LogicalQubit) -> LogicalQubit:
    """Logical bit flip; physically a phase flip on every photon."""
    return LogicalQubit(q.n_photons, q.amp_minus, q.amp_plus, q.photons_present, q.z_flag)


def logical_pauli_z(q: LogicalQubit) -> LogicalQubit:
    """Logical phase flip; physically an H<->V flip on any one photon."""
    return LogicalQubit(q.n_photons, q.amp_plus, -q.amp_minus, q.photons_present, q.z_flag)


def logical_phase(q: LogicalQubit, theta: float) -> LogicalQubit:
    return LogicalQubit(q.n_photons, q.amp_plus, q.amp_minus * cmath.exp(1j * theta), q.photons_present, q.z_flag)


# Receiver correction for each identified logical Bell state, applied left to right.
CORRECTIONS: dict[BellKind, str] = {
    BellKind.PHI_PLUS: "",
    BellKind.PHI_MINUS: "Z",
    BellKind.PSI_PLUS: "X",
    BellKind.PSI_MINUS: "XZ",
}

_PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _correction_matrix(word: str) -> np.ndarray:
    m = np.eye(2, dtype=complex)
    for op in word:
        m = _PAULI[op] @ m
    return m


# ---------------------------------------------------------------------------
# Decomposition into pair Bell states


def expand_logical_bell(kind: BellKind, n: int) -> dict[tuple[BellKind, ...], float]:
    """Pair-Bell-state expansion of an N-photon logical Bell state.

    Uses |s>|s> = (Phi+ +- Phi-)/sqrt2 (and the Psi analogue) on every pair:
    the two GHZ branches then differ only in the sign of the terms with an odd
    number of minus-sign pair states, so exactly the sequences with the right
    minus-count parity survive, each with weight 2^{-(N-1)/2}.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    fam = kind.family
    plus, minus = (
        (BellKind.PHI_PLUS, BellKind.PHI_MINUS) if fam is Family.PHI else (BellKind.PSI_PLUS, BellKind.PSI_MINUS)
    )
    want_odd = kind.sign is Sign.MINUS
    amp = 1.0 / math.sqrt(2 ** (n - 1))
    out = {}
    for minus_at in itertools.product((False, True), repeat=n):
        if (sum(minus_at) % 2 == 1) == want_odd:
            out[tuple(minus if m else plus for m in minus_at)] = amp
    return out


# ---------------------------------------------------------------------------
# Classification


@dataclass(frozen=True)
class LogicalBMRecord:
    outcomes: tuple[BsOutcome, ...]
    result: BellKind | None
    phi_minus_count: int
    psi_minus_count: int

    @property
    def success(self) -> bool:
        return self.result is not None


def _classify_counts(phi: int, psi: int) -> BellKind | None:
    if phi and psi:
        raise ImpossibleOutcome(f"{phi} Phi- and {psi} Psi- successes in one logical measurement")
    if phi:
        return BellKind.PHI_MINUS if phi % 2 else BellKind.PHI_PLUS
    if psi:
        return BellKind.PSI_MINUS if psi % 2 else BellKind.PSI_PLUS
    return None


def classify_logical(outcomes: Sequence[BsOutcome]) -> BellKind | None:
    """Logical Bell state from N device outcomes, or ``None`` if no pair succeeded.

    Parity of the identified minus-sign pair states picks the sign; zero
    identified minus states within a family that did succeed cannot happen,
    so an even count is at least two.
    """
    if len(outcomes) < 1:
        raise ValueError("need at least one device outcome")
    phi = sum(o.kind is OutcomeKind.SUCCESS_PHI_MINUS for o in outcomes)
    psi = sum(o.kind is OutcomeKind.SUCCESS_PSI_MINUS for o in outcomes)
    return _classify_counts(phi, psi)


# ---------------------------------------------------------------------------
# Branch engine


def _sign_index(sign: Sign) -> int:
    return 0 if sign is Sign.PLUS else 1


@dataclass
class BranchState:
    """Joint state of qubits A and B in the 4-branch representation.

    ``coeffs[s, t]`` multiplies ``|s>^{photons_a} |t>^{photons_b + extra_b}``
    with index 0 for ``+`` and 1 for ``-``.
    """

    coeffs: np.ndarray
    photons_a: int
    photons_b: int
    extra_b: int = 0
    projections: list[int] = field(default_factory=list)

    def __post_init__(self):
        self.coeffs = np.array(self.coeffs, dtype=complex).reshape(2, 2)
        self.coeffs[np.abs(self.coeffs) < PRUNE_TOL] = 0

    @property
    def branches(self) -> list[tuple[complex, Sign, Sign]]:
        signs = (Sign.PLUS, Sign.MINUS)
        return [
            (complex(self.coeffs[s, t]), signs[s], signs[t])
            for s in range(2)
            for t in range(2)
            if self.coeffs[s, t] != 0
        ]

    @property
    def norm_squared(self) -> float:
        return float(_gram_norm(self.coeffs[None], np.array([self.photons_a]), np.array([self.photons_b + self.extra_b]))[0])

    @classmethod
    def logical_bell(cls, kind: BellKind, n: int) -> "BranchState":
        c = np.zeros((2, 2), dtype=complex)
        r = 1 / math.sqrt(2)
        sign = 1 if kind.sign is Sign.PLUS else -1
        if kind.family is Family.PHI:
            c[0, 0], c[1, 1] = r, sign * r
        else:
            c[0, 1], c[1, 0] = r, sign * r
        return cls(c, n, n)

    @classmethod
    def teleportation(cls, q: LogicalQubit) -> "BranchState":
        """Input ``q`` (A) with the A-half of the channel (B); ``extra_b`` is the receiver half."""
        amps = q.amplitudes / math.sqrt(2)
        c = np.stack([amps, amps], axis=1)  # c[s, t] = amp[s] / sqrt2
        return cls(c, q.n_photons, q.n_photons, extra_b=q.n_photons)


def _gram_norm(c: np.ndarray, rem_a: np.ndarray, rem_b: np.ndarray) -> np.ndarray:
    """Squared norm of branch coefficients ``c[..., s, t]`` given remaining photon counts.

    ``c`` has shape ``(T, ..., 2, 2)``; ``rem_a``/``rem_b`` have shape ``(T,)``.
    """
    both = np.sum(np.abs(c) ** 2, axis=(-2, -1))
    merge_a = np.sum(np.abs(c.sum(axis=-2)) ** 2, axis=-1)
    merge_b = np.sum(np.abs(c.sum(axis=-1)) ** 2, axis=-1)
    merge_all = np.abs(c.sum(axis=(-2, -1))) ** 2
    shape = (-1,) + (1,) * (c.ndim - 3)
    ha = (rem_a > 0).reshape(shape)
    hb = (rem_b > 0).reshape(shape)
    return np.where(ha & hb, both, np.where(hb, merge_a, np.where(ha, merge_b, merge_all)))


def _apply_z_flips(c: np.ndarray, za: np.ndarray, zb: np.ndarray) -> np.ndarray:
    c = c.copy()
    c[za, 1, :] *= -1
    c[zb, :, 1] *= -1
    return c


def run_pairs(
    coeffs: np.ndarray,
    present_a: np.ndarray,
    present_b: np.ndarray,
    extra_b: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Sample all N pair outcomes for a batch of trials.

    ``coeffs``: (T, 2, 2) initial branch coefficients (normalized, lost-photon
    Z flips already applied). The fair Z coin of a lost photon is exact while
    another photon of the same qubit survives; a qubit lost entirely is
    handled by keeping its branches orthogonal instead. ``present_a``/``present_b``: (T, N) booleans,
    False for photons lost before measurement. Returns outcome indices into
    ``pair_kraus().outcomes`` with shape (T, N), and the final normalized
    coefficients.
    """
    kr = pair_kraus()
    c = np.array(coeffs, dtype=complex)
    t, n = present_a.shape
    rows = np.arange(t)
    case = np.where(present_a & present_b, BOTH, np.where(present_a, ONLY_A, np.where(present_b, ONLY_B, NEITHER)))
    # photons still unmeasured after pair k; a qubit whose photons were all
    # lost is traced out, so its branches never merge
    after_a = present_a[:, ::-1].cumsum(axis=1)[:, ::-1] - present_a
    after_b = present_b[:, ::-1].cumsum(axis=1)[:, ::-1] - present_b + extra_b
    after_a[~present_a.any(axis=1)] = 1
    after_b[~present_b.any(axis=1)] = 1
    chosen = np.empty((t, n), dtype=np.int64)
    for k in range(n):
        cand = c[:, None, :, :] * kr.amps[case[:, k]]  # (T, O, 2, 2)
        p = _gram_norm(cand, after_a[:, k], after_b[:, k])
        cdf = np.cumsum(p, axis=1)
        u = rng.random(t) * cdf[:, -1]
        idx = np.minimum((cdf <= u[:, None]).sum(axis=1), p.shape[1] - 1)
        chosen[:, k] = idx
        pk = p[rows, idx]
        c = cand[rows, idx] / np.sqrt(pk)[:, None, None]
    return chosen, c


_KIND_CODE = {OutcomeKind.SUCCESS_PHI_MINUS: 1, OutcomeKind.SUCCESS_PSI_MINUS: 2}


def _success_counts(chosen: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    codes = np.array([_KIND_CODE.get(k, 0) for k in pair_kraus().kinds])
    sel = codes[chosen]
    return (sel == 1).sum(axis=1), (sel == 2).sum(axis=1)


def _outcome_records(row: np.ndarray) -> tuple[BsOutcome, ...]:
    kr = pair_kraus()
    out = []
    for o in row:
        occ = kr.outcomes[o]
        out.append(BsOutcome(kr.kinds[o], sum(1 for x in occ if x)))
    return tuple(out)


def measure_logical_bell(
    joint: BranchState | BellKind,
    rng: np.random.Generator,
    n: int | None = None,
    eta: float = 0.0,
) -> LogicalBMRecord:
    """Run one logical Bell measurement.

    ``joint`` is either a :class:`BranchState` or a logical Bell kind (then
    ``n`` is required). Photons of qubit A are lost with probability ``eta``
    before the device.
    """
    if isinstance(joint, BellKind):
        if n is None:
            raise ValueError("n is required when measuring a Bell kind")
        joint = BranchState.logical_bell(joint, n)
    if joint.photons_a != joint.photons_b:
        raise ValueError("both qubits must carry the same number of photons")
    chosen, _ = _measure_batch(joint.coeffs[None], joint.photons_a, joint.extra_b, eta, 0.0, rng)
    phi, psi = _success_counts(chosen)
    result = _classify_counts(int(phi[0]), int(psi[0]))
    return LogicalBMRecord(_outcome_records(chosen[0]), result, int(phi[0]), int(psi[0]))


def _measure_batch(
    coeffs: np.ndarray,
    n: int,
    extra_b: int,
    eta_a: float,
    eta_b: float,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    t = coeffs.shape[0]
    lost_a, za = sample_loss_batch(t, n, eta_a, rng)
    lost_b, zb = sample_loss_batch(t, n, eta_b, rng)
    c = _apply_z_flips(coeffs, za, zb)
    return run_pairs(c, ~lost_a, ~lost_b, extra_b, rng)


def exact_success_probability(joint: BranchState) -> float:
    """Success probability of the logical Bell measurement by full enumeration (no loss).

    Walks every sequence of device outcomes with its exact probability;
    cost grows as (outcomes per pair)^N, so keep N small.
    """
    kr = pair_kraus()
    codes = [_KIND_CODE.get(k, 0) for k in kr.kinds]
    n = joint.photons_a

    def walk(c: np.ndarray, k: int, prob: float, succeeded: bool) -> float:
        if k == n:
            return prob if succeeded else 0.0
        ra = np.array([n - k - 1])
        rb = np.array([n - k - 1 + joint.extra_b])
        cand = (c[None, :, :] * kr.amps[BOTH])[None]
        p = _gram_norm(cand, ra, rb)[0]
        total = 0.0
        for o in np.nonzero(p > 1e-15)[0]:
            total += walk(cand[0, o] / math.sqrt(p[o]), k + 1, prob * p[o], succeeded or codes[o] != 0)
        return total

    c0 = joint.coeffs / math.sqrt(joint.norm_squared)
    return walk(c0, 0, 1.0, False)


def success_probability(n: int) -> float:
    """Logical Bell measurement success probability for equally likely inputs."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 1.0 - 2.0 ** (-n)


# ---------------------------------------------------------------------------
# Teleportation


@dataclass(frozen=True)
class TeleportRecord:
    success: bool
    result: BellKind | None
    correction: str
    output: LogicalQubit
    fidelity: float
    bm: LogicalBMRecord

    @property
    def status(self) -> str:
        return "success" if self.success else "fail"


def _receiver_amplitudes(c: np.ndarray) -> np.ndarray:
    """Receiver qubit amplitudes once every photon of A is gone: sum over A's sign.

    Rows whose merged amplitudes cancel (possible only after total loss) are
    returned as |+>.
    """
    out = c.sum(axis=-2)
    norm = np.linalg.norm(out, axis=-1, keepdims=True)
    plus = np.zeros_like(out)
    plus[..., 0] = 1.0
    return np.where(norm > 1e-12, out / np.where(norm > 1e-12, norm, 1.0), plus)


def teleport(
    q: LogicalQubit,
    eta: float,
    rng: np.random.Generator,
    channel_eta: float = 0.0,
    corrections: Mapping[BellKind, str] = CORRECTIONS,
) -> TeleportRecord:
    """Teleport ``q`` through an ideal GHZ channel; input photons lost at rate ``eta``.

    ``channel_eta`` applies loss to the sender half of the channel as well.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"loss rate must lie in [0, 1], got {eta}")
    state = BranchState.teleportation(q)
    chosen, c = _measure_batch(state.coeffs[None], q.n_photons, state.extra_b, eta, channel_eta, rng)
    phi, psi = _success_counts(chosen)
    result = _classify_counts(int(phi[0]), int(psi[0]))
    bm = LogicalBMRecord(_outcome_records(chosen[0]), result, int(phi[0]), int(psi[0]))
    out = _receiver_amplitudes(c[0])
    word = corrections[result] if result is not None else ""
    out = _correction_matrix(word) @ out
    output = LogicalQubit(q.n_photons, complex(out[0]), complex(out[1]))
    return TeleportRecord(result is not None, result, word, output, fidelity(q, out), bm)


# ---------------------------------------------------------------------------
# Batched Monte Carlo kernels (module level so they pickle)

_KINDS = tuple(BellKind)


def _logical_bm_kernel(rng: np.random.Generator, count: int, n: int, eta: float, two_sided: bool = False) -> np.ndarray:
    """Tally ``[successes, phi_successes, psi_successes]`` over uniformly random Bell inputs."""
    kinds = rng.integers(0, 4, size=count)
    table = np.stack([BranchState.logical_bell(k, n).coeffs for k in _KINDS])
    chosen, _ = _measure_batch(table[kinds], n, 0, eta, eta if two_sided else 0.0, rng)
    phi, psi = _success_counts(chosen)
    if np.any((phi > 0) & (psi > 0)):
        raise ImpossibleOutcome("mixed-family successes in a sampled record")
    return np.array([np.sum((phi + psi) > 0), np.sum(phi > 0), np.sum(psi > 0)], dtype=np.int64)


def logical_bm_counts(n: int, samples: int, seed: int, eta: float = 0.0, workers: int = 1, two_sided: bool = False) -> np.ndarray:
    kernel = partial(_logical_bm_kernel, n=n, eta=eta, two_sided=two_sided)
    return mc.run_blocks(kernel, samples, seed, path=(1, n), workers=workers)


def _teleport_kernel(
    rng: np.random.Generator,
    count: int,
    n: int,
    eta: float,
    corrections: Mapping[BellKind, str] = CORRECTIONS,
) -> np.ndarray:
    """Tally ``[successes, successes with fidelity 1 (1e-10)]`` over Haar-random inputs."""
    v = rng.normal(size=(count, 2)) + 1j * rng.normal(size=(count, 2))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    c = v[:, :, None] * np.ones((1, 1, 2)) / math.sqrt(2)
    chosen, cf = _measure_batch(c, n, n, eta, 0.0, rng)
    phi, psi = _success_counts(chosen)
    out = _receiver_amplitudes(cf)
    ok = (phi + psi) > 0
    fid = np.zeros(count)
    for i in np.nonzero(ok)[0]:
        kind = _classify_counts(int(phi[i]), int(psi[i]))
        corrected = _correction_matrix(corrections[kind]) @ out[i]
        fid[i] = abs(np.vdot(v[i], corrected)) ** 2
    return np.array([ok.sum(), np.sum(ok & (np.abs(fid - 1) <= 1e-10))], dtype=np.int64)


def teleport_counts(n: int, samples: int, seed: int, eta: float = 0.0, workers: int = 1) -> np.ndarray:
    kernel = partial(_teleport_kernel, n=n, eta=eta)
    return mc.run_blocks(kernel, samples, seed, path=(2, n), workers=workers)
