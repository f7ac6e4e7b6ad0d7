"""Few-photon linear optics in the Fock basis.

States are finite superpositions of occupation vectors. A passive linear
optical element acts on creation operators as

    a_i^dagger  ->  sum_j U[j, i] a_j^dagger

and a state is propagated by expanding the product of transformed creation
operators. This is exact and cheap for the two-photon, four-mode circuits used
by the Bell measurement device; the photon cap guards against accidentally
feeding it something much larger.

Beam splitter phase convention: the real rotation ``[[c, s], [-s, c]]``
embedded on the chosen pair of modes. Any other unitary convention gives the
same click statistics.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

import numpy as np

UNITARY_TOL = 1e-12
NORM_TOL = 1e-10
PRUNE_TOL = 1e-12
DEFAULT_PHOTON_CAP = 2


class Pol(Enum):
    H = 0
    V = 1


@dataclass(frozen=True, order=True)
class ModeIndex:
    """Spatial port plus polarization. Flattened as ``2 * port + pol``."""

    port: int
    pol: Pol = Pol.H

    def __post_init__(self):
        if self.port < 0:
            raise ValueError(f"port must be >= 0, got {self.port}")

    @property
    def flat(self) -> int:
        return 2 * self.port + self.pol.value

    @classmethod
    def from_flat(cls, index: int) -> "ModeIndex":
        return cls(index // 2, Pol(index % 2))

    def __str__(self):
        return f"{self.port}{self.pol.name}"


def _flat(mode: ModeIndex | int) -> int:
    return mode.flat if isinstance(mode, ModeIndex) else int(mode)


@dataclass(frozen=True)
class ModeTransform:
    """Unitary acting on mode creation operators (column ``i`` is the image of mode ``i``)."""

    matrix: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.matrix, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValueError(f"mode transform must be square, got shape {u.shape}")
        dev = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
        if dev > UNITARY_TOL:
            raise ValueError(f"matrix is not unitary (max deviation {dev:.3e})")
        u.setflags(write=False)
        object.__setattr__(self, "matrix", u)

    @property
    def mode_count(self) -> int:
        return self.matrix.shape[0]

    def then(self, other: "ModeTransform") -> "ModeTransform":
        """Apply ``self`` first, then ``other``."""
        if other.mode_count != self.mode_count:
            raise ValueError("mode count mismatch")
        return ModeTransform(other.matrix @ self.matrix)

    @classmethod
    def identity(cls, mode_count: int) -> "ModeTransform":
        return cls(np.eye(mode_count, dtype=complex))


@dataclass(frozen=True)
class PureOpticalState:
    """Superposition ``sum_n amp[n] |n>`` over occupation vectors ``n``.

    Amplitudes are kept in lexicographic order of the occupation vectors so
    iteration and serialization are deterministic.
    """

    amplitudes: Mapping[tuple[int, ...], complex]
    photon_cap: int = DEFAULT_PHOTON_CAP
    mode_count: int = field(init=False)

    def __post_init__(self):
        amps = {tuple(int(c) for c in k): complex(v) for k, v in self.amplitudes.items()}
        if not amps:
            raise ValueError("state needs at least one occupation vector")
        lengths = {len(k) for k in amps}
        if len(lengths) != 1:
            raise ValueError("occupation vectors must share a mode count")
        for occ in amps:
            if min(occ) < 0:
                raise ValueError(f"negative photon count in {occ}")
            if sum(occ) > self.photon_cap:
                raise ValueError(f"{occ} exceeds photon cap {self.photon_cap}")
        object.__setattr__(self, "amplitudes", dict(sorted(amps.items())))
        object.__setattr__(self, "mode_count", lengths.pop())

    @classmethod
    def vacuum(cls, mode_count: int, photon_cap: int = DEFAULT_PHOTON_CAP) -> "PureOpticalState":
        return cls({(0,) * mode_count: 1.0}, photon_cap)

    @classmethod
    def fock(cls, occupation: Iterable[int], photon_cap: int = DEFAULT_PHOTON_CAP) -> "PureOpticalState":
        return cls({tuple(occupation): 1.0}, photon_cap)

    @classmethod
    def from_polynomial(
        cls,
        terms: Iterable[tuple[complex, Iterable[ModeIndex | int]]],
        mode_count: int,
        photon_cap: int = DEFAULT_PHOTON_CAP,
    ) -> "PureOpticalState":
        """Build ``sum_t coeff_t * prod(a_m^dagger for m in modes_t) |0>``.

        The result is not normalized; bosonic factors sqrt(n!) are included.
        """
        amps: dict[tuple[int, ...], complex] = {}
        for coeff, modes in terms:
            occ = [0] * mode_count
            for m in modes:
                occ[_flat(m)] += 1
            key = tuple(occ)
            weight = math.sqrt(math.prod(math.factorial(c) for c in occ))
            amps[key] = amps.get(key, 0.0) + coeff * weight
        amps = {k: v for k, v in amps.items() if abs(v) > PRUNE_TOL}
        return cls(amps or {(0,) * mode_count: 0.0}, photon_cap)

    @property
    def norm_squared(self) -> float:
        return float(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def normalized(self) -> "PureOpticalState":
        n = math.sqrt(self.norm_squared)
        if n == 0:
            raise ValueError("cannot normalize the zero vector")
        return PureOpticalState({k: v / n for k, v in self.amplitudes.items()}, self.photon_cap)

    def amplitude(self, occupation: Iterable[int]) -> complex:
        return self.amplitudes.get(tuple(occupation), 0.0)

    def total_photons(self) -> set[int]:
        return {sum(k) for k, v in self.amplitudes.items() if abs(v) > PRUNE_TOL}

    def close_to(self, other: "PureOpticalState", tol: float = NORM_TOL, up_to_phase: bool = False) -> bool:
        keys = set(self.amplitudes) | set(other.amplitudes)
        a = np.array([self.amplitude(k) for k in keys])
        b = np.array([other.amplitude(k) for k in keys])
        if up_to_phase:
            overlap = np.vdot(b, a)
            if abs(overlap) > 0:
                b = b * overlap / abs(overlap)
        return bool(np.max(np.abs(a - b), initial=0.0) <= tol)


def apply_transform(state: PureOpticalState, u: ModeTransform) -> PureOpticalState:
    """Propagate ``state`` through the linear-optical network ``u``."""
    if u.mode_count != state.mode_count:
        raise ValueError(f"transform acts on {u.mode_count} modes, state has {state.mode_count}")
    m = u.matrix
    out: dict[tuple[int, ...], complex] = {}
    for occ, amp in state.amplitudes.items():
        # one entry per photon: the input mode it was created in
        photons = [i for i, c in enumerate(occ) for _ in range(c)]
        norm_in = math.sqrt(math.prod(math.factorial(c) for c in occ))
        for targets in itertools.product(range(state.mode_count), repeat=len(photons)):
            coeff = amp / norm_in
            for i, j in zip(photons, targets):
                coeff *= m[j, i]
            if coeff == 0:
                continue
            new = [0] * state.mode_count
            for j in targets:
                new[j] += 1
            key = tuple(new)
            out[key] = out.get(key, 0.0) + coeff * math.sqrt(math.prod(math.factorial(c) for c in new))
    pruned = {k: v for k, v in out.items() if abs(v) > PRUNE_TOL}
    if not pruned:
        pruned = {(0,) * state.mode_count: 0.0}
    return PureOpticalState(pruned, state.photon_cap)


def build_beamsplitter(theta: float, modes: tuple[ModeIndex | int, ModeIndex | int], mode_count: int) -> ModeTransform:
    """Real rotation by ``theta`` between two modes; ``theta = pi/4`` is 50/50."""
    i, j = (_flat(m) for m in modes)
    if i == j:
        raise ValueError("beam splitter needs two distinct modes")
    if not (0 <= i < mode_count and 0 <= j < mode_count):
        raise ValueError(f"modes {modes} out of range for {mode_count} modes")
    u = np.eye(mode_count, dtype=complex)
    c, s = math.cos(theta), math.sin(theta)
    u[i, i], u[i, j], u[j, i], u[j, j] = c, s, -s, c
    return ModeTransform(u)


def build_waveplate_diag_to_hv(port: int, mode_count: int) -> ModeTransform:
    """Half-wave plate at 22.5 deg on one port: |+> -> |H>, |-> -> |V>.

    The 2x2 block is the Hadamard matrix, so the plate is its own inverse and
    can equally be used to turn an H/V-labelled preparation into the
    diagonal-basis state.
    """
    h, v = ModeIndex(port, Pol.H).flat, ModeIndex(port, Pol.V).flat
    if port < 0 or v >= mode_count:
        raise ValueError(f"port {port} out of range for {mode_count} modes")
    u = np.eye(mode_count, dtype=complex)
    r = 1 / math.sqrt(2)
    u[h, h], u[h, v], u[v, h], u[v, v] = r, r, r, -r
    return ModeTransform(u)


@dataclass(frozen=True)
class ClickPattern:
    """Set of detector modes that registered at least one photon."""

    clicked: frozenset[int]

    @classmethod
    def of(cls, *modes: ModeIndex | int) -> "ClickPattern":
        return cls(frozenset(_flat(m) for m in modes))

    @classmethod
    def from_occupation(cls, occupation: Iterable[int], detector_modes: Iterable[int]) -> "ClickPattern":
        occ = tuple(occupation)
        return cls(frozenset(m for m in detector_modes if occ[m] >= 1))

    def __len__(self):
        return len(self.clicked)

    def __str__(self):
        return "{" + ",".join(str(ModeIndex.from_flat(m)) for m in sorted(self.clicked)) + "}"


def click_distribution(state: PureOpticalState, detector_modes: Iterable[ModeIndex | int]) -> dict[ClickPattern, float]:
    """On-off detection statistics of ``state`` on the given detector modes."""
    detectors = sorted({_flat(m) for m in detector_modes})
    if abs(state.norm_squared - 1.0) > NORM_TOL:
        raise ValueError(f"state is not normalized (norm^2 = {state.norm_squared:.12f})")
    for occ, amp in state.amplitudes.items():
        stray = [i for i, c in enumerate(occ) if c and i not in detectors]
        if stray and abs(amp) > PRUNE_TOL:
            raise ValueError(f"photons in unmonitored modes {stray}")
    probs: dict[ClickPattern, float] = {}
    for occ, amp in state.amplitudes.items():
        pattern = ClickPattern.from_occupation(occ, detectors)
        probs[pattern] = probs.get(pattern, 0.0) + abs(amp) ** 2
    return dict(sorted(probs.items(), key=lambda kv: sorted(kv[0].clicked)))
